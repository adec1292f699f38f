#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <variant>
#include <vector>

#include "uavmm/core.hpp"
#include "uavmm/rng.hpp"
#include "uavmm/rrm.hpp"
#include "uavmm/topology.hpp"

namespace uavmm {

enum class AddMechanism { MeasurementBased, UplinkId, ReconnectBased };

struct AnrPolicy {
  std::set<AddMechanism> add_mechanisms{AddMechanism::MeasurementBased};
  double t_remove_s = 600.0;         // ground-table staleness limit
  double aerial_t_remove_s = 3600.0; // aerial relations age out much slower
  int r_block = 3;
  double w_block_s = 3600.0;
  bool always_resolve_ecgi = false;  // dual-radio mitigation
  bool separate_aerial = false;      // aerial-NRT mitigation
  std::size_t max_size = 32;
  double p_drop_on_decode_fail = 0.2;
  double resolve_deadline_reports = 5.0;  // deadline in report periods
  double ulid_threshold_dbm = -105.0;
};

inline std::vector<std::string> validate(const AnrPolicy& p) {
  std::vector<std::string> errs;
  if (p.t_remove_s <= 0.0) errs.push_back("anr.t_remove_s must be > 0");
  if (p.aerial_t_remove_s <= 0.0) errs.push_back("anr.aerial_t_remove_s must be > 0");
  if (p.r_block < 1) errs.push_back("anr.r_block must be >= 1");
  if (p.w_block_s <= 0.0) errs.push_back("anr.w_block_s must be > 0");
  if (p.max_size == 0) errs.push_back("anr.max_size must be >= 1");
  if (p.p_drop_on_decode_fail < 0.0 || p.p_drop_on_decode_fail > 1.0)
    errs.push_back("anr.p_drop_on_decode_fail must be in [0, 1]");
  return errs;
}

struct NeighbourRelation {
  Pci pci = 0;
  Ecgi ecgi = 0;
  bool block_listed = false;
  double added_at = 0.0;
  double last_reported = 0.0;
};

struct NrtTable {
  std::vector<NeighbourRelation> relations;

  NeighbourRelation* find_by_ecgi(Ecgi e) {
    for (auto& r : relations)
      if (r.ecgi == e) return &r;
    return nullptr;
  }
  const NeighbourRelation* find_by_ecgi(Ecgi e) const {
    for (const auto& r : relations)
      if (r.ecgi == e) return &r;
    return nullptr;
  }

  // The mapping the network would use for a reported PCI. If several
  // relations share the PCI the earliest added wins (stable and wrong in
  // exactly the way PCI confusion is wrong). `prefer` short-circuits to a
  // specific ECGI when present, for confirmed mappings.
  NeighbourRelation* find_by_pci(Pci pci, std::optional<Ecgi> prefer = std::nullopt) {
    NeighbourRelation* best = nullptr;
    for (auto& r : relations) {
      if (r.pci != pci) continue;
      if (prefer && r.ecgi == *prefer) return &r;
      if (!best || r.added_at < best->added_at ||
          (r.added_at == best->added_at && r.ecgi < best->ecgi)) {
        best = &r;
      }
    }
    return best;
  }

  std::size_t size() const { return relations.size(); }
  std::size_t block_listed_count() const {
    std::size_t n = 0;
    for (const auto& r : relations) n += r.block_listed ? 1 : 0;
    return n;
  }
};

// In-flight ECGI decode for one reported PCI.
struct PendingResolution {
  Pci pci = 0;
  int ue_id = 0;
  UeKind ue_kind = UeKind::Gue;
  double started_at = 0.0;
  double deadline_at = 0.0;
  int consecutive_gaps = 0;
};

// Per-cell neighbour relation state: the ground table, the optional aerial
// table, decode bookkeeping, and the removal/block-list history.
struct Nrt {
  Ecgi owner = 0;
  NrtTable ground;
  NrtTable aerial;
  std::map<Pci, PendingResolution> pending;
  std::map<Ecgi, std::vector<double>> removal_history;  // removal timestamps
  std::set<Ecgi> block_registry;  // ECGIs that must re-enter block-listed

  NrtTable& active(UeKind kind, const AnrPolicy& policy) {
    return (policy.separate_aerial && kind == UeKind::Uav) ? aerial : ground;
  }
  const NrtTable& active(UeKind kind, const AnrPolicy& policy) const {
    return (policy.separate_aerial && kind == UeKind::Uav) ? aerial : ground;
  }
};

struct ActKnown {
  Pci pci;
  Ecgi ecgi;
};
struct ActRequestEcgi {
  Pci pci;
};
struct ActConfusionLatent {
  Pci pci;
  Ecgi nrt_ecgi;
  Ecgi true_ecgi;
};
using AnrAction = std::variant<ActKnown, ActRequestEcgi, ActConfusionLatent>;

// Serving-cell reaction to a measurement report. A PCI already in the table
// is trusted without an ECGI check; the ConfusionLatent tag records, from
// ground truth, when that trust is misplaced. With always_resolve_ecgi the
// serving cell keeps requesting the ECGI until the mapping matches the cell
// actually heard, so no latent confusion survives.
inline std::vector<AnrAction> on_report(Nrt& nrt, const MeasurementReport& report,
                                        UeKind ue_kind, const AnrPolicy& policy,
                                        double now) {
  std::vector<AnrAction> actions;
  if (!policy.add_mechanisms.count(AddMechanism::MeasurementBased)) return actions;
  NrtTable& table = nrt.active(ue_kind, policy);
  for (const ReportedCell& rc : report.cells) {
    NeighbourRelation* rel = table.find_by_pci(
        rc.pci, policy.always_resolve_ecgi ? std::optional<Ecgi>(rc.true_ecgi)
                                           : std::nullopt);
    if (policy.always_resolve_ecgi) {
      if (rel && rel->ecgi == rc.true_ecgi) {
        rel->last_reported = now;
        actions.push_back(ActKnown{rc.pci, rel->ecgi});
      } else if (!nrt.pending.count(rc.pci)) {
        actions.push_back(ActRequestEcgi{rc.pci});
      }
      continue;
    }
    if (rel) {
      rel->last_reported = now;
      actions.push_back(ActKnown{rc.pci, rel->ecgi});
      if (rel->ecgi != rc.true_ecgi) {
        actions.push_back(ActConfusionLatent{rc.pci, rel->ecgi, rc.true_ecgi});
      }
    } else if (!nrt.pending.count(rc.pci)) {
      actions.push_back(ActRequestEcgi{rc.pci});
    }
  }
  return actions;
}

inline PendingResolution start_resolution(Nrt& nrt, Pci pci, int ue_id, UeKind ue_kind,
                                          double now, const MeasConfig& meas,
                                          const AnrPolicy& policy) {
  PendingResolution p;
  p.pci = pci;
  p.ue_id = ue_id;
  p.ue_kind = ue_kind;
  p.started_at = now;
  p.deadline_at = now + policy.resolve_deadline_reports * meas.report_period_s;
  nrt.pending[pci] = p;
  return p;
}

enum class ResolveStep { Pending, Resolved, Failed };

// Advances one decode by one gap opportunity. The decode needs
// ecgi_decode_gaps *consecutive* available gaps; a missed gap restarts the
// count, and overshooting the deadline fails the request.
inline ResolveStep advance_resolution(PendingResolution& p, bool gap_available,
                                      double now, const MeasConfig& meas) {
  if (now > p.deadline_at + 1e-9) return ResolveStep::Failed;
  if (gap_available) {
    if (++p.consecutive_gaps >= meas.ecgi_decode_gaps) return ResolveStep::Resolved;
  } else {
    p.consecutive_gaps = 0;
  }
  return ResolveStep::Pending;
}

struct ResolveOutcome {
  bool resolved = false;
  Ecgi ecgi = 0;
  bool dropped = false;        // connection lost on decode failure
  double elapsed_s = 0.0;
  double interruption_s = 0.0; // data time spent inside gaps (single radio)
};

// Whole-decode convenience runner over the gap schedule. Idle mode or a dual
// radio always resolves with zero data interruption; a connected single
// radio gets each gap with probability (1 - data_activity).
inline ResolveOutcome resolve_ecgi(RrcMode mode, RadioKind radio, double data_activity,
                                   const MeasConfig& meas, const AnrPolicy& policy,
                                   Ecgi true_ecgi, Rng& rng) {
  ResolveOutcome out;
  const bool unconstrained = (mode == RrcMode::Idle) || (radio == RadioKind::Dual);
  PendingResolution p;
  p.started_at = 0.0;
  p.deadline_at = policy.resolve_deadline_reports * meas.report_period_s;
  double t = 0.0;
  while (true) {
    t += meas.gap_period_s;
    const bool available = unconstrained || !rng.bernoulli(data_activity);
    if (!unconstrained && available) out.interruption_s += meas.gap_duration_ms / 1000.0;
    const ResolveStep step = advance_resolution(p, available, t, meas);
    if (step == ResolveStep::Resolved) {
      out.resolved = true;
      out.ecgi = true_ecgi;
      out.elapsed_s = t;
      if (unconstrained) out.interruption_s = 0.0;
      return out;
    }
    if (step == ResolveStep::Failed) {
      out.resolved = false;
      out.elapsed_s = t;
      out.dropped = rng.bernoulli(policy.p_drop_on_decode_fail);
      return out;
    }
  }
}

struct CommitResult {
  bool inserted = false;      // false = refreshed an existing relation
  bool block_listed = false;  // relation entered block-listed
  std::optional<Ecgi> evicted;
};

// Inserts or refreshes a relation in the table the reporting UE kind maps
// to. A full table evicts the relation with the oldest last_reported,
// skipping the protected set (cells currently involved in handovers).
inline CommitResult commit_resolution(Nrt& nrt, Pci pci, Ecgi ecgi, double now,
                                      UeKind ue_kind, const AnrPolicy& policy,
                                      const std::set<Ecgi>& protected_ecgis = {}) {
  CommitResult result;
  NrtTable& table = nrt.active(ue_kind, policy);
  if (NeighbourRelation* existing = table.find_by_ecgi(ecgi)) {
    existing->last_reported = now;
    existing->pci = pci;
    return result;
  }
  if (table.size() >= policy.max_size) {
    auto victim = table.relations.end();
    for (auto it = table.relations.begin(); it != table.relations.end(); ++it) {
      if (protected_ecgis.count(it->ecgi)) continue;
      if (victim == table.relations.end() || it->last_reported < victim->last_reported ||
          (it->last_reported == victim->last_reported && it->ecgi < victim->ecgi)) {
        victim = it;
      }
    }
    if (victim == table.relations.end()) return result;  // nothing evictable
    result.evicted = victim->ecgi;
    table.relations.erase(victim);
  }
  NeighbourRelation rel;
  rel.pci = pci;
  rel.ecgi = ecgi;
  rel.added_at = now;
  rel.last_reported = now;
  rel.block_listed = nrt.block_registry.count(ecgi) > 0;
  result.inserted = true;
  result.block_listed = rel.block_listed;
  table.relations.push_back(rel);
  return result;
}

struct SweepResult {
  std::vector<Ecgi> removed;
  std::vector<Ecgi> removed_aerial;
  std::vector<Ecgi> newly_block_listed;
};

// Drops relations whose last report is older than the staleness limit and
// logs each removal. An ECGI removed r_block times inside the w_block window
// enters the block registry; it re-enters any table block-listed.
inline SweepResult removal_sweep(Nrt& nrt, double now, const AnrPolicy& policy) {
  SweepResult result;
  auto sweep_table = [&](NrtTable& table, double t_remove, std::vector<Ecgi>& removed) {
    for (auto it = table.relations.begin(); it != table.relations.end();) {
      if (now - it->last_reported > t_remove) {
        nrt.removal_history[it->ecgi].push_back(now);
        removed.push_back(it->ecgi);
        it = table.relations.erase(it);
      } else {
        ++it;
      }
    }
  };
  sweep_table(nrt.ground, policy.t_remove_s, result.removed);
  sweep_table(nrt.aerial, policy.aerial_t_remove_s, result.removed_aerial);

  auto count_recent = [&](Ecgi e) {
    int n = 0;
    for (double t : nrt.removal_history[e]) {
      if (t >= now - policy.w_block_s) ++n;
    }
    return n;
  };
  for (const auto& list : {result.removed, result.removed_aerial}) {
    for (Ecgi e : list) {
      if (!nrt.block_registry.count(e) && count_recent(e) >= policy.r_block) {
        nrt.block_registry.insert(e);
        result.newly_block_listed.push_back(e);
      }
    }
  }
  return result;
}

// Uplink-ID mechanism: every cell hearing the UE's uplink above the
// threshold adds the UE's *serving* cell into its own table.
inline std::vector<Ecgi> ulid_add(std::map<Ecgi, Nrt>& nrts, const Topology& topo,
                                  const Position& ue_pos, Ecgi serving_ecgi,
                                  Pci serving_pci, UeKind ue_kind, double now,
                                  const PropagationParams& params,
                                  const AnrPolicy& policy) {
  std::vector<Ecgi> added_at;
  if (!policy.add_mechanisms.count(AddMechanism::UplinkId)) return added_at;
  for (const CellRecord& cell : topo.cells) {
    if (cell.ecgi == serving_ecgi) continue;
    if (uplink_rx_dbm(cell, ue_pos, params) < policy.ulid_threshold_dbm) continue;
    commit_resolution(nrts[cell.ecgi], serving_pci, serving_ecgi, now, ue_kind, policy);
    nrts[cell.ecgi].owner = cell.ecgi;
    added_at.push_back(cell.ecgi);
  }
  return added_at;
}

// Reconnect mechanism: after a drop and re-establishment, the new serving
// cell records the cell the UE came from.
inline bool reconnect_add(Nrt& new_cell_nrt, std::optional<Ecgi> previous_ecgi,
                          Pci previous_pci, double now, UeKind ue_kind,
                          const AnrPolicy& policy) {
  if (!policy.add_mechanisms.count(AddMechanism::ReconnectBased)) return false;
  if (!previous_ecgi || *previous_ecgi == new_cell_nrt.owner) return false;
  commit_resolution(new_cell_nrt, previous_pci, *previous_ecgi, now, ue_kind, policy);
  return true;
}

// Planner-facing view of all tables (ground and aerial relations merged).
inline NrtView nrt_view(const std::map<Ecgi, Nrt>& nrts) {
  NrtView view;
  for (const auto& [owner, nrt] : nrts) {
    auto& rels = view[owner];
    for (const auto& r : nrt.ground.relations) rels.emplace_back(r.pci, r.ecgi);
    for (const auto& r : nrt.aerial.relations) rels.emplace_back(r.pci, r.ecgi);
  }
  return view;
}

}  // namespace uavmm
