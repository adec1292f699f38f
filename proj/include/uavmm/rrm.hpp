#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "uavmm/core.hpp"
#include "uavmm/radio.hpp"

namespace uavmm {

struct MeasConfig {
  double report_period_s = 0.2;
  double gap_period_s = 0.04;    // one gap opportunity per period
  double gap_duration_ms = 6.0;  // data interruption per gap used (single radio)
  int ecgi_decode_gaps = 2;      // consecutive gaps needed to decode an ECGI
  std::set<int> intra_layers;    // always measured in addition to the serving layer
  std::set<int> inter_layers;    // measured only when a gap is available
};

inline std::vector<std::string> validate(const MeasConfig& m) {
  std::vector<std::string> errs;
  if (m.report_period_s <= 0.0) errs.push_back("meas.report_period_s must be > 0");
  if (m.gap_period_s <= 0.0) errs.push_back("meas.gap_period_s must be > 0");
  if (m.ecgi_decode_gaps < 2) errs.push_back("meas.ecgi_decode_gaps must be >= 2");
  return errs;
}

enum class EventKind { A1, A2, A3, A4, A5, A6, B1, B2 };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::A1: return "A1";
    case EventKind::A2: return "A2";
    case EventKind::A3: return "A3";
    case EventKind::A4: return "A4";
    case EventKind::A5: return "A5";
    case EventKind::A6: return "A6";
    case EventKind::B1: return "B1";
    case EventKind::B2: return "B2";
  }
  return "?";
}

struct EventConfig {
  double a1_thresh_dbm = -75.0;
  double a2_thresh_dbm = -95.0;
  double a3_offset_db = 3.0;
  double a4_thresh_dbm = -80.0;
  double a5_thresh1_dbm = -100.0;
  double a5_thresh2_dbm = -85.0;
  double a6_offset_db = 3.0;
  double b1_thresh_dbm = -85.0;
  double b2_thresh1_dbm = -100.0;
  double b2_thresh2_dbm = -90.0;
  double hysteresis_db = 1.0;
  double time_to_trigger_s = 0.48;
  std::set<EventKind> enabled{EventKind::A1, EventKind::A2, EventKind::A3, EventKind::A5};
};

inline std::vector<std::string> validate(const EventConfig& e) {
  std::vector<std::string> errs;
  if (e.hysteresis_db < 0.0) errs.push_back("events.hysteresis_db must be >= 0");
  if (e.time_to_trigger_s < 0.0) errs.push_back("events.time_to_trigger_s must be >= 0");
  if (e.a5_thresh1_dbm >= e.a5_thresh2_dbm)
    errs.push_back("events.a5_thresh1_dbm must be < a5_thresh2_dbm");
  if (e.b2_thresh1_dbm >= e.b2_thresh2_dbm)
    errs.push_back("events.b2_thresh1_dbm must be < b2_thresh2_dbm");
  return errs;
}

struct ReportedCell {
  Pci pci = 0;
  double rsrp_dbm = 0.0;
  int freq_layer = 0;
  Rat rat = Rat::NR;
  std::optional<Ecgi> ecgi;  // present only once resolved by the network
  // Simulator ground truth: the strongest cell actually producing this PCI's
  // signal. Diagnostic; network-side logic must not read it directly.
  Ecgi true_ecgi = 0;
};

struct MeasurementReport {
  int ue_id = 0;
  double t_s = 0.0;
  Pci serving_pci = 0;
  double serving_rsrp_dbm = 0.0;
  int serving_layer = 0;
  Rat serving_rat = Rat::NR;
  std::vector<ReportedCell> cells;  // descending RSRP, never the serving PCI
};

struct MobilityEvent {
  EventKind kind;
  std::optional<ReportedCell> target;  // A3..A6, B1, B2
  double t_s = 0.0;
};

// Raw per-cell signal snapshot handed in by the simulation core.
struct CellSignal {
  Ecgi ecgi = 0;
  Pci pci = 0;
  double rsrp_dbm = 0.0;
  int freq_layer = 0;
  Rat rat = Rat::NR;
};

// Gap opportunities sit at t = k * gap_period. Count within (t0, t1].
inline int gap_opportunities_between(double t0, double t1, double gap_period_s) {
  const auto idx = [gap_period_s](double t) {
    return static_cast<long long>(std::floor(t / gap_period_s + 1e-9));
  };
  return static_cast<int>(idx(t1) - idx(t0));
}

// Whether a report issued at `t` had a scheduled gap within its period.
inline bool report_window_has_gap(double t, const MeasConfig& cfg) {
  return gap_opportunities_between(t - cfg.report_period_s, t, cfg.gap_period_s) > 0;
}

// Builds the UE-side measurement report. Collision blindness removes every
// cell sharing the serving PCI; same-PCI neighbours collapse to the strongest
// one (the UE cannot tell them apart). Inter-layer content appears only when
// the UE could measure it: always in idle mode or with a dual radio,
// otherwise per the gap schedule. Inter-RAT cells additionally require the
// A2-driven enable flag while connected.
inline MeasurementReport build_measurement_report(
    int ue_id, double t_s, const CellSignal& serving,
    const std::vector<CellSignal>& candidates, const MeasConfig& cfg,
    const PropagationParams& params, RrcMode mode, RadioKind radio,
    bool inter_rat_enabled) {
  MeasurementReport report;
  report.ue_id = ue_id;
  report.t_s = t_s;
  report.serving_pci = serving.pci;
  report.serving_rsrp_dbm = serving.rsrp_dbm;
  report.serving_layer = serving.freq_layer;
  report.serving_rat = serving.rat;

  const bool gaps_free = (mode == RrcMode::Idle) || (radio == RadioKind::Dual);
  const bool inter_layer_ok = gaps_free || report_window_has_gap(t_s, cfg);
  const bool inter_rat_ok = gaps_free || (inter_rat_enabled && inter_layer_ok);

  std::map<Pci, ReportedCell> by_pci;
  for (const CellSignal& sig : candidates) {
    if (sig.ecgi == serving.ecgi) continue;
    if (sig.pci == serving.pci) continue;  // collision blindness
    if (sig.rsrp_dbm < params.detection_threshold_dbm) continue;
    const bool intra = sig.freq_layer == serving.freq_layer ||
                       cfg.intra_layers.count(sig.freq_layer) > 0;
    if (!intra) {
      if (!cfg.inter_layers.count(sig.freq_layer)) continue;
      if (!inter_layer_ok) continue;
    }
    if (sig.rat != serving.rat && !inter_rat_ok) continue;
    auto it = by_pci.find(sig.pci);
    if (it == by_pci.end() || sig.rsrp_dbm > it->second.rsrp_dbm) {
      ReportedCell rc;
      rc.pci = sig.pci;
      rc.rsrp_dbm = sig.rsrp_dbm;
      rc.freq_layer = sig.freq_layer;
      rc.rat = sig.rat;
      rc.true_ecgi = sig.ecgi;
      by_pci[sig.pci] = rc;
    }
  }
  report.cells.reserve(by_pci.size());
  for (auto& [pci, rc] : by_pci) report.cells.push_back(rc);
  std::sort(report.cells.begin(), report.cells.end(),
            [](const ReportedCell& a, const ReportedCell& b) {
              if (a.rsrp_dbm != b.rsrp_dbm) return a.rsrp_dbm > b.rsrp_dbm;
              return a.true_ecgi < b.true_ecgi;
            });
  return report;
}

// Entering-condition tracker with hysteresis and time-to-trigger. An episode
// opens when a condition first holds, fires once when it has held
// continuously for TTT, and dies the moment the condition fails.
class EventEvaluator {
 public:
  explicit EventEvaluator(EventConfig cfg) : cfg_(std::move(cfg)) {}

  const EventConfig& config() const { return cfg_; }

  void reset() { episodes_.clear(); }

  // The serving-cell-level episode key uses this sentinel PCI.
  static constexpr Pci kServingKey = -1;

  std::vector<MobilityEvent> on_report(
      const MeasurementReport& report,
      const std::optional<ReportedCell>& secondary = std::nullopt) {
    if (cfg_.enabled.count(EventKind::A6) && !secondary.has_value()) {
      throw std::logic_error("A6 enabled without a configured secondary cell");
    }
    const double hys = cfg_.hysteresis_db;
    const double ms = report.serving_rsrp_dbm;
    std::vector<MobilityEvent> fired;
    std::set<std::pair<EventKind, Pci>> satisfied;

    auto touch = [&](EventKind kind, Pci key, const std::optional<ReportedCell>& target) {
      satisfied.insert({kind, key});
      auto it = episodes_.find({kind, key});
      if (it == episodes_.end()) {
        it = episodes_.emplace(std::make_pair(kind, key), Episode{report.t_s, false}).first;
      }
      Episode& ep = it->second;
      if (!ep.fired && report.t_s - ep.started_at >= cfg_.time_to_trigger_s - 1e-9) {
        ep.fired = true;
        fired.push_back({kind, target, report.t_s});
      }
    };

    if (cfg_.enabled.count(EventKind::A1) && ms > cfg_.a1_thresh_dbm + hys) {
      touch(EventKind::A1, kServingKey, std::nullopt);
    }
    if (cfg_.enabled.count(EventKind::A2) && ms < cfg_.a2_thresh_dbm - hys) {
      touch(EventKind::A2, kServingKey, std::nullopt);
    }
    for (const ReportedCell& n : report.cells) {
      const bool same_rat = n.rat == report.serving_rat;
      if (same_rat) {
        if (cfg_.enabled.count(EventKind::A3) &&
            n.rsrp_dbm > ms + cfg_.a3_offset_db + hys) {
          touch(EventKind::A3, n.pci, n);
        }
        if (cfg_.enabled.count(EventKind::A4) && n.rsrp_dbm > cfg_.a4_thresh_dbm + hys) {
          touch(EventKind::A4, n.pci, n);
        }
        if (cfg_.enabled.count(EventKind::A5) && ms < cfg_.a5_thresh1_dbm - hys &&
            n.rsrp_dbm > cfg_.a5_thresh2_dbm + hys) {
          touch(EventKind::A5, n.pci, n);
        }
        if (cfg_.enabled.count(EventKind::A6) && secondary.has_value() &&
            n.pci != secondary->pci &&
            n.rsrp_dbm > secondary->rsrp_dbm + cfg_.a6_offset_db + hys) {
          touch(EventKind::A6, n.pci, n);
        }
      } else {
        if (cfg_.enabled.count(EventKind::B1) && n.rsrp_dbm > cfg_.b1_thresh_dbm + hys) {
          touch(EventKind::B1, n.pci, n);
        }
        if (cfg_.enabled.count(EventKind::B2) && ms < cfg_.b2_thresh1_dbm - hys &&
            n.rsrp_dbm > cfg_.b2_thresh2_dbm + hys) {
          touch(EventKind::B2, n.pci, n);
        }
      }
    }

    // Close episodes whose condition lapsed this report.
    for (auto it = episodes_.begin(); it != episodes_.end();) {
      if (!satisfied.count(it->first)) {
        it = episodes_.erase(it);
      } else {
        ++it;
      }
    }
    return fired;
  }

  // True when the entering condition currently holds and TTT has elapsed.
  // Used to retry a handover that failed on a missing NRT entry.
  bool episode_active(EventKind kind, Pci target) const {
    auto it = episodes_.find({kind, target});
    return it != episodes_.end() && it->second.fired;
  }

 private:
  struct Episode {
    double started_at;
    bool fired;
  };
  EventConfig cfg_;
  std::map<std::pair<EventKind, Pci>, Episode> episodes_;
};

// Replays a time-ordered history through a fresh evaluator.
inline std::vector<MobilityEvent> evaluate_events(
    const std::vector<MeasurementReport>& history, const EventConfig& cfg,
    const std::optional<ReportedCell>& secondary = std::nullopt) {
  if (history.empty()) throw std::invalid_argument("evaluate_events: empty history");
  EventEvaluator eval(cfg);
  std::vector<MobilityEvent> all;
  for (const auto& report : history) {
    auto fired = eval.on_report(report, secondary);
    all.insert(all.end(), fired.begin(), fired.end());
  }
  return all;
}

}  // namespace uavmm
