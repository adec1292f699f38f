#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uavmm/core.hpp"
#include "uavmm/geometry.hpp"
#include "uavmm/radio.hpp"
#include "uavmm/rng.hpp"

namespace uavmm {

// Disjoint PCI ranges per tier, carved out of the RAT-wide pool.
struct PciPools {
  int pool_size = kNrPciPoolSize;
  std::set<Pci> macro_set;
  std::set<Pci> small_set;

  const std::set<Pci>& for_tier(Tier t) const {
    return t == Tier::Macro ? macro_set : small_set;
  }
};

struct Topology {
  std::vector<CellRecord> cells;
  Rect bounds;
  PciPools pools;

  const CellRecord* find(Ecgi ecgi) const {
    for (const auto& c : cells)
      if (c.ecgi == ecgi) return &c;
    return nullptr;
  }
};

// Reports intersections and out-of-range PCIs; empty result means ok.
inline std::vector<std::string> validate_pools(const PciPools& pools) {
  std::vector<std::string> violations;
  for (Pci p : pools.macro_set) {
    if (pools.small_set.count(p)) {
      violations.push_back("pci " + std::to_string(p) + " present in both tiers");
    }
  }
  auto check_range = [&](const std::set<Pci>& s, const char* name) {
    for (Pci p : s) {
      if (p < 0 || p >= pools.pool_size) {
        violations.push_back(std::string(name) + " pci " + std::to_string(p) +
                             " outside [0, " + std::to_string(pools.pool_size) + ")");
      }
    }
  };
  check_range(pools.macro_set, "macro");
  check_range(pools.small_set, "small");
  return violations;
}

inline std::vector<std::string> validate_topology(const Topology& topo) {
  std::vector<std::string> violations = validate_pools(topo.pools);
  std::set<Ecgi> seen;
  for (const auto& c : topo.cells) {
    if (!seen.insert(c.ecgi).second) {
      violations.push_back("duplicate ecgi " + std::to_string(c.ecgi));
    }
    if (!topo.pools.for_tier(c.tier).count(c.pci)) {
      violations.push_back("cell " + std::to_string(c.ecgi) + " pci " +
                           std::to_string(c.pci) + " not in its tier pool");
    }
    if (!c.position.finite() || c.position.z < 0.0) {
      violations.push_back("cell " + std::to_string(c.ecgi) + " position invalid");
    }
    if (!topo.bounds.contains(c.position.x, c.position.y)) {
      violations.push_back("cell " + std::to_string(c.ecgi) + " outside bounds");
    }
  }
  return violations;
}

// Greedy reuse-distance PCI planning. Cells are processed in (tier, ecgi)
// order; each takes the PCI maximizing the minimum 3D distance to cells
// already holding it (an unused PCI counts as infinite), ties to the lowest
// PCI. Deterministic by construction.
inline std::map<Ecgi, Pci> assign_pcis(const Topology& topo, const PciPools& pools) {
  std::vector<const CellRecord*> order;
  order.reserve(topo.cells.size());
  for (const auto& c : topo.cells) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const CellRecord* a, const CellRecord* b) {
    if (a->tier != b->tier) return a->tier < b->tier;
    return a->ecgi < b->ecgi;
  });

  std::map<Pci, std::vector<Position>> taken;  // positions already holding a pci
  std::map<Ecgi, Pci> assignment;
  for (const CellRecord* cell : order) {
    const std::set<Pci>& pool = pools.for_tier(cell->tier);
    if (pool.empty()) {
      throw ValidationError(std::string("assign_pcis: empty ") + to_string(cell->tier) +
                            " pool");
    }
    Pci best = -1;
    double best_score = -1.0;
    for (Pci candidate : pool) {  // ascending, so strict > keeps the lowest on ties
      double score = std::numeric_limits<double>::infinity();
      auto it = taken.find(candidate);
      if (it != taken.end()) {
        for (const Position& pos : it->second) {
          score = std::min(score, distance_3d(pos, cell->position));
        }
      }
      if (score > best_score) {
        best_score = score;
        best = candidate;
      }
    }
    assignment[cell->ecgi] = best;
    taken[best].push_back(cell->position);
  }
  return assignment;
}

inline void apply_pci_assignment(Topology& topo, const std::map<Ecgi, Pci>& assignment) {
  for (auto& c : topo.cells) {
    auto it = assignment.find(c.ecgi);
    if (it != assignment.end()) c.pci = it->second;
  }
}

// Horizontal sample grid over the bounds at a fixed altitude.
inline std::vector<Position> coverage_grid(const Rect& bounds, double altitude_m,
                                           double spacing_m) {
  std::vector<Position> pts;
  for (double y = bounds.min_y; y <= bounds.max_y + 1e-9; y += spacing_m) {
    for (double x = bounds.min_x; x <= bounds.max_x + 1e-9; x += spacing_m) {
      pts.push_back({x, y, altitude_m});
    }
  }
  return pts;
}

inline bool cell_covers(const CellRecord& cell, const Position& at,
                        const PropagationParams& params) {
  if (cell.position == at) return true;
  return rsrp_expected_dbm(cell, at, params) >= params.detection_threshold_dbm;
}

// Same-PCI cell pairs whose coverage regions overlap in at least one grid
// point at the query altitude. Shadowing off, expected path loss.
inline std::vector<std::pair<Ecgi, Ecgi>> detect_pci_collision(
    const Topology& topo, double altitude_m, const PropagationParams& params,
    double grid_spacing_m = 25.0) {
  const std::vector<Position> grid = coverage_grid(topo.bounds, altitude_m, grid_spacing_m);
  std::vector<std::vector<bool>> covers(topo.cells.size(),
                                        std::vector<bool>(grid.size(), false));
  for (std::size_t i = 0; i < topo.cells.size(); ++i) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      covers[i][g] = cell_covers(topo.cells[i], grid[g], params);
    }
  }
  std::vector<std::pair<Ecgi, Ecgi>> out;
  for (std::size_t i = 0; i < topo.cells.size(); ++i) {
    for (std::size_t j = i + 1; j < topo.cells.size(); ++j) {
      if (topo.cells[i].pci != topo.cells[j].pci) continue;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        if (covers[i][g] && covers[j][g]) {
          Ecgi a = topo.cells[i].ecgi;
          Ecgi b = topo.cells[j].ecgi;
          out.emplace_back(std::min(a, b), std::max(a, b));
          break;
        }
      }
    }
  }
  return out;
}

// Serving cell -> list of (pci, ecgi) relations. Built from the ANR tables;
// kept as a plain map so planning checks do not depend on the ANR module.
using NrtView = std::map<Ecgi, std::vector<std::pair<Pci, Ecgi>>>;

struct ConfusionFinding {
  Ecgi serving;
  Pci pci;
  Ecgi nrt_ecgi;    // what the table maps the PCI to
  Ecgi other_ecgi;  // a different same-PCI cell detectable in coverage
};

// A PCI mapped in a serving cell's NRT is confusable when a different cell
// with the same PCI is detectable somewhere inside that serving cell's
// coverage at any of the query altitudes.
inline std::vector<ConfusionFinding> detect_pci_confusion(
    const Topology& topo, const NrtView& nrts, const PropagationParams& params,
    const std::vector<double>& altitudes_m, double grid_spacing_m = 25.0) {
  std::vector<ConfusionFinding> out;
  for (const auto& [serving_ecgi, relations] : nrts) {
    const CellRecord* serving = topo.find(serving_ecgi);
    if (!serving) throw ValidationError("detect_pci_confusion: unknown serving ecgi");
    for (const auto& [pci, mapped_ecgi] : relations) {
      for (const auto& other : topo.cells) {
        if (other.pci != pci || other.ecgi == mapped_ecgi || other.ecgi == serving_ecgi)
          continue;
        bool detectable = false;
        for (double alt : altitudes_m) {
          for (const Position& g : coverage_grid(topo.bounds, alt, grid_spacing_m)) {
            if (cell_covers(*serving, g, params) && cell_covers(other, g, params)) {
              detectable = true;
              break;
            }
          }
          if (detectable) break;
        }
        if (detectable) out.push_back({serving_ecgi, pci, mapped_ecgi, other.ecgi});
      }
    }
  }
  return out;
}

// Generated layout: macro cells on a grid (single-sector, aimed at the map
// centre), small cells uniform random. PCIs planned with assign_pcis.
struct TopologyGenConfig {
  Rect bounds{0.0, 0.0, 1000.0, 1000.0};
  int macro_count = 4;
  int small_count = 30;
  double macro_height_m = 25.0;
  double small_height_m = 10.0;
  double macro_tx_dbm = 43.0;
  double small_tx_dbm = 30.0;
  int macro_layer = 0;
  int small_layer = 1;
  AntennaConfig macro_antenna{0.0, 6.0, 8, 0.5, 15.0, 65.0};
  AntennaConfig small_antenna{0.0, 4.0, 4, 0.5, 5.0, 80.0};
  int pool_size = kNrPciPoolSize;
  int macro_pool_count = 168;  // PCIs [0, macro_pool_count) reserved for macros
  int small_pool_count = 840;
};

inline Topology generate_topology(const TopologyGenConfig& cfg, std::uint64_t seed) {
  Topology topo;
  topo.bounds = cfg.bounds;
  topo.pools.pool_size = cfg.pool_size;
  for (Pci p = 0; p < cfg.macro_pool_count; ++p) topo.pools.macro_set.insert(p);
  for (Pci p = cfg.macro_pool_count;
       p < cfg.macro_pool_count + cfg.small_pool_count && p < cfg.pool_size; ++p) {
    topo.pools.small_set.insert(p);
  }

  const double cx = (cfg.bounds.min_x + cfg.bounds.max_x) / 2.0;
  const double cy = (cfg.bounds.min_y + cfg.bounds.max_y) / 2.0;

  // Macro grid: as close to square as the count allows.
  int cols = 1;
  while (cols * cols < cfg.macro_count) ++cols;
  int rows = (cfg.macro_count + cols - 1) / cols;
  Ecgi next_ecgi = 1;
  for (int i = 0; i < cfg.macro_count; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    CellRecord cell;
    cell.ecgi = next_ecgi++;
    cell.tier = Tier::Macro;
    cell.position = {cfg.bounds.min_x + cfg.bounds.width() * (c + 0.5) / cols,
                     cfg.bounds.min_y + cfg.bounds.height() * (r + 0.5) / rows,
                     cfg.macro_height_m};
    cell.antenna = cfg.macro_antenna;
    cell.antenna.azimuth_deg = wrap_deg_360(
        rad2deg(std::atan2(cy - cell.position.y, cx - cell.position.x)));
    cell.freq_layer = cfg.macro_layer;
    cell.tx_power_dbm = cfg.macro_tx_dbm;
    topo.cells.push_back(cell);
  }

  Rng rng(derive_seed(seed, 0x746f706fULL));
  for (int i = 0; i < cfg.small_count; ++i) {
    CellRecord cell;
    cell.ecgi = next_ecgi++;
    cell.tier = Tier::Small;
    cell.position = {rng.uniform(cfg.bounds.min_x, cfg.bounds.max_x),
                     rng.uniform(cfg.bounds.min_y, cfg.bounds.max_y),
                     cfg.small_height_m};
    cell.antenna = cfg.small_antenna;
    cell.antenna.azimuth_deg = rng.uniform(0.0, 360.0);
    cell.freq_layer = cfg.small_layer;
    cell.tx_power_dbm = cfg.small_tx_dbm;
    topo.cells.push_back(cell);
  }

  apply_pci_assignment(topo, assign_pcis(topo, topo.pools));
  return topo;
}

}  // namespace uavmm
