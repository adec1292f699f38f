#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "uavmm/core.hpp"
#include "uavmm/geometry.hpp"
#include "uavmm/rng.hpp"

namespace uavmm {

struct FixedPath {
  std::vector<Position> waypoints;
  double speed_mps = 10.0;
  bool loop = false;
};

struct RandomWaypoint2D {
  Rect bounds;
  double speed_min_mps = 0.5;
  double speed_max_mps = 1.5;
  double pause_s = 0.0;
  double z_fixed = 1.5;
};

using MobilityModel = std::variant<FixedPath, RandomWaypoint2D>;

struct UeKinematics {
  Position position;
  std::array<double, 3> velocity{0.0, 0.0, 0.0};
  std::size_t waypoint_index = 0;  // next fixed-path target
  // random-waypoint bookkeeping
  Position rw_target;
  bool rw_moving = false;
  double rw_speed = 0.0;
  double pause_remaining_s = 0.0;
};

inline UeKinematics init_kinematics(const MobilityModel& model, Rng& rng) {
  UeKinematics kin;
  if (const auto* fp = std::get_if<FixedPath>(&model)) {
    if (fp->waypoints.empty()) throw ValidationError("fixed path has no waypoints");
    kin.position = fp->waypoints.front();
    kin.waypoint_index = fp->waypoints.size() > 1 ? 1 : 0;
  } else {
    const auto& rw = std::get<RandomWaypoint2D>(model);
    kin.position = {rng.uniform(rw.bounds.min_x, rw.bounds.max_x),
                    rng.uniform(rw.bounds.min_y, rw.bounds.max_y), rw.z_fixed};
  }
  return kin;
}

namespace detail {

inline void set_velocity_toward(UeKinematics& kin, const Position& target, double speed) {
  const double d = distance_3d(kin.position, target);
  if (d <= 0.0) {
    kin.velocity = {0.0, 0.0, 0.0};
    return;
  }
  kin.velocity = {speed * (target.x - kin.position.x) / d,
                  speed * (target.y - kin.position.y) / d,
                  speed * (target.z - kin.position.z) / d};
}

inline void step_fixed_path(UeKinematics& kin, const FixedPath& fp, double dt) {
  double budget = fp.speed_mps * dt;
  while (budget > 0.0) {
    if (kin.waypoint_index >= fp.waypoints.size()) {
      kin.velocity = {0.0, 0.0, 0.0};
      return;  // parked at the final waypoint
    }
    const Position& target = fp.waypoints[kin.waypoint_index];
    const double d = distance_3d(kin.position, target);
    if (budget < d) {
      set_velocity_toward(kin, target, fp.speed_mps);
      kin.position.x += kin.velocity[0] * (budget / fp.speed_mps);
      kin.position.y += kin.velocity[1] * (budget / fp.speed_mps);
      kin.position.z += kin.velocity[2] * (budget / fp.speed_mps);
      return;
    }
    // Split exactly at the waypoint, spend the rest on the next segment.
    kin.position = target;
    budget -= d;
    if (kin.waypoint_index + 1 < fp.waypoints.size()) {
      ++kin.waypoint_index;
    } else if (fp.loop) {
      kin.waypoint_index = 0;
    } else {
      kin.velocity = {0.0, 0.0, 0.0};
      kin.waypoint_index = fp.waypoints.size();
      return;
    }
  }
}

inline void step_random_waypoint(UeKinematics& kin, const RandomWaypoint2D& rw, double dt,
                                 Rng& rng) {
  double remaining = dt;
  while (remaining > 1e-12) {
    if (kin.pause_remaining_s > 0.0) {
      const double used = std::min(kin.pause_remaining_s, remaining);
      kin.pause_remaining_s -= used;
      remaining -= used;
      kin.velocity = {0.0, 0.0, 0.0};
      continue;
    }
    if (!kin.rw_moving) {
      kin.rw_target = {rng.uniform(rw.bounds.min_x, rw.bounds.max_x),
                       rng.uniform(rw.bounds.min_y, rw.bounds.max_y), rw.z_fixed};
      kin.rw_speed = rng.uniform(rw.speed_min_mps, rw.speed_max_mps);
      kin.rw_moving = true;
    }
    const double d = distance_3d(kin.position, kin.rw_target);
    const double reachable = kin.rw_speed * remaining;
    if (reachable < d) {
      set_velocity_toward(kin, kin.rw_target, kin.rw_speed);
      kin.position.x += kin.velocity[0] * remaining;
      kin.position.y += kin.velocity[1] * remaining;
      kin.position.z += kin.velocity[2] * remaining;
      return;
    }
    kin.position = kin.rw_target;
    remaining -= (kin.rw_speed > 0.0) ? d / kin.rw_speed : remaining;
    kin.rw_moving = false;
    kin.pause_remaining_s = rw.pause_s;
  }
}

}  // namespace detail

inline void step_position(UeKinematics& kin, const MobilityModel& model, double dt,
                          Rng& rng) {
  if (dt <= 0.0) throw std::invalid_argument("step_position: dt must be > 0");
  if (const auto* fp = std::get_if<FixedPath>(&model)) {
    if (fp->waypoints.empty()) throw ValidationError("fixed path has no waypoints");
    detail::step_fixed_path(kin, *fp, dt);
  } else {
    detail::step_random_waypoint(kin, std::get<RandomWaypoint2D>(model), dt, rng);
  }
}

// Parallel-transect sweep over the bounds at constant altitude, the flight
// protocol behind the per-altitude metric runs.
inline FixedPath lawnmower_path(const Rect& bounds, double transect_spacing_m,
                                double altitude_m, double speed_mps, double margin_m,
                                bool loop) {
  if (transect_spacing_m <= 0.0) throw ValidationError("lawnmower: spacing must be > 0");
  FixedPath path;
  path.speed_mps = speed_mps;
  path.loop = loop;
  const double x0 = bounds.min_x + margin_m;
  const double x1 = bounds.max_x - margin_m;
  const double y0 = bounds.min_y + margin_m;
  const double y1 = bounds.max_y - margin_m;
  if (x1 <= x0 || y1 <= y0) throw ValidationError("lawnmower: margin exceeds bounds");
  bool left_to_right = true;
  for (double y = y0; y <= y1 + 1e-9; y += transect_spacing_m) {
    const double xa = left_to_right ? x0 : x1;
    const double xb = left_to_right ? x1 : x0;
    path.waypoints.push_back({xa, y, altitude_m});
    path.waypoints.push_back({xb, y, altitude_m});
    left_to_right = !left_to_right;
  }
  return path;
}

}  // namespace uavmm
