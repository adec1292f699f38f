#pragma once

#include <cmath>
#include <stdexcept>

namespace uavmm {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
  double z = 0.0;  // altitude above ground, >= 0

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline bool operator==(const Position& a, const Position& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};

inline double distance_2d(const Position& a, const Position& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

inline double distance_3d(const Position& a, const Position& b) {
  return std::hypot(b.x - a.x, b.y - a.y, b.z - a.z);
}

// Wraps an angle difference into (-180, 180].
inline double wrap_deg_180(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

// Wraps an absolute bearing into [0, 360).
inline double wrap_deg_360(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0.0) d += 360.0;
  return d;
}

struct RayAngles {
  double elevation_deg;  // positive above horizontal
  double azimuth_deg;    // CCW from +x, [0, 360)
};

// Angles of the ray from `from` toward `to`. Throws on coincident points,
// the elevation is undefined there.
inline RayAngles ray_angles(const Position& from, const Position& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double dz = to.z - from.z;
  const double dh = std::hypot(dx, dy);
  if (dh == 0.0 && dz == 0.0) {
    throw std::domain_error("ray_angles: coincident positions");
  }
  RayAngles out;
  out.elevation_deg = rad2deg(std::atan2(dz, dh));
  out.azimuth_deg = (dh == 0.0) ? 0.0 : wrap_deg_360(rad2deg(std::atan2(dy, dx)));
  return out;
}

}  // namespace uavmm
