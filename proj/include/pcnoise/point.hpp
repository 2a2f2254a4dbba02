#pragma once

#include <cmath>
#include <vector>

namespace pcnoise {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;

  Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Point3& operator-=(const Point3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
};

inline Point3 operator+(Point3 a, const Point3& b) { return a += b; }
inline Point3 operator-(Point3 a, const Point3& b) { return a -= b; }
inline Point3 operator*(double s, const Point3& p) {
  return {s * p.x, s * p.y, s * p.z};
}
inline Point3 operator-(const Point3& p) { return {-p.x, -p.y, -p.z}; }

inline double dot(const Point3& a, const Point3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}

inline double squared_norm(const Point3& p) { return dot(p, p); }
inline double norm(const Point3& p) { return std::hypot(p.x, p.y, p.z); }

inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

using PointCloud = std::vector<Point3>;

struct SensorPose {
  Point3 position;
};

// Axis-aligned box, lo <= hi componentwise.
struct BoundingBox {
  Point3 lo;
  Point3 hi;

  bool contains(const Point3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
           p.z >= lo.z && p.z <= hi.z;
  }
};

// Tight axis-aligned bounds of a nonempty cloud.
BoundingBox bounding_box(const PointCloud& cloud);

}  // namespace pcnoise
