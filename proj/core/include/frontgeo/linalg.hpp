// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace frontgeo {

struct Vec2 {
  double u = 0.0;
  double v = 0.0;

  Vec2() = default;
  Vec2(double uu, double vv) : u(uu), v(vv) {}

  Vec2 operator+(const Vec2& o) const { return {u + o.u, v + o.v}; }
  Vec2 operator-(const Vec2& o) const { return {u - o.u, v - o.v}; }
  Vec2 operator*(double s) const { return {u * s, v * s}; }
  Vec2 operator-() const { return {-u, -v}; }
  double norm() const { return std::hypot(u, v); }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.u * b.u + a.v * b.v; }
// Signed area of the pair; positive when b lies counterclockwise from a.
inline double det(const Vec2& a, const Vec2& b) { return a.u * b.v - a.v * b.u; }
// +90 degree rotation.
inline Vec2 perp(const Vec2& a) { return {-a.v, a.u}; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double xx, double yy, double zz) : x(xx), y(yy), z(zz) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double triple(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

struct Mat3 {
  // Row-major rotation/linear map.
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  Vec3 apply(const Vec3& p) const {
    return {m[0] * p.x + m[1] * p.y + m[2] * p.z, m[3] * p.x + m[4] * p.y + m[5] * p.z,
            m[6] * p.x + m[7] * p.y + m[8] * p.z};
  }
};

// Rotation about a (not necessarily unit) axis by `angle` radians.
Mat3 rotation(const Vec3& axis, double angle);

// Dense Gaussian elimination with partial pivoting for small systems.
// Returns false when the matrix is numerically singular.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, int n);

// Least-squares polynomial fit: data (s_k, y_k), monomial degree <= deg,
// optional hard interpolation constraint y(0) = anchor (drops the constant
// term and fits the remainder). Returns monomial coefficients c[0..deg].
std::vector<double> polyfit_1d(const std::vector<double>& s, const std::vector<double>& y, int deg,
                               bool anchor_at_zero, double anchor);

double polyval_1d(const std::vector<double>& c, double s);

}  // namespace frontgeo
