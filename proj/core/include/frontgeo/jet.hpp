// SPDX-License-Identifier: Apache-2.0
//
// Truncated bivariate Taylor expansions ("jets") around a base point.
//
// A ScalarJet of order n stores the partial derivative values d^(i+j)f /
// du^i dv^j for i + j <= n in a dense triangular array. Storing derivative
// values (rather than monomial coefficients) makes derivative extraction a
// plain index shift; products pay for that with binomial weights.
//
// Every arithmetic operation truncates to the smallest operand order and
// requires matching base points. Division and square root require a
// non-vanishing constant term; division by the coordinate v requires a base
// point on the v = 0 axis and a vanishing j = 0 row.

#pragma once

#include <array>
#include <string>

#include "frontgeo/errors.hpp"
#include "frontgeo/linalg.hpp"

namespace frontgeo {

inline constexpr int kMaxJetOrder = 8;
inline constexpr int kJetCoeffCap = (kMaxJetOrder + 1) * (kMaxJetOrder + 2) / 2;

// Graded triangular layout: (i, j) with i + j = d precede total degree d + 1;
// within a degree, increasing j.
constexpr int jet_index(int i, int j) {
  const int d = i + j;
  return d * (d + 1) / 2 + j;
}
constexpr int jet_coeff_count(int order) { return (order + 1) * (order + 2) / 2; }

// Relative tolerance for the vanishing j = 0 row in divide_by_v.
inline constexpr double kDivideByVTol = 1e-9;

class ScalarJet {
 public:
  ScalarJet() = default;
  ScalarJet(Vec2 base, int order);

  static ScalarJet constant(double value, Vec2 base, int order);
  // The coordinate functions u and v as jets (value = base coordinate).
  static ScalarJet variable_u(Vec2 base, int order);
  static ScalarJet variable_v(Vec2 base, int order);

  Vec2 base() const { return base_; }
  void set_base(Vec2 b) { base_ = b; }
  int order() const { return order_; }

  // Partial derivative value d^(i+j)f / du^i dv^j at the base point.
  double d(int i, int j) const { return c_[jet_index(i, j)]; }
  double& at(int i, int j) { return c_[jet_index(i, j)]; }

  double value() const { return c_[0]; }
  double du_value() const { return d(1, 0); }
  double dv_value() const { return d(0, 1); }
  Vec2 gradient() const { return {d(1, 0), d(0, 1)}; }

  double max_abs_coeff() const;

  // Taylor evaluation at base + (du, dv).
  double eval(double du, double dv) const;

  ScalarJet truncated(int order) const;

  ScalarJet operator+(const ScalarJet& o) const;
  ScalarJet operator-(const ScalarJet& o) const;
  ScalarJet operator-() const;
  ScalarJet operator*(const ScalarJet& o) const;
  ScalarJet operator*(double s) const;
  ScalarJet operator+(double s) const;
  ScalarJet operator-(double s) const;
  // Requires |o.value()| > 0 ("non-unit divisor" otherwise).
  ScalarJet operator/(const ScalarJet& o) const;

  // Derivative jets; order drops by one.
  ScalarJet deriv_u() const;
  ScalarJet deriv_v() const;

  // Square root; requires a positive constant term.
  ScalarJet sqrt() const;

  // Exact division by the coordinate v at a base point on the axis.
  // The entire j = 0 row must vanish within tol * max_abs_coeff(); when
  // `drop_residual` is set the row is zeroed instead of rejected and the
  // dropped magnitude is reported through *residual.
  ScalarJet divide_by_v(double tol = kDivideByVTol, bool drop_residual = false,
                        double* residual = nullptr) const;

  friend ScalarJet operator*(double s, const ScalarJet& j) { return j * s; }

 private:
  void check_same(const ScalarJet& o) const;

  Vec2 base_{0, 0};
  int order_ = 0;
  std::array<double, kJetCoeffCap> c_{};
};

// Planar map jet (chart change of coordinates).
struct ChartJet {
  ScalarJet u_comp;
  ScalarJet v_comp;

  Vec2 base() const { return u_comp.base(); }
  int order() const { return u_comp.order(); }
  Vec2 value() const { return {u_comp.value(), v_comp.value()}; }
  // Linearization rows (du, dv) of each component at the base point.
  double jacobian_det() const {
    return u_comp.du_value() * v_comp.dv_value() - u_comp.dv_value() * v_comp.du_value();
  }

  static ChartJet identity(Vec2 base, int order);
};

// Space-curve style triple of jets sharing base and order.
struct Vec3Jet {
  ScalarJet x, y, z;

  Vec2 base() const { return x.base(); }
  int order() const { return x.order(); }
  Vec3 value() const { return {x.value(), y.value(), z.value()}; }
  Vec3 coeff(int i, int j) const { return {x.d(i, j), y.d(i, j), z.d(i, j)}; }
  double max_abs_coeff() const;

  Vec3Jet operator+(const Vec3Jet& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3Jet operator-(const Vec3Jet& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3Jet operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3Jet operator*(const ScalarJet& s) const { return {x * s, y * s, z * s}; }
  Vec3Jet operator-() const { return {-x, -y, -z}; }

  Vec3Jet deriv_u() const { return {x.deriv_u(), y.deriv_u(), z.deriv_u()}; }
  Vec3Jet deriv_v() const { return {x.deriv_v(), y.deriv_v(), z.deriv_v()}; }
  Vec3Jet truncated(int order) const {
    return {x.truncated(order), y.truncated(order), z.truncated(order)};
  }
  Vec3Jet divide_by_v(double tol = kDivideByVTol, bool drop_residual = false,
                      double* residual = nullptr) const;

  Vec3 eval(double du, double dv) const { return {x.eval(du, dv), y.eval(du, dv), z.eval(du, dv)}; }
};

ScalarJet dot(const Vec3Jet& a, const Vec3Jet& b);
Vec3Jet cross(const Vec3Jet& a, const Vec3Jet& b);
ScalarJet triple(const Vec3Jet& a, const Vec3Jet& b, const Vec3Jet& c);
ScalarJet norm2(const Vec3Jet& a);
// Unit-norm jet; requires a nonzero value ("frame collapse" otherwise).
Vec3Jet normalized(const Vec3Jet& a);

// Composition f(theta(.)): f's base must match theta's value within
// `base_tol` (absolute), otherwise "composition base mismatch".
ScalarJet compose(const ScalarJet& f, const ChartJet& theta, double base_tol = 1e-7);
Vec3Jet compose(const Vec3Jet& f, const ChartJet& theta, double base_tol = 1e-7);
ChartJet compose(const ChartJet& f, const ChartJet& theta, double base_tol = 1e-7);

// Keep only the (i, 0) coefficients: the jet of the v-constant extension of
// the restriction to the u-axis through the base point.
ScalarJet axis_extension(const ScalarJet& f);

// Relabel the base v-coordinate of a v-constant jet (no coefficient change).
ScalarJet vconst_rebase(const ScalarJet& f, double new_v0);

// Taylor-shift the jet to a new base point. Exact for the polynomial the jet
// represents; the result carries the same order (outer coefficients absorb
// truncation error when the underlying function is not polynomial).
ScalarJet recenter(const ScalarJet& f, Vec2 new_base);
Vec3Jet recenter(const Vec3Jet& f, Vec2 new_base);

}  // namespace frontgeo
