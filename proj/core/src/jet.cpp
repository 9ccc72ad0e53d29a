// SPDX-License-Identifier: Apache-2.0
#include "frontgeo/jet.hpp"

#include <algorithm>
#include <cmath>

namespace frontgeo {

namespace {

struct BinomialTable {
  // C(n, k) for n, k <= kMaxJetOrder.
  double c[kMaxJetOrder + 1][kMaxJetOrder + 1] = {};
  constexpr BinomialTable() {
    for (int n = 0; n <= kMaxJetOrder; ++n) {
      c[n][0] = 1.0;
      for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0.0);
    }
  }
};
constexpr BinomialTable kBinom{};

inline double binom(int n, int k) { return kBinom.c[n][k]; }

constexpr double kFactorial[kMaxJetOrder + 1] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) fail(Errc::jet_mismatch, "jet mismatch: order out of range");
}

}  // namespace

ScalarJet::ScalarJet(Vec2 base, int order) : base_(base), order_(order) { check_order(order); }

ScalarJet ScalarJet::constant(double value, Vec2 base, int order) {
  ScalarJet j(base, order);
  j.c_[0] = value;
  return j;
}

ScalarJet ScalarJet::variable_u(Vec2 base, int order) {
  ScalarJet j(base, order);
  j.c_[0] = base.u;
  if (order >= 1) j.at(1, 0) = 1.0;
  return j;
}

ScalarJet ScalarJet::variable_v(Vec2 base, int order) {
  ScalarJet j(base, order);
  j.c_[0] = base.v;
  if (order >= 1) j.at(0, 1) = 1.0;
  return j;
}

double ScalarJet::max_abs_coeff() const {
  double m = 0.0;
  for (int k = 0; k < jet_coeff_count(order_); ++k) m = std::max(m, std::fabs(c_[k]));
  return m;
}

double ScalarJet::eval(double du, double dv) const {
  // Powers of the offset, then triangular accumulation with 1/(i! j!).
  double pu[kMaxJetOrder + 1], pv[kMaxJetOrder + 1];
  pu[0] = pv[0] = 1.0;
  for (int k = 1; k <= order_; ++k) {
    pu[k] = pu[k - 1] * du;
    pv[k] = pv[k - 1] * dv;
  }
  double sum = 0.0;
  for (int d = order_; d >= 0; --d)
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      sum += c_[jet_index(i, j)] / (kFactorial[i] * kFactorial[j]) * pu[i] * pv[j];
    }
  return sum;
}

ScalarJet ScalarJet::truncated(int order) const {
  check_order(order);
  if (order > order_) fail(Errc::jet_mismatch, "jet mismatch: cannot extend order by truncation");
  ScalarJet r(base_, order);
  std::copy_n(c_.begin(), jet_coeff_count(order), r.c_.begin());
  return r;
}

void ScalarJet::check_same(const ScalarJet& o) const {
  const double tol = 1e-12 * (1.0 + std::fabs(base_.u) + std::fabs(base_.v));
  if (std::fabs(base_.u - o.base_.u) > tol || std::fabs(base_.v - o.base_.v) > tol)
    fail(Errc::jet_mismatch, "jet mismatch: different base points");
}

ScalarJet ScalarJet::operator+(const ScalarJet& o) const {
  check_same(o);
  ScalarJet r(base_, std::min(order_, o.order_));
  for (int k = 0; k < jet_coeff_count(r.order_); ++k) r.c_[k] = c_[k] + o.c_[k];
  return r;
}

ScalarJet ScalarJet::operator-(const ScalarJet& o) const {
  check_same(o);
  ScalarJet r(base_, std::min(order_, o.order_));
  for (int k = 0; k < jet_coeff_count(r.order_); ++k) r.c_[k] = c_[k] - o.c_[k];
  return r;
}

ScalarJet ScalarJet::operator-() const {
  ScalarJet r(base_, order_);
  for (int k = 0; k < jet_coeff_count(order_); ++k) r.c_[k] = -c_[k];
  return r;
}

ScalarJet ScalarJet::operator*(double s) const {
  ScalarJet r(base_, order_);
  for (int k = 0; k < jet_coeff_count(order_); ++k) r.c_[k] = c_[k] * s;
  return r;
}

ScalarJet ScalarJet::operator+(double s) const {
  ScalarJet r = *this;
  r.c_[0] += s;
  return r;
}

ScalarJet ScalarJet::operator-(double s) const { return *this + (-s); }

ScalarJet ScalarJet::operator*(const ScalarJet& o) const {
  check_same(o);
  const int n = std::min(order_, o.order_);
  ScalarJet r(base_, n);
  // Leibniz rule on derivative values.
  for (int d = 0; d <= n; ++d)
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      double sum = 0.0;
      for (int p = 0; p <= i; ++p)
        for (int q = 0; q <= j; ++q)
          sum += binom(i, p) * binom(j, q) * c_[jet_index(p, q)] * o.c_[jet_index(i - p, j - q)];
      r.at(i, j) = sum;
    }
  return r;
}

ScalarJet ScalarJet::operator/(const ScalarJet& o) const {
  check_same(o);
  const int n = std::min(order_, o.order_);
  const double b0 = o.value();
  if (std::fabs(b0) <= 1e-300 || std::fabs(b0) < 1e-14 * o.max_abs_coeff())
    fail(Errc::non_unit_divisor, "non-unit divisor");
  ScalarJet q(base_, n);
  // Graded recurrence: every Leibniz term for (q*o) except (p, r) = (i, j)
  // involves strictly smaller total degree of q.
  for (int d = 0; d <= n; ++d)
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      double sum = 0.0;
      for (int p = 0; p <= i; ++p)
        for (int r = 0; r <= j; ++r) {
          if (p == i && r == j) continue;
          sum += binom(i, p) * binom(j, r) * q.d(p, r) * o.c_[jet_index(i - p, j - r)];
        }
      q.at(i, j) = (c_[jet_index(i, j)] - sum) / b0;
    }
  return q;
}

ScalarJet ScalarJet::deriv_u() const {
  if (order_ == 0) fail(Errc::jet_mismatch, "jet mismatch: derivative of order-0 jet");
  ScalarJet r(base_, order_ - 1);
  for (int d = 0; d < order_; ++d)
    for (int j = 0; j <= d; ++j) r.at(d - j, j) = c_[jet_index(d - j + 1, j)];
  return r;
}

ScalarJet ScalarJet::deriv_v() const {
  if (order_ == 0) fail(Errc::jet_mismatch, "jet mismatch: derivative of order-0 jet");
  ScalarJet r(base_, order_ - 1);
  for (int d = 0; d < order_; ++d)
    for (int j = 0; j <= d; ++j) r.at(d - j, j) = c_[jet_index(d - j, j + 1)];
  return r;
}

ScalarJet ScalarJet::sqrt() const {
  const double a0 = value();
  if (!(a0 > 0.0) || a0 < 1e-14 * max_abs_coeff())
    fail(Errc::non_unit_divisor, "non-unit divisor: sqrt needs positive constant term");
  ScalarJet s(base_, order_);
  s.at(0, 0) = std::sqrt(a0);
  const double inv = 1.0 / (2.0 * s.value());
  for (int d = 1; d <= order_; ++d)
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      double sum = 0.0;
      for (int p = 0; p <= i; ++p)
        for (int q = 0; q <= j; ++q) {
          if ((p == 0 && q == 0) || (p == i && q == j)) continue;
          sum += binom(i, p) * binom(j, q) * s.d(p, q) * s.d(i - p, j - q);
        }
      s.at(i, j) = (c_[jet_index(i, j)] - sum) * inv;
    }
  return s;
}

ScalarJet ScalarJet::divide_by_v(double tol, bool drop_residual, double* residual) const {
  if (order_ == 0) fail(Errc::not_divisible_by_v, "not divisible by v: order-0 jet");
  if (std::fabs(base_.v) > 1e-9 * (1.0 + std::fabs(base_.u)))
    fail(Errc::not_divisible_by_v, "not divisible by v: base point off the axis");
  const double scale = std::max(max_abs_coeff(), 1e-300);
  double rowmax = 0.0;
  for (int i = 0; i <= order_; ++i) rowmax = std::max(rowmax, std::fabs(c_[jet_index(i, 0)]));
  if (residual) *residual = rowmax / scale;
  if (rowmax > tol * scale && !drop_residual)
    fail(Errc::not_divisible_by_v, "not divisible by v");
  // a = v * b on the axis gives a_(i,j) = j * b_(i,j-1).
  ScalarJet b(base_, order_ - 1);
  for (int d = 1; d <= order_; ++d)
    for (int j = 1; j <= d; ++j) b.at(d - j, j - 1) = c_[jet_index(d - j, j)] / j;
  return b;
}

ChartJet ChartJet::identity(Vec2 base, int order) {
  return {ScalarJet::variable_u(base, order), ScalarJet::variable_v(base, order)};
}

double Vec3Jet::max_abs_coeff() const {
  return std::max({x.max_abs_coeff(), y.max_abs_coeff(), z.max_abs_coeff()});
}

Vec3Jet Vec3Jet::divide_by_v(double tol, bool drop_residual, double* residual) const {
  // Normalize the row check across components.
  const double scale = std::max(max_abs_coeff(), 1e-300);
  double worst = 0.0;
  Vec3Jet out;
  const ScalarJet* in[3] = {&x, &y, &z};
  ScalarJet* o[3] = {&out.x, &out.y, &out.z};
  for (int k = 0; k < 3; ++k) {
    double rowmax = 0.0;
    for (int i = 0; i <= in[k]->order(); ++i) rowmax = std::max(rowmax, std::fabs(in[k]->d(i, 0)));
    worst = std::max(worst, rowmax / scale);
    if (rowmax > tol * scale && !drop_residual)
      fail(Errc::not_divisible_by_v, "not divisible by v");
    *o[k] = in[k]->divide_by_v(tol, true, nullptr);
  }
  if (residual) *residual = worst;
  return out;
}

ScalarJet dot(const Vec3Jet& a, const Vec3Jet& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3Jet cross(const Vec3Jet& a, const Vec3Jet& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

ScalarJet triple(const Vec3Jet& a, const Vec3Jet& b, const Vec3Jet& c) {
  return dot(a, cross(b, c));
}

ScalarJet norm2(const Vec3Jet& a) { return dot(a, a); }

Vec3Jet normalized(const Vec3Jet& a) {
  ScalarJet n2 = norm2(a);
  if (!(n2.value() > 0.0) || n2.value() < 1e-20 * std::max(n2.max_abs_coeff(), 1e-300))
    fail(Errc::frame_collapse, "frame collapse: cannot normalize vanishing vector");
  ScalarJet n = n2.sqrt();
  return {a.x / n, a.y / n, a.z / n};
}

namespace {

// Shared composition core: accumulate sum f_mono(i,j) * dX^i * dY^j.
ScalarJet compose_impl(const ScalarJet& f, const ChartJet& theta, double base_tol) {
  const Vec2 val = theta.value();
  const Vec2 fb = f.base();
  if (std::fabs(val.u - fb.u) > base_tol * (1.0 + std::fabs(fb.u)) ||
      std::fabs(val.v - fb.v) > base_tol * (1.0 + std::fabs(fb.v)))
    fail(Errc::compose_base_mismatch, "composition base mismatch");
  const int n = std::min(f.order(), theta.order());
  const Vec2 q = theta.base();

  ScalarJet dX = theta.u_comp.truncated(n);
  dX.at(0, 0) = 0.0;
  ScalarJet dY = theta.v_comp.truncated(n);
  dY.at(0, 0) = 0.0;

  // Powers up to n; dX^0 = 1.
  std::array<ScalarJet, kMaxJetOrder + 1> pu, pv;
  pu[0] = ScalarJet::constant(1.0, q, n);
  pv[0] = pu[0];
  for (int k = 1; k <= n; ++k) {
    pu[k] = pu[k - 1] * dX;
    pv[k] = pv[k - 1] * dY;
  }

  ScalarJet r = ScalarJet::constant(0.0, q, n);
  for (int d = 0; d <= n; ++d)
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      const double mono = f.d(i, j) / (kFactorial[i] * kFactorial[j]);
      if (mono == 0.0) continue;
      r = r + pu[i] * pv[j] * mono;
    }
  return r;
}

}  // namespace

ScalarJet compose(const ScalarJet& f, const ChartJet& theta, double base_tol) {
  return compose_impl(f, theta, base_tol);
}

Vec3Jet compose(const Vec3Jet& f, const ChartJet& theta, double base_tol) {
  return {compose_impl(f.x, theta, base_tol), compose_impl(f.y, theta, base_tol),
          compose_impl(f.z, theta, base_tol)};
}

ChartJet compose(const ChartJet& f, const ChartJet& theta, double base_tol) {
  return {compose_impl(f.u_comp, theta, base_tol), compose_impl(f.v_comp, theta, base_tol)};
}

ScalarJet axis_extension(const ScalarJet& f) {
  ScalarJet r = ScalarJet::constant(0.0, f.base(), f.order());
  for (int i = 0; i <= f.order(); ++i) r.at(i, 0) = f.d(i, 0);
  return r;
}

ScalarJet vconst_rebase(const ScalarJet& f, double new_v0) {
  ScalarJet r = f;
  r.set_base({f.base().u, new_v0});
  return r;
}

ScalarJet recenter(const ScalarJet& f, Vec2 new_base) {
  const int n = f.order();
  const double du = new_base.u - f.base().u;
  const double dv = new_base.v - f.base().v;
  ScalarJet r = ScalarJet::constant(0.0, new_base, n);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      double acc = 0.0;
      for (int p = i; p <= n; ++p)
        for (int q = j; p + q <= n; ++q) {
          const double c = f.d(p, q);
          if (c == 0.0) continue;
          acc += c / (kFactorial[p - i] * kFactorial[q - j]) *
                 std::pow(du, p - i) * std::pow(dv, q - j);
        }
      r.at(i, j) = acc;
    }
  return r;
}

Vec3Jet recenter(const Vec3Jet& f, Vec2 new_base) {
  return {recenter(f.x, new_base), recenter(f.y, new_base), recenter(f.z, new_base)};
}

}  // namespace frontgeo
