// SPDX-License-Identifier: Apache-2.0
#include "frontgeo/poly.hpp"

#include <algorithm>
#include <cmath>

namespace frontgeo {

Mat3 rotation(const Vec3& axis, double angle) {
  const double n = axis.norm();
  const Vec3 a = n > 0 ? axis * (1.0 / n) : Vec3{0, 0, 1};
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  Mat3 r;
  r.m = {t * a.x * a.x + c,       t * a.x * a.y - s * a.z, t * a.x * a.z + s * a.y,
         t * a.x * a.y + s * a.z, t * a.y * a.y + c,       t * a.y * a.z - s * a.x,
         t * a.x * a.z - s * a.y, t * a.y * a.z + s * a.x, t * a.z * a.z + c};
  return r;
}

bool solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
    if (std::fabs(a[piv * n + col]) < 1e-300) return false;
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
      std::swap(b[col], b[piv]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double sum = b[r];
    for (int k = r + 1; k < n; ++k) sum -= a[r * n + k] * b[k];
    b[r] = sum / a[r * n + r];
  }
  return true;
}

std::vector<double> polyfit_1d(const std::vector<double>& s, const std::vector<double>& y, int deg,
                               bool anchor_at_zero, double anchor) {
  const int m = anchor_at_zero ? deg : deg + 1;
  // Scale the abscissa to [-1, 1]-ish for conditioning.
  double w = 0.0;
  for (double sk : s) w = std::max(w, std::fabs(sk));
  if (w == 0.0) w = 1.0;
  std::vector<double> ata(m * m, 0.0), atb(m, 0.0);
  std::vector<double> basis(m);
  for (size_t k = 0; k < s.size(); ++k) {
    const double x = s[k] / w;
    double p = anchor_at_zero ? x : 1.0;
    for (int i = 0; i < m; ++i) {
      basis[i] = p;
      p *= x;
    }
    const double rhs = y[k] - (anchor_at_zero ? anchor : 0.0);
    for (int i = 0; i < m; ++i) {
      atb[i] += basis[i] * rhs;
      for (int j = 0; j < m; ++j) ata[i * m + j] += basis[i] * basis[j];
    }
  }
  if (!solve_dense(ata, atb, m)) return {};
  std::vector<double> c(deg + 1, 0.0);
  if (anchor_at_zero) {
    c[0] = anchor;
    for (int i = 0; i < m; ++i) c[i + 1] = atb[i] / std::pow(w, i + 1);
  } else {
    for (int i = 0; i < m; ++i) c[i] = atb[i] / std::pow(w, i);
  }
  return c;
}

double polyval_1d(const std::vector<double>& c, double s) {
  double r = 0.0;
  for (size_t i = c.size(); i-- > 0;) r = r * s + c[i];
  return r;
}

Poly2& Poly2::add_term(int i, int j, double coeff) {
  if (coeff == 0.0) return *this;
  for (auto& t : terms) {
    if (t.i == i && t.j == j) {
      t.c += coeff;
      return *this;
    }
  }
  terms.push_back({i, j, coeff});
  return *this;
}

double Poly2::coeff(int i, int j) const {
  for (const auto& t : terms)
    if (t.i == i && t.j == j) return t.c;
  return 0.0;
}

int Poly2::degree() const {
  int d = 0;
  for (const auto& t : terms)
    if (t.c != 0.0) d = std::max(d, t.i + t.j);
  return d;
}

double Poly2::eval(double u, double v) const {
  double sum = 0.0;
  for (const auto& t : terms) sum += t.c * std::pow(u, t.i) * std::pow(v, t.j);
  return sum;
}

Poly2 Poly2::operator+(const Poly2& o) const {
  Poly2 r = *this;
  for (const auto& t : o.terms) r.add_term(t.i, t.j, t.c);
  return r;
}

Poly2 Poly2::operator*(double s) const {
  Poly2 r = *this;
  for (auto& t : r.terms) t.c *= s;
  return r;
}

Poly2 Poly2::operator*(const Poly2& o) const {
  Poly2 r;
  for (const auto& a : terms)
    for (const auto& b : o.terms) r.add_term(a.i + b.i, a.j + b.j, a.c * b.c);
  return r;
}

Poly2 Poly2::deriv_u() const {
  Poly2 r;
  for (const auto& t : terms)
    if (t.i > 0) r.add_term(t.i - 1, t.j, t.c * t.i);
  return r;
}

Poly2 Poly2::deriv_v() const {
  Poly2 r;
  for (const auto& t : terms)
    if (t.j > 0) r.add_term(t.i, t.j - 1, t.c * t.j);
  return r;
}

Poly2 Poly2::divide_by_v() const {
  Poly2 r;
  for (const auto& t : terms) {
    if (t.j == 0) {
      if (t.c != 0.0) fail(Errc::not_divisible_by_v, "not divisible by v: polynomial has j = 0 terms");
      continue;
    }
    r.add_term(t.i, t.j - 1, t.c);
  }
  return r;
}

ScalarJet Poly2::jet_at(Vec2 base, int order) const {
  ScalarJet jet(base, order);
  for (const auto& t : terms) {
    for (int a = 0; a <= std::min(order, t.i); ++a) {
      // d^a/du^a u^i = i!/(i-a)! u^(i-a)
      double fu = 1.0;
      for (int k = 0; k < a; ++k) fu *= (t.i - k);
      const double pu = fu * std::pow(base.u, t.i - a);
      if (pu == 0.0 && t.i - a > 0 && base.u == 0.0) continue;
      for (int b = 0; b <= std::min(order - a, t.j); ++b) {
        double fv = 1.0;
        for (int k = 0; k < b; ++k) fv *= (t.j - k);
        const double pv = fv * std::pow(base.v, t.j - b);
        if (pv == 0.0 && t.j - b > 0 && base.v == 0.0) continue;
        jet.at(a, b) += t.c * pu * pv;
      }
    }
  }
  return jet;
}

Poly2 PolyMap3::component(int k) const {
  Poly2 r;
  for (const auto& t : terms) {
    const double c = k == 0 ? t.c.x : (k == 1 ? t.c.y : t.c.z);
    r.add_term(t.i, t.j, c);
  }
  return r;
}

PolyMap3& PolyMap3::add_term(int i, int j, const Vec3& coeff) {
  for (auto& t : terms) {
    if (t.i == i && t.j == j) {
      t.c = t.c + coeff;
      return *this;
    }
  }
  terms.push_back({i, j, coeff});
  return *this;
}

int PolyMap3::degree() const {
  int d = 0;
  for (const auto& t : terms)
    if (t.c.x != 0.0 || t.c.y != 0.0 || t.c.z != 0.0) d = std::max(d, t.i + t.j);
  return d;
}

Vec3 PolyMap3::eval(double u, double v) const {
  Vec3 sum;
  for (const auto& t : terms) sum = sum + t.c * (std::pow(u, t.i) * std::pow(v, t.j));
  return sum;
}

Vec3Jet PolyMap3::jet_at(Vec2 base, int order) const {
  return {component(0).jet_at(base, order), component(1).jet_at(base, order),
          component(2).jet_at(base, order)};
}

PolyMap3 PolyMap3::transformed(const Mat3& rot, const Vec3& shift) const {
  PolyMap3 r;
  for (const auto& t : terms) r.add_term(t.i, t.j, rot.apply(t.c));
  r.add_term(0, 0, shift);
  return r;
}

PolyMap3 PolyMap3::negated() const {
  PolyMap3 r;
  for (const auto& t : terms) r.add_term(t.i, t.j, -t.c);
  return r;
}

PolyMap3 from_components(const Poly2& x, const Poly2& y, const Poly2& z) {
  PolyMap3 r;
  for (const auto& t : x.terms) r.add_term(t.i, t.j, {t.c, 0, 0});
  for (const auto& t : y.terms) r.add_term(t.i, t.j, {0, t.c, 0});
  for (const auto& t : z.terms) r.add_term(t.i, t.j, {0, 0, t.c});
  return r;
}

PolyMap3 cross(const PolyMap3& a, const PolyMap3& b) {
  const Poly2 ax = a.component(0), ay = a.component(1), az = a.component(2);
  const Poly2 bx = b.component(0), by = b.component(1), bz = b.component(2);
  return from_components(ay * bz + az * by * -1.0, az * bx + ax * bz * -1.0,
                         ax * by + ay * bx * -1.0);
}

}  // namespace frontgeo
