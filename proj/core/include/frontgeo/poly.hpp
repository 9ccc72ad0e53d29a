// SPDX-License-Identifier: Apache-2.0
//
// Sparse bivariate polynomials with monomial coefficients. These carry the
// input surface data; jets extracted from them at any base point are exact.

#pragma once

#include <vector>

#include "frontgeo/jet.hpp"
#include "frontgeo/linalg.hpp"

namespace frontgeo {

struct Poly2 {
  struct Term {
    int i = 0;
    int j = 0;
    double c = 0.0;
  };
  std::vector<Term> terms;

  Poly2& add_term(int i, int j, double coeff);
  double coeff(int i, int j) const;
  int degree() const;
  double eval(double u, double v) const;

  Poly2 operator+(const Poly2& o) const;
  Poly2 operator*(double s) const;
  Poly2 operator*(const Poly2& o) const;
  Poly2 deriv_u() const;
  Poly2 deriv_v() const;
  // Exact division; requires no j = 0 terms.
  Poly2 divide_by_v() const;

  ScalarJet jet_at(Vec2 base, int order) const;
};

struct PolyMap3 {
  struct Term {
    int i = 0;
    int j = 0;
    Vec3 c;
  };
  std::vector<Term> terms;

  PolyMap3& add_term(int i, int j, const Vec3& coeff);
  Poly2 component(int k) const;
  int degree() const;
  Vec3 eval(double u, double v) const;
  Vec3Jet jet_at(Vec2 base, int order) const;

  // Rigid motion in the target: p -> rot * p + shift, applied coefficientwise.
  PolyMap3 transformed(const Mat3& rot, const Vec3& shift) const;
  PolyMap3 negated() const;
};

PolyMap3 from_components(const Poly2& x, const Poly2& y, const Poly2& z);
PolyMap3 cross(const PolyMap3& a, const PolyMap3& b);

}  // namespace frontgeo
