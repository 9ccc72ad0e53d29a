// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "frontgeo/jet.hpp"
#include "frontgeo/poly.hpp"
#include "support/numdiff.hpp"
#include "support/oracle.hpp"

using namespace frontgeo;
using fgtest::IndepPoly;

namespace {

Poly2 to_poly2(const IndepPoly& p) {
  Poly2 r;
  for (const auto& t : p.terms) r.add_term(t.i, t.j, t.c);
  return r;
}

void check_jet_matches(const ScalarJet& jet, const IndepPoly& p, Vec2 base, double tol) {
  for (int i = 0; i <= jet.order(); ++i)
    for (int j = 0; i + j <= jet.order(); ++j) {
      const double want = p.deriv(i, j, base.u, base.v);
      CHECK(jet.d(i, j) == doctest::Approx(want).epsilon(tol).scale(1.0 + std::abs(want)));
    }
}

}  // namespace

TEST_CASE("polynomial jets reproduce exact derivative values") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const IndepPoly p = fgtest::random_poly(rng, 4);
    const Vec2 base{0.37, -0.21};
    check_jet_matches(to_poly2(p).jet_at(base, 6), p, base, 1e-12);
  }
}

TEST_CASE("jet ring operations match operations on polynomials") {
  std::mt19937 rng(12);
  const Vec2 base{0.5, 0.25};
  for (int trial = 0; trial < 10; ++trial) {
    const IndepPoly p = fgtest::random_poly(rng, 3);
    const IndepPoly q = fgtest::random_poly(rng, 3);
    const ScalarJet jp = to_poly2(p).jet_at(base, 6);
    const ScalarJet jq = to_poly2(q).jet_at(base, 6);

    check_jet_matches(jp + jq, p.plus(q), base, 1e-12);
    check_jet_matches(jp * jq, p.times(q), base, 1e-11);

    // Division undoes multiplication where the divisor does not vanish.
    if (std::abs(jq.value()) > 0.1) {
      const ScalarJet ratio = (jp * jq) / jq;
      check_jet_matches(ratio, p, base, 1e-8);
    }

    // sqrt undoes squaring for positive values.
    if (jp.value() > 0.1) {
      check_jet_matches((jp * jp).sqrt(), p, base, 1e-8);
    }
  }
}

TEST_CASE("derivative jets shift indices") {
  std::mt19937 rng(13);
  const IndepPoly p = fgtest::random_poly(rng, 4);
  const Vec2 base{-0.4, 0.15};
  const ScalarJet j = to_poly2(p).jet_at(base, 6);
  const ScalarJet ju = j.deriv_u();
  const ScalarJet jv = j.deriv_v();
  CHECK(ju.order() == 5);
  for (int i = 0; i <= 5; ++i)
    for (int jj = 0; i + jj <= 5; ++jj) {
      CHECK(ju.d(i, jj) == doctest::Approx(j.d(i + 1, jj)));
      CHECK(jv.d(i, jj) == doctest::Approx(j.d(i, jj + 1)));
    }
}

TEST_CASE("taylor evaluation reproduces the polynomial") {
  std::mt19937 rng(14);
  const IndepPoly p = fgtest::random_poly(rng, 4);
  const Vec2 base{0.2, 0.1};
  const ScalarJet j = to_poly2(p).jet_at(base, 6);
  for (double du : {-0.3, 0.0, 0.17})
    for (double dv : {-0.05, 0.22}) {
      const double want = p.eval(base.u + du, base.v + dv);
      CHECK(j.eval(du, dv) == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("composition matches finite differences of the composite map") {
  std::mt19937 rng(15);
  const IndepPoly p = fgtest::random_poly(rng, 3);
  // A mildly nonlinear chart.
  IndepPoly t1, t2;
  t1.add(1, 0, 1.0).add(0, 1, 0.4).add(2, 0, 0.3).add(1, 1, -0.2);
  t2.add(0, 1, 1.0).add(1, 0, -0.3).add(0, 2, 0.25).add(2, 0, 0.1);

  const Vec2 base{0.12, -0.08};
  const Vec2 image{t1.eval(base.u, base.v), t2.eval(base.u, base.v)};
  const ChartJet theta{to_poly2(t1).jet_at(base, 6), to_poly2(t2).jet_at(base, 6)};
  const ScalarJet f_at_image = to_poly2(p).jet_at(image, 6);
  const ScalarJet composed = compose(f_at_image, theta);

  const auto direct = [&](double u, double v) {
    return p.eval(t1.eval(u, v), t2.eval(u, v));
  };
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) {
      const double want = fgtest::fd_partial_rich(direct, base.u, base.v, i, j);
      CHECK(composed.d(i, j) ==
            doctest::Approx(want).epsilon(1e-6).scale(1.0 + std::abs(want)));
    }
}

TEST_CASE("divide_by_v inverts multiplication by v") {
  std::mt19937 rng(16);
  const IndepPoly r = fgtest::random_poly(rng, 3);
  IndepPoly v;
  v.add(0, 1, 1.0);
  const IndepPoly p = v.times(r);
  const Vec2 base{0.3, 0.0};  // base must sit on the axis
  const ScalarJet jp = to_poly2(p).jet_at(base, 6);
  check_jet_matches(jp.divide_by_v(), r, base, 1e-11);
}

TEST_CASE("divide_by_v rejects non-divisible jets and off-axis bases") {
  IndepPoly p;
  p.add(0, 0, 1.0).add(0, 1, 2.0);
  CHECK_THROWS_AS((void)to_poly2(p).jet_at({0.0, 0.0}, 4).divide_by_v(), Error);
  IndepPoly q;
  q.add(0, 1, 1.0);
  CHECK_THROWS_AS((void)to_poly2(q).jet_at({0.0, 0.5}, 4).divide_by_v(), Error);
}

TEST_CASE("recenter performs an exact taylor shift for polynomials") {
  std::mt19937 rng(17);
  const IndepPoly p = fgtest::random_poly(rng, 4);
  const Vec2 b1{0.1, -0.2}, b2{0.35, 0.05};
  const ScalarJet moved = recenter(to_poly2(p).jet_at(b1, 6), b2);
  check_jet_matches(moved, p, b2, 1e-10);
}

TEST_CASE("axis_extension and vconst_rebase manage v-constant jets") {
  std::mt19937 rng(18);
  const IndepPoly p = fgtest::random_poly(rng, 4);
  const Vec2 base{0.4, 0.0};
  const ScalarJet j = to_poly2(p).jet_at(base, 5);
  const ScalarJet ax = axis_extension(j);
  for (int i = 0; i <= 5; ++i) CHECK(ax.d(i, 0) == doctest::Approx(j.d(i, 0)));
  for (int i = 0; i <= 4; ++i)
    for (int jj = 1; i + jj <= 5; ++jj) CHECK(ax.d(i, jj) == 0.0);

  const ScalarJet moved = vconst_rebase(ax, 0.7);
  CHECK(moved.base().v == doctest::Approx(0.7));
  CHECK(moved.base().u == doctest::Approx(base.u));
  for (int i = 0; i <= 5; ++i) CHECK(moved.d(i, 0) == doctest::Approx(ax.d(i, 0)));
}

TEST_CASE("base point mismatches are rejected") {
  IndepPoly p;
  p.add(1, 0, 1.0);
  const ScalarJet a = to_poly2(p).jet_at({0.0, 0.0}, 3);
  const ScalarJet b = to_poly2(p).jet_at({0.1, 0.0}, 3);
  CHECK_THROWS_AS((void)(a + b), Error);
  CHECK_THROWS_AS((void)(a * b), Error);
}

TEST_CASE("division by a vanishing jet is rejected") {
  IndepPoly p, z;
  p.add(0, 0, 1.0);
  z.add(1, 0, 1.0);  // vanishes at the origin
  const ScalarJet jp = to_poly2(p).jet_at({0.0, 0.0}, 3);
  const ScalarJet jz = to_poly2(z).jet_at({0.0, 0.0}, 3);
  CHECK_THROWS_AS((void)(jp / jz), Error);
}

TEST_CASE("vector jet algebra matches componentwise expectations") {
  std::mt19937 rng(19);
  const Vec2 base{0.25, 0.4};
  const IndepPoly ax = fgtest::random_poly(rng, 2), ay = fgtest::random_poly(rng, 2),
                  az = fgtest::random_poly(rng, 2);
  const IndepPoly bx = fgtest::random_poly(rng, 2), by = fgtest::random_poly(rng, 2),
                  bz = fgtest::random_poly(rng, 2);
  const Vec3Jet a{to_poly2(ax).jet_at(base, 4), to_poly2(ay).jet_at(base, 4),
                  to_poly2(az).jet_at(base, 4)};
  const Vec3Jet b{to_poly2(bx).jet_at(base, 4), to_poly2(by).jet_at(base, 4),
                  to_poly2(bz).jet_at(base, 4)};

  const IndepPoly dot_poly =
      ax.times(bx).plus(ay.times(by)).plus(az.times(bz));
  check_jet_matches(dot(a, b), dot_poly, base, 1e-11);

  const IndepPoly cross_x = ay.times(bz).plus(az.times(by.times(IndepPoly().add(0, 0, -1.0))));
  check_jet_matches(cross(a, b).x, cross_x, base, 1e-11);

  // normalized() has unit length as a jet: all coefficients of |n|^2 - 1 vanish.
  const Vec3Jet n = normalized(a);
  const ScalarJet unit = norm2(n) - 1.0;
  CHECK(unit.max_abs_coeff() < 1e-9);
}

TEST_CASE("richardson helper recovers known limits") {
  // d/dh at 0 of sin'(x): extrapolate (sin(x+h)-sin(x-h))/(2h) -> cos(x).
  const double x = 0.6;
  std::vector<double> hs, ys;
  for (double h = 0.1; hs.size() < 4; h *= 0.5) {
    hs.push_back(h * h);
    ys.push_back((std::sin(x + h) - std::sin(x - h)) / (2.0 * h));
  }
  CHECK(fgtest::neville_limit(hs, ys) == doctest::Approx(std::cos(x)).epsilon(1e-12));
}
