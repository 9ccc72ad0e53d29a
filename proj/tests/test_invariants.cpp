// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "frontgeo/invariants.hpp"
#include "frontgeo/models.hpp"
#include "support/numdiff.hpp"
#include "support/oracle.hpp"

using namespace frontgeo;

namespace {

NormalFormCoeffs running_example() {
  NormalFormCoeffs c;
  c.a20 = 1.0;
  c.a30 = 0.0;
  c.b20 = 2.0;
  c.b30 = 5.0;
  c.b12 = 2.0;
  c.b03 = 1.0;
  return c;
}

// The same surface polynomials re-expressed through the plain-double test
// evaluator, so every oracle below shares no code path with the jet engine.
struct IndepMap3 {
  fgtest::IndepPoly x, y, z;

  static IndepMap3 of(const PolyMap3& m) {
    IndepMap3 r;
    for (const auto& t : m.terms) {
      r.x.add(t.i, t.j, t.c.x);
      r.y.add(t.i, t.j, t.c.y);
      r.z.add(t.i, t.j, t.c.z);
    }
    return r;
  }

  Vec3 eval(double u, double v) const { return {x.eval(u, v), y.eval(u, v), z.eval(u, v)}; }
  Vec3 deriv(int du, int dv, double u, double v) const {
    return {x.deriv(du, dv, u, v), y.deriv(du, dv, u, v), z.deriv(du, dv, u, v)};
  }
};

// phi = f_v / v for a map with no pure-v-linear terms.
IndepMap3 reduced_tangent(const PolyMap3& m) {
  IndepMap3 r;
  for (const auto& t : m.terms) {
    REQUIRE(t.j != 1);
    if (t.j >= 2) {
      r.x.add(t.i, t.j - 2, t.j * t.c.x);
      r.y.add(t.i, t.j - 2, t.j * t.c.y);
      r.z.add(t.i, t.j - 2, t.j * t.c.z);
    }
  }
  return r;
}

Vec3 unit3(Vec3 a) {
  const double n = a.norm();
  return {a.x / n, a.y / n, a.z / n};
}

// Edge invariants at an axis point from raw partial derivatives only
// (determinant expressions; valid when det(f_u, phi, nu) > 0).
EdgeInvariants edge_oracle(const IndepMap3& f, const IndepMap3& phi, double u) {
  const Vec3 fu = f.deriv(1, 0, u, 0.0);
  const Vec3 fuu = f.deriv(2, 0, u, 0.0);
  const Vec3 fuvv = f.deriv(1, 2, u, 0.0);
  const Vec3 fvvv = f.deriv(0, 3, u, 0.0);
  const Vec3 ph = phi.eval(u, 0.0);
  const Vec3 nu = unit3(cross(fu, ph));
  REQUIRE(triple(fu, ph, nu) > 0.0);
  const double e2 = dot(fu, fu);
  const double w2 = dot(cross(fu, ph), cross(fu, ph));
  EdgeInvariants o;
  o.kappa_s = triple(fu, fuu, nu) / std::pow(e2, 1.5);
  o.kappa_nu = dot(fuu, nu) / e2;
  o.kappa_c = std::pow(e2, 0.75) * triple(fu, ph, fvvv) / std::pow(w2, 1.25);
  o.kappa_t = triple(fu, ph, fuvv) / w2 - triple(fu, ph, fuu) * dot(fu, ph) / (e2 * w2);
  return o;
}

// Gauss and mean curvature of an immersed point from raw partials and an
// explicit unit normal.
void gauss_mean_oracle(const IndepMap3& f, Vec3 nu, double u, double v, double& K, double& H) {
  const Vec3 fu = f.deriv(1, 0, u, v), fv = f.deriv(0, 1, u, v);
  const double E = dot(fu, fu), F = dot(fu, fv), G = dot(fv, fv);
  const double e = dot(f.deriv(2, 0, u, v), nu);
  const double ff = dot(f.deriv(1, 1, u, v), nu);
  const double g = dot(f.deriv(0, 2, u, v), nu);
  const double den = E * G - F * F;
  K = (e * g - ff * ff) / den;
  H = (e * G - 2.0 * ff * F + g * E) / (2.0 * den);
}

// Swallowtail model (u, 3v^4 + uv^2, 4v^3 + 2uv) with its exact unit normal.
Vec3 swallowtail_normal(double u, double v) {
  (void)u;
  return unit3({-v * v, -1.0, v});
}

bool jets_close(const ScalarJet& a, const ScalarJet& b, double tol) {
  const int ord = std::min(a.order(), b.order());
  double scale = 1.0, worst = 0.0;
  for (int i = 0; i <= ord; ++i)
    for (int j = 0; i + j <= ord; ++j) scale = std::max({scale, std::abs(a.d(i, j)), std::abs(b.d(i, j))});
  for (int i = 0; i <= ord; ++i)
    for (int j = 0; i + j <= ord; ++j) worst = std::max(worst, std::abs(a.d(i, j) - b.d(i, j)));
  return worst <= tol * scale;
}

bool jets_close3(const Vec3Jet& a, const Vec3Jet& b, double tol) {
  return jets_close(a.x, b.x, tol) && jets_close(a.y, b.y, tol) && jets_close(a.z, b.z, tol);
}

Errc thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::nothing_found;
}

}  // namespace

TEST_CASE("fundamental quantities of the standard cuspidal edge") {
  const auto f = make_surface(make_standard_model("cuspidal-edge"));
  const auto chart = AdaptedChart::identity(f);
  for (double u : {0.0, 0.4}) {
    const auto fd = fundamental_data(chart, {u, 0.0}, 3);
    CHECK(fd.kind == ChartKind::first);
    CHECK(fd.sigma == +1);
    CHECK(fd.E.value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fd.F.value() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(fd.G.value() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(fd.L.value() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(fd.M.value() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(fd.N.value() == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("fundamental quantities of the running normal form") {
  const auto f = make_surface(make_normal_form(running_example()));
  const auto chart = AdaptedChart::identity(f);
  const auto fd = fundamental_data(chart, {0.0, 0.0}, 4);
  CHECK(fd.order == 4);
  CHECK(fd.E.value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fd.F.value() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(fd.G.value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fd.L.value() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fd.M.value() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fd.N.value() == doctest::Approx(0.5).epsilon(1e-12));

  // The normal quantities against plain finite differences of the exact
  // normalized polynomial normal field.
  const auto spec = std::dynamic_pointer_cast<const PolySurface>(f)->spec();
  const auto mf = IndepMap3::of(spec.map);
  const auto mn = IndepMap3::of(*spec.normal);
  const auto nu_comp = [&](int k) {
    return fgtest::Fn2([&mn, k](double u, double v) {
      const Vec3 n = unit3(mn.eval(u, v));
      return k == 0 ? n.x : (k == 1 ? n.y : n.z);
    });
  };
  Vec3 nu_u, nu_v;
  nu_u.x = fgtest::fd_partial(nu_comp(0), 0, 0, 1, 0, 1e-3);
  nu_u.y = fgtest::fd_partial(nu_comp(1), 0, 0, 1, 0, 1e-3);
  nu_u.z = fgtest::fd_partial(nu_comp(2), 0, 0, 1, 0, 1e-3);
  nu_v.x = fgtest::fd_partial(nu_comp(0), 0, 0, 0, 1, 1e-3);
  nu_v.y = fgtest::fd_partial(nu_comp(1), 0, 0, 0, 1, 1e-3);
  nu_v.z = fgtest::fd_partial(nu_comp(2), 0, 0, 0, 1, 1e-3);
  const Vec3 fu = mf.deriv(1, 0, 0, 0);
  const auto phi = reduced_tangent(spec.map);
  const Vec3 ph = phi.eval(0, 0);
  CHECK(-dot(fu, nu_u) == doctest::Approx(fd.L.value()).epsilon(1e-9));
  CHECK(-dot(ph, nu_u) == doctest::Approx(fd.M.value()).epsilon(1e-9));
  CHECK(-dot(ph, nu_v) == doctest::Approx(fd.N.value()).epsilon(1e-9));
}

TEST_CASE("normal derivatives decompose in the adapted frame (first kind)") {
  const auto f = make_surface(make_normal_form(running_example()));
  const auto chart = AdaptedChart::identity(f);
  for (Vec2 q : {Vec2{0.0, 0.0}, Vec2{-0.07, 0.0}, Vec2{0.05, 0.12}}) {
    const auto fd = fundamental_data(chart, q, 4);
    const ScalarJet D = fd.E * fd.G - fd.F * fd.F;
    const ScalarJet vj = ScalarJet::variable_v(q, fd.order);
    const Vec3Jet rhs_u = fd.gu * ((fd.F * fd.M - fd.G * fd.L) / D) +
                          fd.phi * ((fd.F * fd.L - fd.E * fd.M) / D);
    const Vec3Jet rhs_v = fd.gu * ((fd.F * fd.N - vj * (fd.G * fd.M)) / D) +
                          fd.phi * ((vj * (fd.F * fd.M) - fd.E * fd.N) / D);
    CHECK(jets_close3(fd.nu.deriv_u(), rhs_u, 1e-8));
    CHECK(jets_close3(fd.nu.deriv_v(), rhs_v, 1e-8));
  }
}

TEST_CASE("normal derivatives decompose in the adapted frame (second kind)") {
  const auto f = make_surface(make_standard_model("swallowtail"));
  const auto curve = trace_singular_curve(f, {-0.06, 0.1}, {-0.9, 0.3, -0.45, 0.45}, 0.004);
  const auto chart = AdaptedChart::from_curve(f, curve, {0.0, 0.0});
  CHECK(chart.kind() == ChartKind::second);
  for (Vec2 q : {Vec2{0.0, 0.0}, Vec2{0.04, -0.03}}) {
    const auto fd = fundamental_data(chart, q, 3);
    const ScalarJet D = fd.E * fd.G - fd.F * fd.F;
    const ScalarJet vj = ScalarJet::variable_v(q, fd.order);
    const ScalarJet mix = vj * fd.M - fd.eps * fd.N;
    const Vec3Jet rhs_u =
        fd.phi * ((fd.F * mix - fd.G * fd.L) / D) + fd.gv * ((fd.F * fd.L - fd.E * mix) / D);
    const Vec3Jet rhs_v = fd.phi * ((fd.F * fd.N - fd.G * fd.M) / D) +
                          fd.gv * ((fd.F * fd.M - fd.E * fd.N) / D);
    // The fitted chart's axis matches the singular curve only to the fit
    // tolerance, so phi = g_u / v (and the fitted eps) carry a small defect;
    // a wrong formula would be off at order one.
    CHECK(jets_close3(fd.nu.deriv_u(), rhs_u, 1e-4));
    CHECK(jets_close3(fd.nu.deriv_v(), rhs_v, 1e-4));
  }
}

TEST_CASE("edge invariants at the standard cuspidal edge and running example") {
  const auto ce = make_surface(make_standard_model("cuspidal-edge"));
  const auto ce_chart = AdaptedChart::identity(ce);
  const auto ei = edge_invariants(ce_chart, {0.0, 0.0});
  CHECK(ei.kappa_s == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(ei.kappa_nu == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(ei.kappa_c == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ei.kappa_t == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  const auto nf = make_surface(make_normal_form(running_example()));
  const auto chart = AdaptedChart::identity(nf);
  const auto ri = edge_invariants(chart, {0.0, 0.0});
  CHECK(ri.kappa_s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ri.kappa_nu == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ri.kappa_c == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ri.kappa_t == doctest::Approx(2.0).epsilon(1e-12));

  // First-kind invariants on a second-kind chart are rejected.
  const auto sw = make_surface(make_standard_model("swallowtail"));
  const auto curve = trace_singular_curve(sw, {-0.06, 0.1}, {-0.9, 0.3, -0.45, 0.45}, 0.004);
  const auto sw_chart = AdaptedChart::from_curve(sw, curve, {0.0, 0.0});
  CHECK(thrown_code([&] { (void)edge_invariants(sw_chart, {0.0, 0.0}); }) == Errc::wrong_kind);
}

TEST_CASE("edge invariants match independent determinant oracles on random draws") {
  std::mt19937 rng(20240517);
  std::uniform_real_distribution<double> pos(0.5, 3.0), any(-3.0, 3.0), tail(-0.8, 0.8);
  for (int draw = 0; draw < 6; ++draw) {
    NormalFormCoeffs c;
    c.a20 = any(rng);
    c.a30 = any(rng);
    c.b20 = pos(rng);
    c.b30 = any(rng);
    c.b12 = any(rng);
    c.b03 = pos(rng);
    c.h1 = {tail(rng)};
    c.h2 = {tail(rng)};
    c.h3 = {tail(rng)};
    c.h4 = {tail(rng)};
    const auto f = make_surface(make_normal_form(c));
    const auto chart = AdaptedChart::identity(f);
    const auto spec = std::dynamic_pointer_cast<const PolySurface>(f)->spec();
    const auto mf = IndepMap3::of(spec.map);
    const auto phi = reduced_tangent(spec.map);
    const auto want = normal_form_oracles(c);

    for (double u : {0.0, 0.11, -0.09}) {
      const auto got = edge_invariants(chart, {u, 0.0});
      const auto orc = edge_oracle(mf, phi, u);
      CHECK(got.kappa_s == doctest::Approx(orc.kappa_s).epsilon(1e-8));
      CHECK(got.kappa_nu == doctest::Approx(orc.kappa_nu).epsilon(1e-8));
      CHECK(got.kappa_c == doctest::Approx(orc.kappa_c).epsilon(1e-8));
      CHECK(got.kappa_t == doctest::Approx(orc.kappa_t).epsilon(1e-8));
    }
    const auto at0 = edge_invariants(chart, {0.0, 0.0});
    CHECK(at0.kappa_s == doctest::Approx(want.kappa_s).epsilon(1e-10));
    CHECK(at0.kappa_nu == doctest::Approx(want.kappa_nu).epsilon(1e-10));
    CHECK(at0.kappa_c == doctest::Approx(want.kappa_c).epsilon(1e-10));
    CHECK(at0.kappa_t == doctest::Approx(want.kappa_t).epsilon(1e-10));
  }
}

TEST_CASE("signed invariants flip as specified under a normal flip") {
  const auto spec = make_normal_form(running_example());
  const auto chart = AdaptedChart::identity(make_surface(spec));
  const auto flip = AdaptedChart::identity(make_surface(spec.flipped()));
  CHECK(chart.sigma() == +1);
  CHECK(flip.sigma() == -1);

  const auto a = edge_invariants(chart, {0.0, 0.0});
  const auto b = edge_invariants(flip, {0.0, 0.0});
  CHECK(b.kappa_s == doctest::Approx(a.kappa_s).epsilon(1e-12));
  CHECK(b.kappa_nu == doctest::Approx(-a.kappa_nu).epsilon(1e-12));
  CHECK(b.kappa_c == doctest::Approx(-a.kappa_c).epsilon(1e-12));
  CHECK(b.kappa_t == doctest::Approx(-a.kappa_t).epsilon(1e-12));

  const auto ba = bounded_branch(chart, {0.0, 0.0});
  const auto bb = bounded_branch(flip, {0.0, 0.0});
  CHECK(ba.exists);
  CHECK(bb.exists);
  CHECK(ba.which_plus);
  CHECK_FALSE(bb.which_plus);
  CHECK(bb.value == doctest::Approx(-ba.value).epsilon(1e-12));
  CHECK(ridge_order(flip, {0.0, 0.0}) == ridge_order(chart, {0.0, 0.0}));
}

TEST_CASE("second kind invariants of the swallowtail") {
  const auto f = make_surface(make_standard_model("swallowtail"));
  const auto curve = trace_singular_curve(f, {-0.06, 0.1}, {-0.9, 0.3, -0.45, 0.45}, 0.004);
  const auto chart = AdaptedChart::from_curve(f, curve, {0.0, 0.0});
  const Vec2 o{0.0, 0.0};
  CHECK(chart.kind() == ChartKind::second);

  // Conventions pinned by the model's shipped normal at the origin.
  const Vec3 nu0 = chart.normal_jet(o, 0).value();
  CHECK(nu0.x == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(nu0.y == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(nu0.z == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  const auto sk = second_kind_invariants(chart, o);
  CHECK(sk.front);
  CHECK(sk.admissible);
  CHECK(sk.mu_c == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sk.kappa_nu == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));

  // Independent limit: mu_c = 2 (V * mean curvature)(theta(0, V)) as V -> 0,
  // with the mean curvature from raw partials at the mapped source point.
  const auto smap = IndepMap3::of(
      std::dynamic_pointer_cast<const PolySurface>(f)->spec().map);
  std::vector<double> xs, ys;
  for (double V = 0.02; xs.size() < 6; V *= 0.5) {
    const Vec2 s = chart.source_point({0.0, V});
    double K, H;
    gauss_mean_oracle(smap, swallowtail_normal(s.u, s.v), s.u, s.v, K, H);
    xs.push_back(V);
    ys.push_back(2.0 * V * H);
    CHECK(std::abs(K) < 1e-12);  // the model is developable
  }
  CHECK(fgtest::neville_limit(xs, ys) == doctest::Approx(sk.mu_c).epsilon(1e-7));

  // Bounded branch: the zero curvature branch, labelled by the sign of the
  // deciding coefficient L(0) = 2 > 0.
  const auto fd = fundamental_data(chart, o, 3);
  CHECK(fd.L.value() == doctest::Approx(2.0).epsilon(1e-3));
  const auto bb = bounded_branch(chart, o);
  CHECK(bb.exists);
  CHECK(bb.which_plus);
  CHECK(bb.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  CHECK(bb.pv.v == doctest::Approx(fd.L.value()).epsilon(1e-8));
  CHECK(std::abs(bb.pv.u) < 1e-6);
  CHECK(ridge_order(chart, o) == 3);  // flat branch: every derivative vanishes

  // Chart direction is canonical: the mirrored seed yields the same values.
  const auto curve2 = trace_singular_curve(f, {-0.06, -0.1}, {-0.9, 0.3, -0.45, 0.45}, 0.004);
  const auto chart2 = AdaptedChart::from_curve(f, curve2, {0.0, 0.0});
  CHECK(second_kind_invariants(chart2, o).mu_c == doctest::Approx(sk.mu_c).epsilon(1e-9));

  // Normal flip: mu_c flips, the bounded branch label swaps.
  const auto fflip = make_surface(make_standard_model("swallowtail").flipped());
  const auto curvef = trace_singular_curve(fflip, {-0.06, 0.1}, {-0.9, 0.3, -0.45, 0.45}, 0.004);
  const auto chartf = AdaptedChart::from_curve(fflip, curvef, {0.0, 0.0});
  const auto skf = second_kind_invariants(chartf, o);
  CHECK(skf.mu_c == doctest::Approx(-sk.mu_c).epsilon(1e-9));
  CHECK(skf.front);
  const auto bbf = bounded_branch(chartf, o);
  CHECK(bbf.exists);
  CHECK_FALSE(bbf.which_plus);

  // Second-kind invariants on a first-kind chart are rejected.
  const auto nf = make_surface(make_normal_form(running_example()));
  CHECK(thrown_code([&] {
          (void)second_kind_invariants(AdaptedChart::identity(nf), o);
        }) == Errc::wrong_kind);
}

TEST_CASE("frontal but non-front points: zero deciders, no bounded branch") {
  // Cuspidal cross cap (u, v^2, uv^3): frontal everywhere, front iff u != 0.
  SurfaceSpec spec;
  Poly2 fx, fy, fz, nx, ny, nz;
  fx.add_term(1, 0, 1.0);
  fy.add_term(0, 2, 1.0);
  fz.add_term(1, 3, 1.0);
  nx.add_term(0, 3, -2.0);
  ny.add_term(1, 1, -3.0);
  nz.add_term(0, 0, 2.0);
  spec.map = from_components(fx, fy, fz);
  spec.normal = from_components(nx, ny, nz);
  spec.adapted = true;
  spec.order = 5;
  spec.model_name = "cuspidal-cross-cap";
  const auto f = make_surface(spec);
  const auto chart = AdaptedChart::identity(f);

  CHECK_FALSE(is_front_point(*f, {0.0, 0.0}));
  CHECK(is_front_point(*f, {0.3, 0.0}));

  const auto bad = bounded_branch(chart, {0.0, 0.0});
  CHECK_FALSE(bad.exists);
  CHECK(std::isnan(bad.value));
  CHECK(thrown_code([&] { (void)principal_vector(chart, {0.0, 0.0}); }) ==
        Errc::no_bounded_branch);
  const auto e0 = edge_invariants(chart, {0.0, 0.0});
  CHECK(e0.kappa_c == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  const auto good = bounded_branch(chart, {0.3, 0.0});
  CHECK(good.exists);
  const auto e3 = edge_invariants(chart, {0.3, 0.0});
  CHECK(e3.kappa_c == doctest::Approx(2.0 * 0.9 / std::pow(4.0, 0.75)).epsilon(1e-10));
}

TEST_CASE("second kind formula consistency on synthetic frame data") {
  const Vec2 base{0.0, 0.0};
  const auto cj = [&](double v) { return ScalarJet::constant(v, base, 2); };
  FundamentalData fd;
  fd.kind = ChartKind::second;
  fd.order = 2;
  fd.E = cj(4.0);
  fd.F = cj(0.0);
  fd.G = cj(1.0);
  fd.L = cj(0.0);  // non-front: the deciding quantity vanishes
  fd.M = cj(0.3);
  fd.N = cj(0.2);
  fd.eps = ScalarJet(base, 2);  // identically zero: non-admissible
  ScalarJet gy(base, 3);
  gy.at(0, 2) = 1.0;
  fd.g = Vec3Jet{ScalarJet::variable_u(base, 3), gy, ScalarJet(base, 3)};
  fd.nu = Vec3Jet{ScalarJet(base, 3), ScalarJet(base, 3), ScalarJet::constant(1.0, base, 3)};

  const auto sk = second_kind_invariants(fd);
  CHECK(sk.mu_c == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK_FALSE(sk.front);
  CHECK_FALSE(sk.admissible);
  CHECK(std::isnan(sk.kappa_nu));
}

TEST_CASE("principal branches match raw-surface curvature data") {
  const auto f = make_surface(make_normal_form(running_example()));
  const auto chart = AdaptedChart::identity(f);
  const auto spec = std::dynamic_pointer_cast<const PolySurface>(f)->spec();
  const auto mf = IndepMap3::of(spec.map);
  const auto mn = IndepMap3::of(*spec.normal);

  for (Vec2 q : {Vec2{0.05, 0.13}, Vec2{-0.08, -0.11}, Vec2{0.0, 0.2}}) {
    const auto pb = principal_branches(chart, q);
    CHECK(pb.gauss == doctest::Approx(pb.kappa_plus * pb.kappa_minus).epsilon(1e-10));
    CHECK(2.0 * pb.mean == doctest::Approx(pb.kappa_plus + pb.kappa_minus).epsilon(1e-10));

    double K, H;
    gauss_mean_oracle(mf, unit3(mn.eval(q.u, q.v)), q.u, q.v, K, H);
    CHECK(pb.gauss == doctest::Approx(K).epsilon(1e-9));
    CHECK(pb.mean == doctest::Approx(H).epsilon(1e-9));
    const double disc = std::sqrt(std::max(0.0, H * H - K));
    const double lo = std::min(pb.kappa_plus, pb.kappa_minus);
    const double hi = std::max(pb.kappa_plus, pb.kappa_minus);
    CHECK(lo == doctest::Approx(H - disc).epsilon(1e-7));
    CHECK(hi == doctest::Approx(H + disc).epsilon(1e-7));
  }

  // On the axis the branches are not separated.
  CHECK(thrown_code([&] { (void)principal_branches(chart, {0.1, 0.0}); }) ==
        Errc::branch_ambiguity);

  // Synthetic umbilic data: equal roots are rejected as ambiguous.
  const Vec2 ub{0.0, 1.0};
  const auto cj = [&](double v) { return ScalarJet::constant(v, ub, 2); };
  FundamentalData um;
  um.kind = ChartKind::first;
  um.order = 2;
  um.E = cj(1.0);
  um.F = cj(0.0);
  um.G = cj(1.0);
  um.L = cj(1.0);
  um.M = cj(0.0);
  um.N = cj(1.0);
  um.eps = ScalarJet(ub, 2);
  CHECK(thrown_code([&] { (void)principal_branches(um); }) == Errc::branch_ambiguity);
}

TEST_CASE("one branch stays bounded across the axis, the other blows up") {
  const auto nf = make_surface(make_normal_form(running_example()));
  const auto nf_chart = AdaptedChart::identity(nf);
  std::vector<double> xs, kp, vkm;
  for (double v = 1e-2; xs.size() < 5; v *= 0.1) {
    const auto pb = principal_branches(nf_chart, {0.0, v});
    xs.push_back(v);
    kp.push_back(pb.kappa_plus);
    vkm.push_back(v * pb.kappa_minus);
  }
  CHECK(fgtest::neville_limit(xs, kp) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fgtest::neville_limit(xs, vkm) == doctest::Approx(0.5).epsilon(1e-6));

  const auto ce = make_surface(make_standard_model("cuspidal-edge"));
  const auto ce_chart = AdaptedChart::identity(ce);
  xs.clear();
  kp.clear();
  vkm.clear();
  for (double v = 1e-2; xs.size() < 5; v *= 0.1) {
    const auto pb = principal_branches(ce_chart, {0.0, v});
    xs.push_back(v);
    kp.push_back(pb.kappa_plus);
    vkm.push_back(v * pb.kappa_minus);
  }
  CHECK(std::abs(fgtest::neville_limit(xs, kp)) < 1e-10);
  CHECK(fgtest::neville_limit(xs, vkm) == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("bounded branch jet, principal vector, and eigen residual") {
  const auto c = running_example();
  const auto f = make_surface(make_normal_form(c));
  const auto chart = AdaptedChart::identity(f);
  const auto want = normal_form_oracles(c);

  const auto bb = bounded_branch(chart, {0.0, 0.0});
  CHECK(bb.exists);
  CHECK(bb.which_plus);
  CHECK(bb.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(bb.jet.d(1, 0) == doctest::Approx(want.kp_u).epsilon(1e-12));
  CHECK(bb.jet.d(0, 1) == doctest::Approx(want.kp_v).epsilon(1e-12));
  CHECK(want.kp_u == doctest::Approx(3.0));
  CHECK(want.kp_v == doctest::Approx(-8.5));

  // Finite differences of the pointwise bounded value confirm the jet.
  const auto kfun = fgtest::Fn2([&](double u, double v) {
    return bounded_branch(chart, {u, v}, 1).value;
  });
  CHECK(fgtest::fd_partial_rich(kfun, 0, 0, 1, 0) == doctest::Approx(want.kp_u).epsilon(1e-5));
  CHECK(fgtest::fd_partial_rich(kfun, 0, 0, 0, 1) == doctest::Approx(want.kp_v).epsilon(1e-5));

  // Principal vector at the origin: (N, -M + kappa F) = (1/2, -2).
  CHECK(bb.pv.u == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bb.pv.v == doctest::Approx(-2.0).epsilon(1e-12));
  const Vec2 pv = principal_vector(chart, {0.0, 0.0});
  CHECK(pv.u == doctest::Approx(bb.pv.u).epsilon(1e-12));
  CHECK(pv.v == doctest::Approx(bb.pv.v).epsilon(1e-12));

  // Off the axis the bounded value agrees with one principal branch, and its
  // vector is in the kernel of II - kappa I (first-row residual).
  for (double v : {1e-3, 1e-4}) {
    const Vec2 q{0.02, v};
    const auto ob = bounded_branch(chart, q, 2);
    const auto pb = principal_branches(chart, q);
    const double dmin = std::min(std::abs(ob.value - pb.kappa_plus),
                                 std::abs(ob.value - pb.kappa_minus));
    CHECK(dmin <= 1e-9 * std::max(1.0, std::abs(ob.value)));

    const auto fd = fundamental_data(chart, q, 1);
    const double E = fd.E.value(), F = fd.F.value(), G = fd.G.value();
    const double L = fd.L.value(), M = fd.M.value(), N = fd.N.value();
    const double resid = (L - ob.value * E) * ob.pv.u + v * (M - ob.value * F) * ob.pv.v;
    const double scale = std::max({std::abs(L), std::abs(ob.value) * E, 1.0}) *
                         std::max(std::abs(ob.pv.u), std::abs(ob.pv.v));
    CHECK(std::abs(resid) <= 1e-8 * scale);
    (void)G;
    (void)N;
  }
}

TEST_CASE("ridge order and the finite-difference flow cross-check") {
  const auto c = running_example();
  const auto f = make_surface(make_normal_form(c));
  const auto chart = AdaptedChart::identity(f);
  const auto want = normal_form_oracles(c);

  const auto rd = ridge_data(chart, {0.0, 0.0});
  CHECK(rd.order == -1);
  const double pvn = std::hypot(0.5, -2.0);
  CHECK(rd.deriv[0] * pvn == doctest::Approx(want.dkp_along_pv).epsilon(1e-10));
  CHECK(want.dkp_along_pv == doctest::Approx(18.5));

  const auto fdd = ridge_derivs_fd(chart, {0.0, 0.0});
  CHECK(fdd[0] == doctest::Approx(rd.deriv[0]).epsilon(1e-5));

  ProfileOptions fdopt;
  fdopt.fd_check = true;
  CHECK(invariant_sample(chart, {0.0, 0.0}, fdopt).fd_ok);

  // Tuned coefficients b30 = -4 b12^3 / b03^2 put a ridge point at the origin.
  auto ct = c;
  ct.b30 = -4.0 * std::pow(ct.b12, 3.0) / (ct.b03 * ct.b03);
  CHECK(normal_form_oracles(ct).ridge_quantity == doctest::Approx(0.0).scale(1.0));
  const auto ft = make_surface(make_normal_form(ct));
  const auto chart_t = AdaptedChart::identity(ft);
  const auto rt = ridge_data(chart_t, {0.0, 0.0});
  CHECK(rt.order == 0);
  CHECK(std::abs(rt.deriv[0]) <= 1e-7 * rt.scale);
  CHECK(std::abs(rt.deriv[1]) > 1e-3);
  CHECK(invariant_sample(chart_t, {0.0, 0.0}, fdopt).fd_ok);
}

TEST_CASE("random normal forms: bounded jet and ridge sign agree with closed forms") {
  std::mt19937 rng(911);
  std::uniform_real_distribution<double> pos(0.5, 3.0), any(-3.0, 3.0);
  for (int draw = 0; draw < 8; ++draw) {
    NormalFormCoeffs c;
    c.a20 = any(rng);
    c.a30 = any(rng);
    c.b20 = pos(rng);
    c.b30 = any(rng);
    c.b12 = any(rng);
    c.b03 = pos(rng);
    const auto chart = AdaptedChart::identity(make_surface(make_normal_form(c)));
    const auto want = normal_form_oracles(c);
    const auto bb = bounded_branch(chart, {0.0, 0.0});
    CHECK(bb.exists);
    CHECK(bb.value == doctest::Approx(want.kappa_nu).epsilon(1e-10));
    CHECK(bb.jet.d(1, 0) == doctest::Approx(want.kp_u).epsilon(1e-8));
    CHECK(bb.jet.d(0, 1) == doctest::Approx(want.kp_v).epsilon(1e-8));
    const auto rd = ridge_data(chart, {0.0, 0.0});
    const double pvn = std::hypot(0.5 * c.b03, c.b12);
    CHECK(rd.deriv[0] * pvn == doctest::Approx(want.dkp_along_pv).epsilon(1e-8));
    if (std::abs(want.ridge_quantity) > 0.05) CHECK(rd.order == -1);
  }
}

TEST_CASE("rigid motions leave every invariant unchanged") {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> any(-1.0, 1.0);
  const auto spec = make_normal_form(running_example());
  const auto base_chart = AdaptedChart::identity(make_surface(spec));
  const auto e0 = edge_invariants(base_chart, {0.0, 0.0});
  const auto b0 = bounded_branch(base_chart, {0.0, 0.0});

  for (int trial = 0; trial < 3; ++trial) {
    const Vec3 axis{any(rng), any(rng), any(rng)};
    const Mat3 rot = rotation(axis, 0.3 + trial);
    const Vec3 shift{any(rng), any(rng), any(rng)};
    const auto moved = AdaptedChart::identity(make_surface(spec.transformed(rot, shift)));

    const auto e1 = edge_invariants(moved, {0.0, 0.0});
    CHECK(e1.kappa_s == doctest::Approx(e0.kappa_s).epsilon(1e-9));
    CHECK(e1.kappa_nu == doctest::Approx(e0.kappa_nu).epsilon(1e-9));
    CHECK(e1.kappa_c == doctest::Approx(e0.kappa_c).epsilon(1e-9));
    CHECK(e1.kappa_t == doctest::Approx(e0.kappa_t).epsilon(1e-9));

    const auto b1 = bounded_branch(moved, {0.0, 0.0});
    CHECK(b1.value == doctest::Approx(b0.value).epsilon(1e-9));
    CHECK(b1.jet.d(1, 0) == doctest::Approx(b0.jet.d(1, 0)).epsilon(1e-9));
    CHECK(b1.jet.d(0, 1) == doctest::Approx(b0.jet.d(0, 1)).epsilon(1e-9));
    CHECK(b1.pv.u == doctest::Approx(b0.pv.u).epsilon(1e-9));
    CHECK(b1.pv.v == doctest::Approx(b0.pv.v).epsilon(1e-9));
    CHECK(ridge_order(moved, {0.0, 0.0}) == -1);
  }
}

TEST_CASE("line of curvature detection along the axis") {
  const auto ce = make_surface(make_standard_model("cuspidal-edge"));
  CHECK(line_of_curvature(AdaptedChart::identity(ce), -0.3, 0.3));

  const auto nf = make_surface(make_normal_form(running_example()));
  CHECK_FALSE(line_of_curvature(AdaptedChart::identity(nf), -0.1, 0.1));

  const auto sw = make_surface(make_standard_model("swallowtail"));
  const auto curve = trace_singular_curve(sw, {-0.06, 0.1}, {-0.9, 0.3, -0.45, 0.45}, 0.004);
  const auto chart = AdaptedChart::from_curve(sw, curve, {0.0, 0.0});
  CHECK_FALSE(line_of_curvature(chart, -0.05, 0.05));
}

TEST_CASE("axis profile of the running example") {
  const auto f = make_surface(make_normal_form(running_example()));
  const auto chart = AdaptedChart::identity(f);
  const auto prof = profile_on_axis(chart, -0.2, 0.2, 21);
  REQUIRE(prof.rows.size() == 21);
  for (const auto& row : prof.rows) {
    CHECK(row.ok);
    CHECK(row.kind == ChartKind::first);
    CHECK(row.front);
    CHECK(row.bounded);
    CHECK(row.ridge_order == -1);
    CHECK(std::isfinite(row.kappa_s));
    CHECK(std::isfinite(row.kappa_plus));
    CHECK(std::isnan(row.mu_c));
  }
  CHECK(prof.rows.front().s == doctest::Approx(-0.2));
  CHECK(prof.rows.back().s == doctest::Approx(0.2));
  CHECK(prof.rows[10].kappa_nu == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("profile along the traced swallowtail curve") {
  const auto f = make_surface(make_standard_model("swallowtail"));
  const auto curve = trace_singular_curve(f, {-0.06, 0.1}, {-0.9, 0.3, -0.45, 0.45}, 0.004);
  ProfileOptions opt;
  opt.stride = 25;
  const auto prof = profile_along_curve(f, curve, opt);
  REQUIRE(prof.rows.size() >= 8);
  int ok_rows = 0;
  for (const auto& row : prof.rows) {
    if (!row.ok) continue;
    ++ok_rows;
    CHECK(row.front);
    CHECK(row.bounded);
    if (row.kind == ChartKind::first) {
      CHECK(std::abs(row.kappa_c) > 1e-4);
      CHECK(std::isnan(row.mu_c));
      CHECK(std::isfinite(row.kappa_s));
    } else {
      CHECK(std::isnan(row.kappa_s));
      CHECK(std::isfinite(row.mu_c));
    }
  }
  CHECK(ok_rows >= 8);

  // A sample taken exactly at the second-kind point.
  const auto chart = AdaptedChart::from_curve(f, curve, {0.0, 0.0});
  const auto row = invariant_sample(chart, {0.0, 0.0});
  CHECK(row.kind == ChartKind::second);
  CHECK(row.admissible);
  CHECK(row.mu_c == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::isnan(row.kappa_s));
  CHECK(row.bounded);
  CHECK(row.ridge_order == 3);
}
