// SPDX-License-Identifier: Apache-2.0
#include "frontgeo/distsq.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "frontgeo/classify.hpp"
#include "frontgeo/invariants.hpp"

namespace frontgeo {

namespace {

constexpr double kTinyScale = 1e-12;

Vec3Jet constant3(Vec3 w, Vec2 base, int order) {
  return {ScalarJet::constant(w.x, base, order),
          ScalarJet::constant(w.y, base, order),
          ScalarJet::constant(w.z, base, order)};
}

// i! for the Taylor-coefficient weights below (orders up to 3).
constexpr double kFact[4] = {1.0, 1.0, 2.0, 6.0};

double two_jet_norm_of(const ScalarJet& psi) {
  double m = 0.0;
  for (int deg = 0; deg <= 2; ++deg)
    for (int j = 0; j <= deg; ++j) {
      const int i = deg - j;
      m = std::max(m, std::abs(psi.d(i, j)) / (kFact[i] * kFact[j]));
    }
  return m;
}

double third_order_scale(const ScalarJet& psi) {
  double m = 0.0;
  for (int j = 0; j <= 3; ++j) {
    const int i = 3 - j;
    m = std::max(m, std::abs(psi.d(i, j)) / (kFact[i] * kFact[j]));
  }
  return m;
}

struct ChartAt {
  AdaptedChart chart;
  Vec2 q;  // chart coordinates of the requested source point
};

// Adapted chart through the singular curve of f at p: the identity chart for
// declared-adapted surfaces, a traced-and-straightened chart otherwise.
ChartAt chart_through(std::shared_ptr<const JetSurface> f, Vec2 p, const DsqOptions& opt) {
  if (f->declared_adapted()) return {AdaptedChart::identity(f), p};
  TracedCurve curve = trace_singular_curve(f, p, opt.window, opt.trace_step);
  return {AdaptedChart::from_curve(f, curve, p), Vec2{0.0, 0.0}};
}

// The focal configuration at p: the center x0 on the normal line, its radius
// t0 = 1/kappa, and the chart used to read curvatures (kept for the ridge
// order downstream).
struct FocalFrame {
  Vec3 center;
  double t0;
  bool frontal;
  ChartAt ca;
};

FocalFrame focal_frame(std::shared_ptr<const JetSurface> f, Vec2 p, const DsqOptions& opt) {
  SingularPointReport rep = classify_singular_point(f, p);  // throws off S(f)
  if (rep.corank >= 2)
    fail(Errc::corank_two, "focal centers need a corank-1 singular point");

  ChartAt ca = chart_through(f, p, opt);
  double kappa = 0.0;
  bool frontal = false;
  if (rep.front) {
    BoundedBranch bb = bounded_branch(ca.chart, ca.q);
    if (!bb.exists)
      fail(Errc::no_bounded_branch, "no bounded principal branch at the point");
    const double kscale = std::max(bb.jet.max_abs_coeff(), kTinyScale);
    if (std::abs(bb.value) <= opt.vanish_tol * kscale)
      fail(Errc::no_focal_offset, "no focal point: kappa_+(p) = 0");
    kappa = bb.value;
  } else {
    if (rep.kind != SingularKind::second || !rep.admissible)
      fail(Errc::wrong_kind,
           "frontal focal centers are defined at admissible second-kind points only");
    const FundamentalData fd = fundamental_data(ca.chart, ca.q, 1);
    const double nscale = std::max(fd.N.max_abs_coeff(), kTinyScale);
    if (std::abs(fd.N.value()) <= opt.vanish_tol * nscale)
      fail(Errc::no_focal_offset, "no focal point: kappa_nu(p) = 0 on the frontal");
    kappa = fd.N.value() / fd.G.value();
    frontal = true;
  }

  const double t0 = 1.0 / kappa;
  const Vec3 f0 = f->map_jet(p, 0).value();
  const Vec3 nu0 = ca.chart.normal_jet(ca.q, 0).value();
  return FocalFrame{f0 + nu0 * t0, t0, frontal, std::move(ca)};
}

}  // namespace

const char* to_string(D4Label label) {
  switch (label) {
    case D4Label::d4_positive: return "D4-positive-sign";
    case D4Label::d4_negative: return "D4-negative-sign";
    case D4Label::not_d4: return "not-D4";
    case D4Label::frontal_degenerate: return "frontal-degenerate";
  }
  return "?";
}

ScalarJet psi_jet(const JetSurface& f, Vec3 x0, double t0, Vec2 p) {
  const Vec3Jet fj = f.map_jet(p, 3);
  const Vec3Jet diff = constant3(x0, p, fj.order()) - fj;
  return (norm2(diff) - t0 * t0) * (-0.5);
}

double delta_psi_discriminant(const ScalarJet& psi) {
  if (psi.order() < 3)
    fail(Errc::jet_mismatch, "Delta_psi needs an order-3 jet");
  const double a = psi.d(3, 0);
  const double b = psi.d(2, 1);
  const double c = psi.d(1, 2);
  const double d = psi.d(0, 3);
  return a * a * d * d - 6.0 * a * b * c * d - 3.0 * b * b * c * c +
         4.0 * b * b * b * d + 4.0 * a * c * c * c;
}

double delta_psi(std::shared_ptr<const JetSurface> f, Vec2 p, const DsqOptions& opt) {
  const FocalFrame fr = focal_frame(f, p, opt);
  return delta_psi_discriminant(psi_jet(*f, fr.center, fr.t0, p));
}

DsqReport d4_classify(std::shared_ptr<const JetSurface> f, Vec2 p, const DsqOptions& opt) {
  FocalFrame fr = focal_frame(f, p, opt);
  const ScalarJet psi = psi_jet(*f, fr.center, fr.t0, p);

  DsqReport rep;
  rep.point = p;
  rep.center = fr.center;
  rep.t0 = fr.t0;
  rep.frontal = fr.frontal;
  rep.two_jet_norm = two_jet_norm_of(psi);
  rep.delta_psi = delta_psi_discriminant(psi);
  const double scale = third_order_scale(psi);
  rep.tau_jet = kTauJetFactor * scale;
  rep.tau_delta = kTauDeltaFactor * scale * scale * scale * scale;

  if (fr.frontal) {
    rep.d4_label = D4Label::frontal_degenerate;
    return rep;  // no bounded branch: ridge fields stay at their defaults
  }

  rep.ridge_order = ridge_order(fr.ca.chart, fr.ca.q);
  const bool d4 = std::abs(rep.delta_psi) > rep.tau_delta;
  if (d4 && rep.two_jet_norm > rep.tau_jet)
    fail(Errc::no_focal_offset, "focal 2-jet of psi failed to vanish at p");
  rep.d4_label = !d4 ? D4Label::not_d4
                     : (rep.delta_psi > 0.0 ? D4Label::d4_positive : D4Label::d4_negative);
  rep.ridge_consistency = (rep.ridge_order == -1) == d4;
  return rep;
}

// --- strongly adapted charts ---------------------------------------------------

namespace {

// Source of a second-kind chart reparametrized by the axis-preserving shear
// (u, v) -> (u + c v, v). The recharted map and the transported unit normal
// are produced by jet composition; the u-axis stays the singular curve, so
// the result can be recharted with the identity chart.
class ShearedChartSurface final : public JetSurface {
 public:
  ShearedChartSurface(AdaptedChart chart, double c) : chart_(std::move(chart)), c_(c) {}

  Vec3Jet map_jet(Vec2 base, int order) const override {
    return compose(chart_.map_jet(pre(base), order), shear_jet(base, order));
  }
  bool has_normal_seed() const override { return true; }
  Vec3Jet normal_seed_jet(Vec2 base, int order) const override {
    return compose(chart_.normal_jet(pre(base), order), shear_jet(base, order));
  }
  bool declared_adapted() const override { return true; }
  bool fitted_adapted() const override { return true; }

 private:
  Vec2 pre(Vec2 q) const { return {q.u + c_ * q.v, q.v}; }
  ChartJet shear_jet(Vec2 base, int order) const {
    return {ScalarJet::variable_u(base, order) + ScalarJet::variable_v(base, order) * c_,
            ScalarJet::variable_v(base, order)};
  }

  AdaptedChart chart_;
  double c_;
};

}  // namespace

AdaptedChart strongly_adapted_chart(const AdaptedChart& chart) {
  if (chart.kind() != ChartKind::second)
    fail(Errc::wrong_kind, "strong adaptation applies to second-kind adapted charts");
  const Vec3Jet g = chart.map_jet({0.0, 0.0}, 2);
  const Vec3 gv = g.coeff(0, 1);
  const Vec3 guu = g.coeff(2, 0);
  const Vec3 guv = g.coeff(1, 1);
  const double denom = dot(guu, gv);
  const double scale = std::max(g.max_abs_coeff() * g.max_abs_coeff(), kTinyScale);
  if (std::abs(denom) <= 1e-9 * scale)
    fail(Errc::degenerate_point,
         "strong adaptation needs <g_uu, g_v>(0) != 0 (admissible origin)");
  const double c = -dot(guv, gv) / denom;
  return AdaptedChart::identity(std::make_shared<ShearedChartSurface>(chart, c));
}

}  // namespace frontgeo
