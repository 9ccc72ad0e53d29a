// SPDX-License-Identifier: Apache-2.0
#include "frontgeo/classify.hpp"

#include <algorithm>
#include <cmath>

namespace frontgeo {

namespace {

ScalarJet dot_const(const Vec3& a, const Vec3Jet& b) {
  return b.x * a.x + b.y * a.y + b.z * a.z;
}

ScalarJet directional(const EtaField& eta, const ScalarJet& s) {
  return eta.u * s.deriv_u() + eta.v * s.deriv_v();
}

double lambda_scale(const ScalarJet& lam) {
  return std::max(lam.max_abs_coeff(), 1e-12);
}

}  // namespace

const char* to_string(SingularLabel label) {
  switch (label) {
    case SingularLabel::cuspidal_edge: return "cuspidal-edge";
    case SingularLabel::swallowtail: return "swallowtail";
    case SingularLabel::cuspidal_butterfly: return "cuspidal-butterfly";
    case SingularLabel::cuspidal_lips: return "cuspidal-lips";
    case SingularLabel::cuspidal_beaks: return "cuspidal-beaks";
    case SingularLabel::unresolved: return "unresolved";
    case SingularLabel::unsupported_corank_2: return "unsupported-corank-2";
  }
  return "unresolved";
}

const char* to_string(SingularKind kind) {
  switch (kind) {
    case SingularKind::first: return "first";
    case SingularKind::second: return "second";
    case SingularKind::degenerate: return "degenerate";
    case SingularKind::corank_two: return "corank-2";
  }
  return "first";
}

EtaField eta_field(const JetSurface& f, Vec2 p, int order, double basis_angle) {
  if (!f.has_normal_seed())
    fail(Errc::normal_unavailable, "kernel extension needs a unit normal at the base point");
  const int ord = std::min(order, kMaxJetOrder - 1);
  const Vec3Jet j = f.map_jet(p, ord + 1);
  const Vec3Jet fu = j.deriv_u(), fv = j.deriv_v();

  const Vec3 seed = f.normal_seed_jet(p, 0).value();
  const double sn = seed.norm();
  if (sn <= 1e-14) fail(Errc::normal_unavailable, "normal seed vanishes at the base point");
  const Vec3 n0{seed.x / sn, seed.y / sn, seed.z / sn};

  // Orthonormal basis of the tangent plane n0^perp, rotated by basis_angle.
  const Vec3 ax[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  int pick = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(dot(n0, ax[k])) < std::abs(dot(n0, ax[pick]))) pick = k;
  Vec3 e1 = cross(n0, ax[pick]);
  const double e1n = e1.norm();
  e1 = {e1.x / e1n, e1.y / e1n, e1.z / e1n};
  Vec3 e2 = cross(n0, e1);
  const double c = std::cos(basis_angle), s = std::sin(basis_angle);
  const Vec3 b1{c * e1.x + s * e2.x, c * e1.y + s * e2.y, c * e1.z + s * e2.z};
  const Vec3 b2{-s * e1.x + c * e2.x, -s * e1.y + c * e2.y, -s * e1.z + c * e2.z};

  // Projected Jacobian B = [<b_i, f_u>, <b_i, f_v>]; its adjugate columns
  // span ker df where det B (a multiple of lambda) vanishes.
  const ScalarJet B11 = dot_const(b1, fu), B12 = dot_const(b1, fv);
  const ScalarJet B21 = dot_const(b2, fu), B22 = dot_const(b2, fv);

  EtaField c1{B22, -B21};
  EtaField c2{-B12, B11};
  const double n1 = c1.value().norm(), n2 = c2.value().norm();
  EtaField eta = (n1 >= n2) ? c1 : c2;
  const double nn = std::max(n1, n2);
  const double coeff_scale = std::max({B11.max_abs_coeff(), B12.max_abs_coeff(),
                                       B21.max_abs_coeff(), B22.max_abs_coeff(), 1e-12});
  if (nn <= 1e-10 * coeff_scale)
    fail(Errc::degenerate_point, "projected Jacobian vanishes: corank 2 at the base point");
  eta.u = eta.u * (1.0 / nn);
  eta.v = eta.v * (1.0 / nn);
  return eta;
}

SingularLabel label_from_density(const ScalarJet& lambda, const EtaField& eta,
                                 bool degenerate, ClassifyEvidence& ev, double vanish_tol) {
  ev.scale = lambda_scale(lambda);
  const double tol = vanish_tol * ev.scale;

  const ScalarJet lu = lambda.deriv_u(), lv = lambda.deriv_v();
  ev.grad_norm = std::hypot(lu.value(), lv.value());
  ev.hessian_det = lu.deriv_u().value() * lv.deriv_v().value() -
                   lu.deriv_v().value() * lu.deriv_v().value();

  const ScalarJet d1 = directional(eta, lambda);
  const ScalarJet d2 = directional(eta, d1);
  const ScalarJet d3 = directional(eta, d2);
  ev.eta_lambda = d1.value();
  ev.eta_eta_lambda = d2.value();
  ev.eta_eta_eta_lambda = d3.value();

  if (!degenerate) {
    if (std::abs(ev.eta_lambda) > tol) return SingularLabel::cuspidal_edge;
    if (std::abs(ev.eta_eta_lambda) > tol) return SingularLabel::swallowtail;
    if (std::abs(ev.eta_eta_eta_lambda) > tol) return SingularLabel::cuspidal_butterfly;
    return SingularLabel::unresolved;
  }
  const double hess_tol = vanish_tol * ev.scale * ev.scale;
  if (ev.hessian_det > hess_tol) return SingularLabel::cuspidal_lips;
  if (std::abs(ev.eta_eta_lambda) > tol && ev.hessian_det < -hess_tol)
    return SingularLabel::cuspidal_beaks;
  return SingularLabel::unresolved;
}

SingularPointReport classify_singular_point(std::shared_ptr<const JetSurface> f, Vec2 p,
                                            const ClassifyOptions& opt) {
  SingularPointReport r;
  r.location = p;
  r.corank = corank(*f, p);
  if (r.corank == 0) fail(Errc::not_singular, "classification point is not a singular point");
  if (r.corank >= 2) {
    r.kind = SingularKind::corank_two;
    r.label = SingularLabel::unsupported_corank_2;
    r.admissible = false;
    r.front = false;
    return r;
  }

  const auto field = make_density_field(f, p);
  const ScalarJet lam = field->jet(p, 4);
  const double scale = lambda_scale(lam);
  if (std::abs(lam.value()) > kOnCurveTol * scale)
    fail(Errc::not_singular, "classification point is off the singular set");

  const EtaField eta = eta_field(*f, p, 3, opt.basis_angle);
  r.front = is_front_point(*f, p);

  const double gu = lam.deriv_u().value(), gv = lam.deriv_v().value();
  const bool degenerate = std::hypot(gu, gv) <= opt.vanish_tol * scale;
  r.label = label_from_density(lam, eta, degenerate, r.evidence, opt.vanish_tol);

  const double tol = opt.vanish_tol * scale;
  if (degenerate) {
    r.kind = SingularKind::degenerate;
    r.admissible = false;
  } else if (std::abs(r.evidence.eta_lambda) > tol) {
    r.kind = SingularKind::first;
    r.admissible = true;
  } else {
    r.kind = SingularKind::second;
    r.admissible = false;
    // Second kind is admissible iff nearby points of S(f) are of the first
    // kind: probe eta lambda a short arc away on both sides.
    const Vec2 t{-gv / std::hypot(gu, gv), gu / std::hypot(gu, gv)};
    for (double side : {1.0, -1.0}) {
      const Vec2 x0{p.u + side * opt.probe_step * t.u, p.v + side * opt.probe_step * t.v};
      const auto proj = project_to_zero(*field, x0, kTraceTol, 40);
      if (!proj) continue;
      const ScalarJet lam1 = field->jet(*proj, 1);
      const EtaField eta1 = eta_field(*f, *proj, 1, opt.basis_angle);
      const double g = eta1.u.value() * lam1.deriv_u().value() +
                       eta1.v.value() * lam1.deriv_v().value();
      if (std::abs(g) > tol) r.admissible = true;
    }
  }

  // The lambda-pattern criteria identify A-types of fronts only.
  if (!r.front) r.label = SingularLabel::unresolved;
  return r;
}

Vec2 locate_degenerate_point(std::shared_ptr<const JetSurface> f, Vec2 seed, int max_iter) {
  const auto field = make_density_field(f, seed);
  Vec2 x = seed;
  double scale = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const ScalarJet lam = field->jet(x, 3);
    scale = lambda_scale(lam);
    const double gu = lam.deriv_u().value(), gv = lam.deriv_v().value();
    if (std::hypot(gu, gv) <= 1e-12 * scale) break;
    const double huu = lam.deriv_u().deriv_u().value();
    const double huv = lam.deriv_u().deriv_v().value();
    const double hvv = lam.deriv_v().deriv_v().value();
    const double det = huu * hvv - huv * huv;
    if (std::abs(det) <= 1e-14 * scale * scale)
      fail(Errc::degenerate_seed, "singular Hessian while locating a degenerate point");
    const Vec2 step{(-gu * hvv + gv * huv) / det, (-gv * huu + gu * huv) / det};
    x = {x.u + step.u, x.v + step.v};
    if (step.norm() <= 1e-13 * (1.0 + x.norm())) break;
  }
  const ScalarJet fin = field->jet(x, 1);
  if (std::hypot(fin.deriv_u().value(), fin.deriv_v().value()) > 1e-8 * scale ||
      std::abs(fin.value()) > kOnCurveTol * scale)
    fail(Errc::degenerate_seed, "no degenerate singular point near the seed");
  return x;
}

std::vector<Vec2> locate_eta_lambda_zeros(std::shared_ptr<const JetSurface> f,
                                          const TracedCurve& curve) {
  std::vector<Vec2> zeros;
  if (curve.size() < 2) return zeros;
  const auto field = make_density_field(f, curve.at(0).q);

  const auto eta_lambda_at = [&](Vec2 q, Vec2 align) {
    const ScalarJet lam = field->jet(q, 1);
    Vec2 e = eta_field(*f, q, 1).value();
    if (e.u * align.u + e.v * align.v < 0.0) e = -e;
    return e.u * lam.deriv_u().value() + e.v * lam.deriv_v().value();
  };

  // Sample g = <eta, grad lambda> with a sign-continuous eta along the curve.
  std::vector<double> g(static_cast<size_t>(curve.size()));
  std::vector<Vec2> etas(static_cast<size_t>(curve.size()));
  Vec2 prev = curve.at(0).eta;
  double scale = 1.0;
  for (int k = 0; k < curve.size(); ++k) {
    Vec2 e = curve.at(k).eta;
    if (e.u * prev.u + e.v * prev.v < 0.0) e = -e;
    prev = e;
    etas[static_cast<size_t>(k)] = e;
    const ScalarJet lam = field->jet(curve.at(k).q, 1);
    scale = std::max(scale, lambda_scale(lam));
    g[static_cast<size_t>(k)] = e.u * lam.deriv_u().value() + e.v * lam.deriv_v().value();
  }
  const double exact_tol = 1e-11 * scale;

  struct Hit {
    int k;
    Vec2 q;
  };
  std::vector<Hit> hits;

  // Exact hits at sample points.
  for (int k = 0; k < curve.size(); ++k)
    if (std::abs(g[static_cast<size_t>(k)]) <= exact_tol) hits.push_back({k, curve.at(k).q});

  // Odd-order zeros: bracketed sign changes, refined by bisection-guarded
  // secant steps with reprojection onto S(f).
  for (int k = 0; k + 1 < curve.size(); ++k) {
    const double gk = g[static_cast<size_t>(k)], gk1 = g[static_cast<size_t>(k) + 1];
    if (std::abs(gk) <= exact_tol || std::abs(gk1) <= exact_tol) continue;
    if (gk * gk1 >= 0.0) continue;
    Vec2 a = curve.at(k).q, b = curve.at(k + 1).q;
    double ga = gk, gb = gk1;
    Vec2 best = a;
    for (int it = 0; it < 30 && std::abs(gb - ga) > 0.0; ++it) {
      const double w = std::clamp(ga / (ga - gb), 0.05, 0.95);
      Vec2 m{a.u + w * (b.u - a.u), a.v + w * (b.v - a.v)};
      if (const auto proj = project_to_zero(*field, m, kTraceTol, 40)) m = *proj;
      const double gm = eta_lambda_at(m, etas[static_cast<size_t>(k)]);
      best = m;
      if (std::abs(gm) <= exact_tol) break;
      if (gm * ga > 0.0) {
        a = m;
        ga = gm;
      } else {
        b = m;
        gb = gm;
      }
    }
    hits.push_back({k, best});
  }

  // Even-order zeros (butterfly candidates) show up as dips of |g| without a
  // sign change: refine by the vertex of the parabola through three samples
  // and keep the point only when g actually collapses there.
  for (int k = 1; k + 1 < curve.size(); ++k) {
    const double gm1 = g[static_cast<size_t>(k) - 1], g0 = g[static_cast<size_t>(k)],
                 gp1 = g[static_cast<size_t>(k) + 1];
    if (std::abs(g0) <= exact_tol) continue;  // already recorded
    if (gm1 * gp1 <= 0.0) continue;           // handled by the sign-change pass
    if (!(std::abs(g0) < std::abs(gm1) && std::abs(g0) < std::abs(gp1))) continue;
    const double denom = gm1 - 2.0 * g0 + gp1;
    if (std::abs(denom) <= 0.0) continue;
    const double delta = std::clamp(0.5 * (gm1 - gp1) / denom, -1.0, 1.0);
    const Vec2 qa = curve.at(k).q;
    const Vec2 qb = delta >= 0.0 ? curve.at(k + 1).q : curve.at(k - 1).q;
    const double w = std::abs(delta);
    Vec2 m{qa.u + w * (qb.u - qa.u), qa.v + w * (qb.v - qa.v)};
    if (const auto proj = project_to_zero(*field, m, kTraceTol, 40)) m = *proj;
    const double gm = eta_lambda_at(m, etas[static_cast<size_t>(k)]);
    if (std::abs(gm) <= 1e-3 * std::abs(g0)) hits.push_back({k, m});
  }

  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.k < b.k; });
  for (const Hit& h : hits)
    if (zeros.empty() || (h.q - zeros.back()).norm() > 2.0 * curve.step) zeros.push_back(h.q);
  return zeros;
}

}  // namespace frontgeo
