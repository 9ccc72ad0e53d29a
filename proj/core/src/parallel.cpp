// SPDX-License-Identifier: Apache-2.0
#include "frontgeo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "frontgeo/errors.hpp"

namespace frontgeo {

namespace {

constexpr double kTinyScale = 1e-12;
// A projected singular point farther than this fraction of the window
// diameter from the seed means "no singular set nearby" for CPC tracing.
constexpr double kCpcChartRadius = 0.35;

}  // namespace

// --- offset surface -----------------------------------------------------------

ParallelSurface::ParallelSurface(std::shared_ptr<const JetSurface> f, double t)
    : f_(std::move(f)), t_(t) {
  if (!f_ || !f_->has_normal_seed())
    fail(Errc::normal_unavailable, "parallel surface needs a normal seed on the base surface");
}

Vec3Jet ParallelSurface::map_jet(Vec2 base, int order) const {
  Vec3Jet j = f_->map_jet(base, order);
  Vec3Jet nu = normalized(f_->normal_seed_jet(base, order));
  return j + nu * t_;
}

Vec3Jet ParallelSurface::normal_seed_jet(Vec2 base, int order) const {
  return f_->normal_seed_jet(base, order);
}

bool ParallelSurface::orientation_flipped() const { return f_->orientation_flipped(); }

Vec3Jet parallel_jet(std::shared_ptr<const JetSurface> f, double t, Vec2 base, int order) {
  return ParallelSurface(std::move(f), t).map_jet(base, order);
}

// --- singular point of the offset ---------------------------------------------

namespace {

struct ChartAt {
  AdaptedChart chart;
  Vec2 q;  // chart coordinates of the requested source point
};

// Adapted chart through the singular curve of f at p: the identity chart for
// declared-adapted surfaces, a traced-and-straightened chart otherwise.
ChartAt chart_through(std::shared_ptr<const JetSurface> f, Vec2 p, const ParallelOptions& opt) {
  if (f->declared_adapted()) return {AdaptedChart::identity(f), p};
  TracedCurve curve = trace_singular_curve(f, p, opt.window, opt.trace_step);
  return {AdaptedChart::from_curve(f, curve, p), Vec2{0.0, 0.0}};
}

// Push a chart-coordinate direction to source coordinates (finite differences
// of the chart map; exact for the affine charts produced by from_curve).
Vec2 chart_dir_to_source(const AdaptedChart& chart, Vec2 q, Vec2 d) {
  if (chart.is_identity()) return d;
  const double tau = 1e-4;
  Vec2 plus = chart.source_point({q.u + tau * d.u, q.v + tau * d.v});
  Vec2 minus = chart.source_point({q.u - tau * d.u, q.v - tau * d.v});
  return (plus - minus) * (0.5 / tau);
}

}  // namespace

ParallelReport parallel_singularity(std::shared_ptr<const JetSurface> f, Vec2 p,
                                    const ParallelOptions& opt) {
  auto density = make_density_field(f, p);
  const double lscale = std::max(density->scale(p), kTinyScale);
  if (std::abs(density->jet(p, 0).value()) > kOnCurveTol * lscale)
    fail(Errc::not_singular, "parallel classification needs a singular point of the base");
  if (corank(*f, p) >= 2)
    fail(Errc::corank_two, "parallel classification needs a corank-1 singular point");

  ChartAt ca = chart_through(f, p, opt);
  BoundedBranch bb = bounded_branch(ca.chart, ca.q);
  if (!bb.exists)
    fail(Errc::no_bounded_branch, "no bounded principal branch at the point (frontal, not front)");
  const double kscale = std::max(bb.jet.max_abs_coeff(), kTinyScale);
  if (std::abs(bb.value) <= opt.vanish_tol * kscale)
    fail(Errc::no_focal_offset, "kappa_+(p) = 0: the offset surface is regular for every t");

  ParallelReport rep;
  rep.point = p;
  rep.kappa_plus = bb.value;
  rep.t = 1.0 / bb.value;

  const Vec2 grad = bb.jet.gradient();
  rep.degenerate = grad.norm() <= opt.vanish_tol * kscale;
  rep.hessian_det = bb.jet.d(2, 0) * bb.jet.d(0, 2) - bb.jet.d(1, 1) * bb.jet.d(1, 1);

  RidgeData rd = ridge_data(ca.chart, ca.q);
  rep.ridge_order = rd.order;

  auto offset_surface = std::make_shared<ParallelSurface>(f, rep.t);
  rep.parallel_rank = 2 - corank(*offset_surface, p);

  // Route 1: ridge order of the bounded branch of f at p.
  const double hess_tol = opt.vanish_tol * kscale;
  if (!rep.degenerate) {
    switch (rd.order) {
      case -1: rep.label_from_ridge = SingularLabel::cuspidal_edge; break;
      case 0: rep.label_from_ridge = SingularLabel::swallowtail; break;
      case 1: rep.label_from_ridge = SingularLabel::cuspidal_butterfly; break;
      default: rep.label_from_ridge = SingularLabel::unresolved; break;
    }
  } else if (rep.parallel_rank == 1 && rep.hessian_det > hess_tol) {
    rep.label_from_ridge = SingularLabel::cuspidal_lips;
  } else if (rep.parallel_rank == 1 && rd.order == 0 && rep.hessian_det < -hess_tol) {
    rep.label_from_ridge = SingularLabel::cuspidal_beaks;
  } else {
    rep.label_from_ridge = SingularLabel::unresolved;
  }

  // Route 2: vanishing-pattern criteria applied to the surrogate density
  // kappa_+ - kappa_+(p) along the (normalized) principal vector field,
  // which extends the null field of the offset surface.
  const double pvnorm = bb.pv.norm();
  if (pvnorm > kTinyScale) {
    ScalarJet lamhat = bb.jet - bb.value;
    EtaField eta;
    eta.u = bb.pv_u * (1.0 / pvnorm);
    eta.v = bb.pv_v * (1.0 / pvnorm);
    rep.label_from_criteria =
        label_from_density(lamhat, eta, rep.degenerate, rep.criteria_evidence, opt.vanish_tol);
    if (rep.degenerate && rep.parallel_rank != 1)
      rep.label_from_criteria = SingularLabel::unresolved;
  }

  if (rep.label_from_ridge == SingularLabel::cuspidal_edge &&
      rep.label_from_criteria == SingularLabel::cuspidal_edge) {
    rep.edge = parallel_edge_invariants(f, p, rep.t, opt);
    rep.edge_defined = true;
  }
  return rep;
}

EdgeInvariants parallel_edge_invariants(std::shared_ptr<const JetSurface> f, Vec2 p,
                                        double t, const ParallelOptions& opt) {
  auto offset_surface = std::make_shared<ParallelSurface>(f, t);
  AreaDensityField density(offset_surface);
  const double lscale = std::max(density.scale(p), kTinyScale);
  if (std::abs(density.jet(p, 0).value()) > kOnCurveTol * lscale)
    fail(Errc::not_singular, "p is not singular for the offset surface (t must be 1/kappa_+(p))");
  SingularPointReport cl = classify_singular_point(offset_surface, p);
  if (cl.label != SingularLabel::cuspidal_edge)
    fail(Errc::wrong_parallel_type, "offset-surface singularity at p is not a cuspidal edge");
  TracedCurve curve = trace_singular_curve(offset_surface, p, opt.window, opt.trace_step);
  AdaptedChart chart = AdaptedChart::from_curve(offset_surface, curve, p);
  EdgeInvariants inv = edge_invariants(chart, {0.0, 0.0});

  const Vec2 dlam = density.jet(p, 1).gradient();  // offset density gradient, source coords

  // The directional-torsion formula assumes a positively adapted chart (offset
  // density increasing with the chart's V coordinate); the fitted chart may
  // come out negatively adapted, which flips kappa_t only.
  const Vec2 wv_src = chart_dir_to_source(chart, {0.0, 0.0}, {0.0, 1.0});
  if (dot(dlam, wv_src) < 0.0) inv.kappa_t = -inv.kappa_t;

  // Singular-curvature convention for offset edges: the null side is fixed by
  // the canonical bounded-branch principal field of the base surface instead
  // of being orientation-coupled to the curve direction. Relative to the
  // coupled value this flips the sign by -sgn(dlambda^t(pv)) when the offset
  // singular curve is a graph over the chart's v axis, and by +sgn(...) in the
  // reparametrized (graph over u) case. Only defined where the base surface is
  // itself singular, which is where the canonical principal field lives.
  auto base_density = make_density_field(f, p);
  const double bscale = std::max(base_density->scale(p), kTinyScale);
  if (std::abs(base_density->jet(p, 0).value()) <= kOnCurveTol * bscale && corank(*f, p) == 1) {
    ChartAt ca = chart_through(f, p, opt);
    BoundedBranch bb = bounded_branch(ca.chart, ca.q);
    if (bb.exists) {
      const double kscale = std::max(bb.jet.max_abs_coeff(), kTinyScale);
      const bool graph_over_v = std::abs(bb.jet.d(1, 0)) > opt.vanish_tol * kscale;
      const Vec2 pv_src = chart_dir_to_source(ca.chart, ca.q, bb.pv);
      const double dl = dot(dlam, pv_src);
      if (dl != 0.0) {
        const double s = dl < 0.0 ? -1.0 : 1.0;
        inv.kappa_s *= graph_over_v ? -s : s;
      }
    }
  }
  return inv;
}

// --- CPC lines ------------------------------------------------------------------

namespace {

// kappa_+ - c evaluated through an adapted chart (valid across the singular
// curve, where the raw principal curvatures blow up).
class BranchLevelField : public TraceField {
 public:
  BranchLevelField(AdaptedChart chart, double c) : chart_(std::move(chart)), c_(c) {}

  ScalarJet jet(Vec2 q, int order) const override {
    BoundedBranch bb = bounded_branch(chart_, q, std::max(order, 2));
    if (!bb.exists)
      fail(Errc::no_bounded_branch, "bounded principal branch lost along the CPC line");
    return bb.jet - c_;
  }

  double scale(Vec2 q) const override {
    return std::abs(c_) + bounded_branch(chart_, q, 1).jet.max_abs_coeff();
  }

 private:
  AdaptedChart chart_;
  double c_;
};

// Principal-curvature branch closer to c, from the raw fundamental forms of a
// regular surface; near-umbilic discriminants collapse to the mean curvature.
class RegularBranchField : public TraceField {
 public:
  RegularBranchField(std::shared_ptr<const JetSurface> f, double c) : f_(std::move(f)), c_(c) {}

  ScalarJet jet(Vec2 q, int order) const override {
    const int m = std::max(order, 1);
    Vec3Jet j = f_->map_jet(q, std::min(m + 2, kMaxJetOrder));
    Vec3Jet fu = j.deriv_u();
    Vec3Jet fv = j.deriv_v();
    Vec3Jet nu;
    if (f_->has_normal_seed()) {
      nu = normalized(f_->normal_seed_jet(q, std::min(m + 1, kMaxJetOrder)));
    } else {
      nu = normalized(cross(fu, fv));
      if (f_->orientation_flipped()) nu = -nu;
    }
    Vec3Jet nuu = nu.deriv_u();
    Vec3Jet nuv = nu.deriv_v();
    ScalarJet E = dot(fu, fu), F = dot(fu, fv), G = dot(fv, fv);
    ScalarJet L = -dot(nuu, fu), M = -dot(nuu, fv), N = -dot(nuv, fv);
    ScalarJet W = E * G - F * F;  // positive at regular points
    ScalarJet K = (L * N - M * M) / W;
    ScalarJet H = (E * N - F * M * 2.0 + G * L) / (W * 2.0);
    ScalarJet disc = H * H - K;
    const double dscale = std::max({H.value() * H.value(), std::abs(K.value()), kTinyScale});
    if (disc.value() <= 1e-12 * dscale) return H - c_;  // double root: umbilic
    ScalarJet root_gap = disc.sqrt();
    const bool take_plus =
        std::abs(H.value() + root_gap.value() - c_) <= std::abs(H.value() - root_gap.value() - c_);
    return (take_plus ? H + root_gap : H - root_gap) - c_;
  }

  double scale(Vec2 /*q*/) const override { return std::abs(c_) + 1.0; }

 private:
  std::shared_ptr<const JetSurface> f_;
  double c_;
};

// Invert chart.source_point by Newton with a finite-difference Jacobian.
Vec2 invert_chart(const AdaptedChart& chart, Vec2 target, Vec2 start) {
  if (chart.is_identity()) return target;
  Vec2 q = start;
  const double tau = 1e-5;
  for (int it = 0; it < 30; ++it) {
    Vec2 r = chart.source_point(q) - target;
    if (r.norm() <= 1e-12 * (1.0 + target.norm())) return q;
    Vec2 cu = (chart.source_point({q.u + tau, q.v}) - chart.source_point({q.u - tau, q.v})) *
              (0.5 / tau);
    Vec2 cv = (chart.source_point({q.u, q.v + tau}) - chart.source_point({q.u, q.v - tau})) *
              (0.5 / tau);
    const double d = det(cu, cv);
    if (std::abs(d) < kTinyScale) break;
    q = q - Vec2{(r.u * cv.v - r.v * cv.u) / d, (cu.u * r.v - cu.v * r.u) / d};
  }
  fail(Errc::straighten_failed, "could not express the seed in chart coordinates");
}

CpcPolyline trace_branch_level(const TraceField& field, Vec2 start, const Window& win, double h,
                               double c, const AdaptedChart* chart) {
  std::optional<Vec2> on_level = project_to_zero(field, start, kTraceTol, 40);
  if (!on_level) fail(Errc::nothing_found, "no kappa_+ = c point near the seed");
  TracedCurve curve;
  try {
    curve = trace_level_curve(field, *on_level, win, h);
  } catch (const Error& err) {
    if (err.code() == Errc::degenerate_seed)
      fail(Errc::cpc_critical_seed, "d kappa_+ vanishes at the seed: CPC through a critical point");
    throw;
  }
  CpcPolyline out;
  out.value = c;
  out.closed = curve.closed;
  out.step = curve.step;
  out.points.reserve(static_cast<size_t>(curve.size()));
  for (const CurvePoint& cp : curve.pts)
    out.points.push_back(chart ? chart->source_point(cp.q) : cp.q);
  return out;
}

}  // namespace

CpcPolyline trace_cpc(std::shared_ptr<const JetSurface> f, double c, Vec2 seed,
                      const Window& win, double h) {
  // Decide between the adapted-chart branch (singular set near the seed) and
  // the raw principal branch (regular neighbourhood).
  std::optional<Vec2> on_singular;
  if (corank(*f, seed) >= 1) {
    on_singular = seed;
  } else {
    auto density = make_density_field(f, seed);
    std::optional<Vec2> proj = project_to_zero(*density, seed, kTraceTol, 40);
    if (proj && (*proj - seed).norm() <= kCpcChartRadius * win.diameter()) on_singular = proj;
  }

  if (!on_singular) {
    RegularBranchField field(f, c);
    return trace_branch_level(field, seed, win, h, c, nullptr);
  }

  AdaptedChart chart = f->declared_adapted()
                           ? AdaptedChart::identity(f)
                           : AdaptedChart::from_curve(
                                 f, trace_singular_curve(f, *on_singular, win, h), *on_singular);
  Vec2 q0 = invert_chart(chart, seed, {0.0, 0.0});
  BranchLevelField field(chart, c);
  return trace_branch_level(field, q0, win, h, c, &chart);
}

// --- landmarks --------------------------------------------------------------------

const char* to_string(LandmarkType type) {
  switch (type) {
    case LandmarkType::exactly_cusped: return "exactly-cusped";
    case LandmarkType::kappa_nu_extremum: return "kappa-nu-extremum";
    case LandmarkType::ridge: return "ridge";
  }
  return "unknown";
}

namespace {

struct LandmarkRow {
  bool ok = false;
  int k = 0;  // sample index on the curve
  Vec2 q{};
  double s = 0;
  Vec2 pv_src{};       // sign-continued principal direction, source coords
  double g_cusp = 0;   // eta kappa_+, sign-aligned with the traced null field
  double g_ext = 0;    // (kappa_+)_u, sign-aligned with the trace direction
  double g_ridge = 0;  // d kappa_+ along the (sign-continued) principal vector
};

struct ChannelValues {
  double g_cusp = 0, g_ext = 0, g_ridge = 0;
  Vec2 pv_src{};
};

// The three landmark crossing functions at a point of the singular curve.
// tangent_ref / eta_ref resolve the chart's reflection freedom; a nonzero
// pv_ref keeps the principal field sign-continuous between evaluations.
std::optional<ChannelValues> channel_values(const std::shared_ptr<const JetSurface>& f,
                                            const TracedCurve& curve,
                                            const AdaptedChart* identity, Vec2 qsrc,
                                            Vec2 tangent_ref, Vec2 eta_ref, Vec2 pv_ref) {
  try {
    std::optional<AdaptedChart> local;
    const AdaptedChart* chart = identity;
    Vec2 q{};
    if (identity != nullptr) {
      q = qsrc;
    } else {
      local = AdaptedChart::from_curve(f, curve, qsrc);
      chart = &*local;
    }
    BoundedBranch bb = bounded_branch(*chart, q);
    if (!bb.exists) return std::nullopt;

    // Chart axis directions in the source plane.
    Vec2 u_src{1.0, 0.0}, w_src{0.0, 1.0};
    if (!chart->is_identity()) {
      const double tau = 1e-4;
      const Vec2 base = chart->source_point(q);
      u_src = (chart->source_point({q.u + tau, q.v}) - base) * (1.0 / tau);
      w_src = (chart->source_point({q.u, q.v + tau}) - base) * (1.0 / tau);
    }
    const double su = dot(u_src, tangent_ref) >= 0 ? 1.0 : -1.0;
    const double sv = dot(w_src, eta_ref) >= 0 ? 1.0 : -1.0;

    const Vec2 grad = bb.jet.gradient();
    ChannelValues cv;
    cv.g_cusp = sv * grad.v;
    cv.g_ext = su * grad.u;

    Vec2 pv_src = u_src * bb.pv.u + w_src * bb.pv.v;
    pv_src = pv_src * (1.0 / std::max(pv_src.norm(), kTinyScale));
    double spv = 1.0;
    if (pv_ref.norm() > 0.5 && dot(pv_src, pv_ref) < 0) spv = -1.0;
    cv.pv_src = pv_src * spv;
    cv.g_ridge = spv * dot(bb.pv, grad) / std::max(bb.pv.norm(), kTinyScale);
    return cv;
  } catch (const Error&) {
    return std::nullopt;
  }
}

double kappa_s_at(std::shared_ptr<const JetSurface> f, const TracedCurve& curve, Vec2 q) {
  try {
    if (f->declared_adapted()) return edge_invariants(AdaptedChart::identity(f), q).kappa_s;
    AdaptedChart chart = AdaptedChart::from_curve(f, curve, q);
    return edge_invariants(chart, {0.0, 0.0}).kappa_s;
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

std::vector<Landmark> find_landmarks(std::shared_ptr<const JetSurface> f,
                                     const TracedCurve& curve, const LandmarkOptions& opt) {
  const int stride = std::max(opt.stride, 1);
  const bool adapted = f->declared_adapted();
  std::optional<AdaptedChart> identity;
  if (adapted) identity = AdaptedChart::identity(f);

  std::vector<LandmarkRow> rows;
  Vec2 prev_pv{};
  for (int k = 0; k < curve.size(); k += stride) {
    LandmarkRow row;
    row.k = k;
    row.q = curve.at(k).q;
    row.s = k * curve.step;
    auto cv = channel_values(f, curve, adapted ? &*identity : nullptr, row.q,
                             curve.at(k).tangent, curve.at(k).eta, prev_pv);
    if (cv) {
      row.g_cusp = cv->g_cusp;
      row.g_ext = cv->g_ext;
      row.g_ridge = cv->g_ridge;
      row.pv_src = cv->pv_src;
      prev_pv = cv->pv_src;
      row.ok = true;
    } else {
      prev_pv = Vec2{0.0, 0.0};
    }
    rows.push_back(row);
  }

  auto density = make_density_field(f, curve.at(curve.seed_index).q);
  std::vector<Landmark> found;
  auto scan = [&](LandmarkType type, auto value_of) {
    double gref = 0;
    for (const LandmarkRow& r : rows)
      if (r.ok) gref = std::max(gref, std::abs(value_of(r)));
    const double exact_tol = 1e-11 * std::max(gref, kTinyScale);
    auto emit = [&](Vec2 q, double s) {
      Landmark lm;
      lm.type = type;
      lm.q = q;
      if (auto proj = project_to_zero(*density, q)) lm.q = *proj;
      lm.s = s;
      lm.width = curve.step * stride;
      if (type == LandmarkType::exactly_cusped) lm.kappa_s = kappa_s_at(f, curve, lm.q);
      found.push_back(lm);
    };
    for (size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].ok) continue;
      const double ga = value_of(rows[i]);
      if (std::abs(ga) <= exact_tol) {
        emit(rows[i].q, rows[i].s);
        continue;
      }
      if (i + 1 >= rows.size() || !rows[i + 1].ok) continue;
      const double gb = value_of(rows[i + 1]);
      if (std::abs(gb) <= exact_tol || ga * gb >= 0) continue;

      // Bracketed crossing: polish by regula falsi on the channel evaluated
      // at reprojected points of the singular curve.
      const Vec2 qa = rows[i].q, qb = rows[i + 1].q;
      const Vec2 tangent_ref = curve.at(rows[i].k).tangent;
      const Vec2 eta_ref = curve.at(rows[i].k).eta;
      const Vec2 pv_ref = rows[i].pv_src;
      double wa = 0.0, wb = 1.0, fa = ga, fb = gb;
      double w = fa / (fa - fb);
      for (int it = 0; it < 8; ++it) {
        const double wc = wa + (wb - wa) * (fa / (fa - fb));
        Vec2 qc = qa + (qb - qa) * wc;
        if (auto proj = project_to_zero(*density, qc)) qc = *proj;
        auto cv = channel_values(f, curve, adapted ? &*identity : nullptr, qc, tangent_ref,
                                 eta_ref, pv_ref);
        if (!cv) break;
        double fc = 0;
        switch (type) {
          case LandmarkType::exactly_cusped: fc = cv->g_cusp; break;
          case LandmarkType::kappa_nu_extremum: fc = cv->g_ext; break;
          case LandmarkType::ridge: fc = cv->g_ridge; break;
        }
        w = wc;
        if (std::abs(fc) <= exact_tol) break;
        if (fa * fc < 0) {
          wb = wc;
          fb = fc;
        } else {
          wa = wc;
          fa = fc;
        }
      }
      emit(qa + (qb - qa) * w, rows[i].s + (rows[i + 1].s - rows[i].s) * w);
    }
  };
  scan(LandmarkType::exactly_cusped, [](const LandmarkRow& r) { return r.g_cusp; });
  scan(LandmarkType::kappa_nu_extremum, [](const LandmarkRow& r) { return r.g_ext; });
  scan(LandmarkType::ridge, [](const LandmarkRow& r) { return r.g_ridge; });
  std::sort(found.begin(), found.end(),
            [](const Landmark& a, const Landmark& b) { return a.s < b.s; });
  return found;
}

std::vector<int> detect_cusps(const std::vector<Vec3>& polyline) {
  std::vector<int> out;
  const int n = static_cast<int>(polyline.size());
  for (int i = 1; i + 1 < n; ++i) {
    const Vec3 a = polyline[static_cast<size_t>(i)] - polyline[static_cast<size_t>(i - 1)];
    const Vec3 b = polyline[static_cast<size_t>(i + 1)] - polyline[static_cast<size_t>(i)];
    const double na = a.norm(), nb = b.norm();
    if (na < kTinyScale || nb < kTinyScale) continue;
    if (dot(a, b) / (na * nb) < kCuspDotThreshold) out.push_back(i);
  }
  return out;
}

}  // namespace frontgeo
