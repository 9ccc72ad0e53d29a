// SPDX-License-Identifier: Apache-2.0
#include "frontgeo/chart.hpp"

#include <algorithm>
#include <cmath>

namespace frontgeo {

namespace {

// Thresholds below that mix field values with gradients assume parameter
// windows of order one, which the CLI and the model library guarantee.
constexpr double kPhiAxisSplit = 1e-4;   // |v| above which phi divides by v directly
constexpr double kFittedDivTol = 1e-5;   // relaxed divide_by_v tolerance in fitted charts
constexpr double kDegenerateGradTol = 1e-3;  // fast-path gradient bound, relative
constexpr double kScaleFloor = 1e-30;

int clamp_order(int order) { return std::clamp(order, 0, kMaxJetOrder); }

// Gram analysis of a pair of 3-vectors: singular values of the 3x2 matrix
// [a b] and the right-singular direction of the smaller one.
struct GramInfo {
  double s1 = 0.0;  // larger singular value
  double s2 = 0.0;  // smaller singular value
  Vec2 kernel;      // unit right-singular vector for s2
};

GramInfo gram_info(const Vec3& a, const Vec3& b) {
  const double paa = dot(a, a), pab = dot(a, b), pbb = dot(b, b);
  const double mean = 0.5 * (paa + pbb);
  const double disc = std::hypot(0.5 * (paa - pbb), pab);
  const double e1 = mean + disc;
  const double e2 = std::max(mean - disc, 0.0);
  GramInfo g;
  g.s1 = std::sqrt(std::max(e1, 0.0));
  g.s2 = std::sqrt(e2);
  // Eigenvector of the Gram matrix for e2: orthogonal to a row of G - e2 I.
  const Vec2 cand1{-pab, paa - e2};
  const Vec2 cand2{pbb - e2, -pab};
  Vec2 w = (cand1.norm() >= cand2.norm()) ? cand1 : cand2;
  const double n = w.norm();
  if (n < kScaleFloor) {
    w = {1.0, 0.0};  // isotropic Gram (regular umbilic-like or total collapse)
  } else {
    w = w * (1.0 / n);
  }
  if (w.v < -1e-12 || (std::abs(w.v) <= 1e-12 && w.u < 0.0)) w = -w;
  g.kernel = w;
  return g;
}

// Monomial coefficients c[k] s^k as a v-constant jet in (U, V) based at q.
ScalarJet poly1_jet(const std::vector<double>& c, Vec2 q, int order) {
  ScalarJet r = ScalarJet::constant(0.0, q, order);
  for (int i = 0; i <= order; ++i) {
    double acc = 0.0;
    // d^i/du^i sum c_k u^k = sum_{k>=i} c_k k!/(k-i)! u^{k-i}
    for (int k = static_cast<int>(c.size()) - 1; k >= i; --k) {
      double fall = 1.0;
      for (int m = 0; m < i; ++m) fall *= static_cast<double>(k - m);
      acc += c[static_cast<size_t>(k)] * fall * std::pow(q.u, k - i);
    }
    r.at(i, 0) = acc;
  }
  return r;
}

std::vector<double> poly1_deriv(const std::vector<double>& c) {
  std::vector<double> d;
  for (size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  return d;
}

Vec3Jet divide_vec3(const Vec3Jet& a, const ScalarJet& s) {
  return {a.x / s, a.y / s, a.z / s};
}

}  // namespace

double Window::diameter() const { return std::hypot(u1 - u0, v1 - v0); }

// --- density fields ----------------------------------------------------------

AreaDensityField::AreaDensityField(std::shared_ptr<const JetSurface> f) : f_(std::move(f)) {
  if (!f_->has_normal_seed())
    fail(Errc::normal_unavailable,
         "area density requires a surface with an explicit normal field");
}

ScalarJet AreaDensityField::jet(Vec2 q, int order) const {
  const int ord = clamp_order(order);
  const int map_ord = clamp_order(ord + 1);
  const Vec3Jet g = f_->map_jet(q, map_ord);
  const Vec3Jet nu = normalized(f_->normal_seed_jet(q, map_ord - 1));
  return triple(g.deriv_u(), g.deriv_v(), nu);
}

double AreaDensityField::scale(Vec2 q) const {
  const Vec3Jet g = f_->map_jet(q, 1);
  const double m = std::max(g.coeff(1, 0).norm(), g.coeff(0, 1).norm());
  return std::max(m * m, kScaleFloor);
}

SurrogateDensityField::SurrogateDensityField(std::shared_ptr<const JetSurface> f, Vec3 e)
    : f_(std::move(f)), e_(e) {
  const double n = e_.norm();
  if (n < kScaleFloor)
    fail(Errc::normal_unavailable, "surrogate density requires a nonzero reference vector");
  e_ = e_ * (1.0 / n);
}

ScalarJet SurrogateDensityField::jet(Vec2 q, int order) const {
  const int ord = clamp_order(order);
  const int map_ord = clamp_order(ord + 1);
  const Vec3Jet g = f_->map_jet(q, map_ord);
  const Vec3Jet e = {ScalarJet::constant(e_.x, q, map_ord - 1),
                     ScalarJet::constant(e_.y, q, map_ord - 1),
                     ScalarJet::constant(e_.z, q, map_ord - 1)};
  return triple(g.deriv_u(), g.deriv_v(), e);
}

double SurrogateDensityField::scale(Vec2 q) const {
  const Vec3Jet g = f_->map_jet(q, 1);
  const double m = std::max(g.coeff(1, 0).norm(), g.coeff(0, 1).norm());
  return std::max(m * m, kScaleFloor);
}

std::unique_ptr<TraceField> make_density_field(std::shared_ptr<const JetSurface> f, Vec2 hint) {
  if (f->has_normal_seed()) return std::make_unique<AreaDensityField>(std::move(f));
  // Sample rings around the hint for the most regular point and use its
  // (normalized) cross product as a fixed reference direction.
  Vec3 best;
  double best_quality = 0.0;
  for (double r : {0.05, 0.1, 0.2, 0.4}) {
    for (int k = 0; k < 8; ++k) {
      const double a = 2.0 * M_PI * (static_cast<double>(k) + 0.5) / 8.0;
      const Vec2 q{hint.u + r * std::cos(a), hint.v + r * std::sin(a)};
      const Vec3Jet g = f->map_jet(q, 1);
      const Vec3 fu = g.coeff(1, 0), fv = g.coeff(0, 1);
      const Vec3 cr = cross(fu, fv);
      const double denom = std::max(fu.norm() * fv.norm(), kScaleFloor);
      const double quality = cr.norm() / denom;
      if (quality > best_quality) {
        best_quality = quality;
        best = cr;
      }
    }
  }
  if (best_quality < 1e-3)
    fail(Errc::normal_unavailable,
         "no regular point near the seed to sample a reference normal from");
  return std::make_unique<SurrogateDensityField>(std::move(f), best);
}

// --- pointwise queries -------------------------------------------------------

int corank(const JetSurface& f, Vec2 q, double tol) {
  const Vec3Jet g = f.map_jet(q, 1);
  const GramInfo gi = gram_info(g.coeff(1, 0), g.coeff(0, 1));
  const double thresh = tol * (1.0 + gi.s1);
  if (gi.s1 <= thresh) return 2;
  return gi.s2 <= thresh ? 1 : 0;
}

Vec2 null_direction(const JetSurface& f, Vec2 q, double tol) {
  const Vec3Jet g = f.map_jet(q, 1);
  const GramInfo gi = gram_info(g.coeff(1, 0), g.coeff(0, 1));
  const double thresh = tol * (1.0 + gi.s1);
  if (gi.s1 <= thresh) fail(Errc::corank_two, "null direction undefined: df vanishes");
  if (gi.s2 > thresh) fail(Errc::not_singular, "null direction undefined: df has full rank");
  return gi.kernel;
}

bool is_front_point(const Vec3Jet& f1, const Vec3Jet& nu1, double tol) {
  // Rank of the stacked 6x2 Jacobian of (f, nu) through its 2x2 Gram matrix.
  const Vec3 fu = f1.coeff(1, 0), fv = f1.coeff(0, 1);
  const Vec3 nu = nu1.coeff(1, 0), nv = nu1.coeff(0, 1);
  const double paa = dot(fu, fu) + dot(nu, nu);
  const double pab = dot(fu, fv) + dot(nu, nv);
  const double pbb = dot(fv, fv) + dot(nv, nv);
  const double mean = 0.5 * (paa + pbb);
  const double disc = std::hypot(0.5 * (paa - pbb), pab);
  const double s1 = std::sqrt(std::max(mean + disc, 0.0));
  const double s2 = std::sqrt(std::max(mean - disc, 0.0));
  return s2 > tol * (1.0 + s1);
}

bool is_front_point(const JetSurface& f, Vec2 q, double tol) {
  if (!f.has_normal_seed())
    fail(Errc::normal_unavailable, "front test requires an explicit normal field");
  const Vec3Jet f1 = f.map_jet(q, 1);
  const Vec3Jet nu1 = normalized(f.normal_seed_jet(q, 1));
  return is_front_point(f1, nu1, tol);
}

// --- root finding and tracing ------------------------------------------------

std::optional<Vec2> project_to_zero(const TraceField& field, Vec2 q, double tol, int max_iter) {
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const ScalarJet j = field.jet(q, 1);
    const double val = j.value();
    const double s = field.scale(q);
    if (std::abs(val) <= tol * s) return q;
    const Vec2 g = j.gradient();
    const double g2 = dot(g, g);
    if (g2 <= kScaleFloor) return std::nullopt;
    Vec2 step = g * (-val / g2);
    // Damped acceptance: shrink until the residual actually decreases.
    double lam = 1.0;
    bool accepted = false;
    for (int tries = 0; tries < 10; ++tries) {
      const Vec2 qn = q + step * lam;
      const double vn = std::abs(field.jet(qn, 0).value());
      if (vn < std::abs(val)) {
        q = qn;
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) return std::nullopt;
    prev = std::abs(val);
    (void)prev;
  }
  const ScalarJet j = field.jet(q, 0);
  if (std::abs(j.value()) <= tol * field.scale(q)) return q;
  return std::nullopt;
}

std::vector<Vec2> find_zero_seeds(const TraceField& field, const Window& win, int n, double tol) {
  const int nn = std::max(n, 4);
  const double du = (win.u1 - win.u0) / nn;
  const double dv = (win.v1 - win.v0) / nn;
  const double cell = std::max(du, dv);
  const double diam = std::max(win.diameter(), kScaleFloor);

  std::vector<double> val(static_cast<size_t>((nn + 1) * (nn + 1)));
  std::vector<double> scl(val.size());
  auto idx = [nn](int i, int j) { return static_cast<size_t>(j * (nn + 1) + i); };
  for (int j = 0; j <= nn; ++j)
    for (int i = 0; i <= nn; ++i) {
      const Vec2 q{win.u0 + du * i, win.v0 + dv * j};
      val[idx(i, j)] = field.jet(q, 0).value();
      scl[idx(i, j)] = field.scale(q);
    }

  std::vector<Vec2> candidates;
  auto grid_point = [&](int i, int j) { return Vec2{win.u0 + du * i, win.v0 + dv * j}; };
  auto edge_candidate = [&](int i0, int j0, int i1, int j1) {
    const double a = val[idx(i0, j0)], b = val[idx(i1, j1)];
    if (a == 0.0) {
      candidates.push_back(grid_point(i0, j0));
      return;
    }
    if (a * b < 0.0) {
      const double t = a / (a - b);
      const Vec2 pa = grid_point(i0, j0), pb = grid_point(i1, j1);
      candidates.push_back(pa + (pb - pa) * t);
    }
  };
  for (int j = 0; j <= nn; ++j)
    for (int i = 0; i < nn; ++i) edge_candidate(i, j, i + 1, j);
  for (int j = 0; j < nn; ++j)
    for (int i = 0; i <= nn; ++i) edge_candidate(i, j, i, j + 1);

  // Isolated zeros (no sign change): grid-local minima of |field| that are
  // small relative to a curvature-limited bound.
  const double gate = 100.0 * (cell / diam) * (cell / diam);
  for (int j = 1; j < nn; ++j)
    for (int i = 1; i < nn; ++i) {
      const double a = std::abs(val[idx(i, j)]);
      if (a > gate * scl[idx(i, j)]) continue;
      if (a <= std::abs(val[idx(i - 1, j)]) && a <= std::abs(val[idx(i + 1, j)]) &&
          a <= std::abs(val[idx(i, j - 1)]) && a <= std::abs(val[idx(i, j + 1)]))
        candidates.push_back(grid_point(i, j));
    }

  std::vector<Vec2> seeds;
  for (const Vec2& c : candidates) {
    const auto z = project_to_zero(field, c, tol);
    if (!z || !win.contains(*z)) continue;
    bool dup = false;
    for (const Vec2& s : seeds)
      if ((*z - s).norm() < 0.5 * cell) {
        dup = true;
        break;
      }
    if (!dup) seeds.push_back(*z);
  }
  return seeds;
}

namespace {

Vec2 unit_or_fail(Vec2 g, double floor_msg_scale) {
  const double n = g.norm();
  if (n <= floor_msg_scale) fail(Errc::trace_failure, "level-curve tangent collapsed");
  return g * (1.0 / n);
}

}  // namespace

TracedCurve trace_level_curve(const TraceField& field, Vec2 seed, const Window& win, double h,
                              int max_pts, double tol) {
  if (h <= 0.0) fail(Errc::trace_failure, "step size must be positive");
  const auto q0opt = project_to_zero(field, seed, tol, 40);
  if (!q0opt) fail(Errc::trace_failure, "seed does not project onto the level set");
  const Vec2 q0 = *q0opt;
  if (!win.contains(q0)) fail(Errc::trace_failure, "projected seed lies outside the window");

  const ScalarJet j0 = field.jet(q0, 1);
  const Vec2 g0 = j0.gradient();
  const double diam = std::max(win.diameter(), kScaleFloor);
  const double grad_floor = 1e-9 * field.scale(q0) / diam;
  if (g0.norm() <= grad_floor)
    fail(Errc::degenerate_seed, "field gradient vanishes at the seed");
  const Vec2 t0 = unit_or_fail(perp(g0), kScaleFloor);

  bool closed = false;
  auto run_pass = [&](int dir, int budget) {
    std::vector<CurvePoint> out;
    Vec2 q = q0;
    Vec2 t = t0 * static_cast<double>(dir);  // motion direction of this pass
    while (static_cast<int>(out.size()) < budget) {
      try {
        // Midpoint predictor.
        const Vec2 qm = q + t * (0.5 * h);
        const ScalarJet jm = field.jet(qm, 1);
        const Vec2 gm = jm.gradient();
        if (gm.norm() <= 1e-9 * field.scale(qm) / diam) break;  // degenerate region: stop
        Vec2 tm = unit_or_fail(perp(gm), kScaleFloor);
        if (dot(tm, t) < 0.0) tm = -tm;
        const Vec2 qp = q + tm * h;
        // Newton corrector back onto the level set.
        const auto qc = project_to_zero(field, qp, tol, 25);
        if (!qc) break;                         // corrector lost the level set: stop
        if ((*qc - q).norm() > 3.0 * h) break;  // landed on another branch: stop
        if (!win.contains(*qc)) break;
        const ScalarJet jc = field.jet(*qc, 1);
        const Vec2 gc = jc.gradient();
        if (gc.norm() <= 1e-9 * field.scale(*qc) / diam) break;
        Vec2 tc = unit_or_fail(perp(gc), kScaleFloor);
        if (dot(tc, tm) < 0.0) tc = -tc;
        if (dir > 0 && out.size() >= 5 && (*qc - q0).norm() < 0.6 * h &&
            (q - q0).norm() >= 0.6 * h) {
          closed = true;
          break;
        }
        out.push_back({*qc, tc, Vec2{0, 0}, jc.value()});
        q = *qc;
        t = tc;
      } catch (const Error&) {
        break;  // the field stopped being evaluable (frame degenerated, ...): keep what we have
      }
    }
    return out;
  };

  std::vector<CurvePoint> forward = run_pass(+1, max_pts - 1);

  TracedCurve curve;
  curve.step = h;
  if (closed) {
    curve.closed = true;
    curve.seed_index = 0;
    curve.pts.push_back({q0, t0, Vec2{0, 0}, j0.value()});
    curve.pts.insert(curve.pts.end(), forward.begin(), forward.end());
    return curve;
  }

  std::vector<CurvePoint> backward =
      run_pass(-1, max_pts - 1 - static_cast<int>(forward.size()));
  curve.seed_index = static_cast<int>(backward.size());
  curve.pts.reserve(backward.size() + forward.size() + 1);
  for (auto it = backward.rbegin(); it != backward.rend(); ++it) {
    CurvePoint p = *it;
    p.tangent = -p.tangent;  // stitched orientation runs opposite to this pass
    curve.pts.push_back(p);
  }
  curve.pts.push_back({q0, t0, Vec2{0, 0}, j0.value()});
  curve.pts.insert(curve.pts.end(), forward.begin(), forward.end());
  if (curve.size() < 2)
    fail(Errc::trace_failure, "level curve trace collapsed at the seed");
  return curve;
}

TracedCurve trace_singular_curve(std::shared_ptr<const JetSurface> f, Vec2 seed,
                                 const Window& win, double h, int max_pts) {
  const auto field = make_density_field(f, seed);
  TracedCurve curve = trace_level_curve(*field, seed, win, h, max_pts, kTraceTol);
  for (size_t i = 0; i < curve.pts.size(); ++i) {
    Vec2 eta = null_direction(*f, curve.pts[i].q);
    if (i > 0 && dot(eta, curve.pts[i - 1].eta) < 0.0) eta = -eta;
    curve.pts[i].eta = eta;
  }
  return curve;
}

PointKind point_kind(const JetSurface& f, const TraceField& field, Vec2 q, double tol) {
  const int c = corank(f, q, tol);
  if (c == 0) fail(Errc::not_singular, "point is not singular");
  if (c == 2) return PointKind::corank_two;

  const ScalarJet j1 = field.jet(q, 1);
  const double s = field.scale(q);
  Vec2 g = j1.gradient();

  if (g.norm() <= kDegenerateGradTol * s) {
    // Possible critical point of the density. Refine with Newton on the
    // gradient; accept as degenerate when a genuine nearby critical point of
    // the zero level is found. (Projection onto an isolated quadratic zero
    // is only sqrt-accurate, hence the generous fast-path bound above.)
    Vec2 qc = q;
    const double cap = 0.05 * (1.0 + std::hypot(q.u, q.v));
    bool ok = false;
    for (int it = 0; it < 20; ++it) {
      const ScalarJet j2 = field.jet(qc, 2);
      const Vec2 gg = j2.gradient();
      const double h11 = j2.d(2, 0), h12 = j2.d(1, 1), h22 = j2.d(0, 2);
      const double dh = h11 * h22 - h12 * h12;
      if (std::abs(dh) <= kScaleFloor) break;
      const Vec2 delta{(-gg.u * h22 + gg.v * h12) / dh, (-gg.v * h11 + gg.u * h12) / dh};
      qc = qc + delta;
      if ((qc - q).norm() > cap) break;
      if (delta.norm() <= 1e-14 * (1.0 + qc.norm())) {
        ok = true;
        break;
      }
    }
    if (ok) {
      const ScalarJet jr = field.jet(qc, 1);
      if (jr.gradient().norm() <= 1e-8 * s && std::abs(jr.value()) <= 1e-7 * s &&
          (qc - q).norm() <= cap)
        return PointKind::degenerate;
    }
  }

  const Vec2 eta = null_direction(f, q, tol);
  const double transversality = std::abs(dot(g, eta));
  return transversality > kAxisKindTol * g.norm() ? PointKind::first
                                                  : PointKind::second_admissible;
}

// --- adapted charts ----------------------------------------------------------

ChartKind detect_axis_kind(const JetSurface& f, double u0, double tol) {
  const Vec3Jet g = f.map_jet({u0, 0.0}, 1);
  const double nu = g.coeff(1, 0).norm();
  const double nv = g.coeff(0, 1).norm();
  return (nv <= tol * std::max(nu, kScaleFloor)) ? ChartKind::first : ChartKind::second;
}

AdaptedChart AdaptedChart::identity(std::shared_ptr<const JetSurface> f) {
  if (!f->declared_adapted())
    fail(Errc::invalid_spec, "identity chart requires a surface declared adapted");
  AdaptedChart ch;
  ch.src_ = std::move(f);
  ch.identity_ = true;
  ch.kind_ = detect_axis_kind(*ch.src_, 0.0);
  ch.normal_sign_ = ch.src_->orientation_flipped() ? -1 : +1;

  const Vec2 origin{0.0, 0.0};
  const Vec3Jet g1 = ch.map_jet(origin, 1);
  const Vec3 nu0 = ch.normal_jet(origin, 0).value();
  const Vec3 phi0 = ch.phi_jet(origin, 0).value();
  const double t = (ch.kind_ == ChartKind::first)
                       ? triple(g1.coeff(1, 0), phi0, nu0)
                       : triple(phi0, g1.coeff(0, 1), nu0);
  ch.sigma_ = (t >= 0.0) ? +1 : -1;
  return ch;
}

AdaptedChart AdaptedChart::from_curve(std::shared_ptr<const JetSurface> f,
                                      const TracedCurve& curve, Vec2 at) {
  if (curve.size() < 8)
    fail(Errc::straighten_failed, "traced curve too short to fit a chart");
  const auto field = make_density_field(f, at);
  const auto q0opt = project_to_zero(*field, at, kTraceTol, 40);
  if (!q0opt)
    fail(Errc::straighten_failed, "chart origin does not project onto the singular set");
  const Vec2 q0 = *q0opt;

  // Nearest traced sample.
  int i0 = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < curve.size(); ++i) {
    const double d = (curve.at(i).q - q0).norm();
    if (d < dmin) {
      dmin = d;
      i0 = i;
    }
  }
  if (dmin > 3.0 * curve.step)
    fail(Errc::straighten_failed, "chart origin is not on the traced curve");

  // Sample window around i0 along the curve (wrap when closed) with a
  // chord-length parameter that is zero at the projection of q0.
  const int n = curve.size();
  const auto build_samples = [&](int m, std::vector<double>& svec, std::vector<double>& uvec,
                                 std::vector<double>& vvec, double& coord_scale) {
    std::vector<int> ids;
    if (curve.closed) {
      const int mm = std::min(m, n / 2 - 1);
      for (int k = -mm; k <= mm; ++k) ids.push_back(((i0 + k) % n + n) % n);
    } else {
      const int lo = std::max(0, i0 - m), hi = std::min(n - 1, i0 + m);
      for (int k = lo; k <= hi; ++k) ids.push_back(k);
    }
    const size_t np = ids.size();
    svec.assign(np, 0.0);
    uvec.assign(np, 0.0);
    vvec.assign(np, 0.0);
    size_t rel0 = 0;
    for (size_t k = 0; k < np; ++k)
      if (ids[k] == i0) rel0 = k;
    for (size_t k = rel0 + 1; k < np; ++k)
      svec[k] = svec[k - 1] + (curve.at(ids[k]).q - curve.at(ids[k - 1]).q).norm();
    for (size_t k = rel0; k-- > 0;)
      svec[k] = svec[k + 1] - (curve.at(ids[k + 1]).q - curve.at(ids[k]).q).norm();
    const double delta = dot(q0 - curve.at(i0).q, curve.at(i0).tangent);
    coord_scale = 0.0;
    for (size_t k = 0; k < np; ++k) {
      svec[k] -= delta;
      uvec[k] = curve.at(ids[k]).q.u;
      vvec[k] = curve.at(ids[k]).q.v;
      coord_scale = std::max({coord_scale, std::abs(uvec[k]), std::abs(vvec[k])});
    }
  };

  // Fixed-degree fits over progressively smaller windows: a wide window gives
  // the most stable derivatives, so accept the first (widest, lowest-degree)
  // combination whose residual meets the tolerance.
  AdaptedChart ch;
  int m = std::clamp(static_cast<int>(std::llround(0.03 / curve.step)), 6, 40);
  bool fitted = false;
  for (int shrink = 0; shrink < 3 && !fitted; ++shrink, m = std::max(6, m / 2)) {
    std::vector<double> svec, uvec, vvec;
    double coord_scale = 0.0;
    build_samples(m, svec, uvec, vvec, coord_scale);
    const int np = static_cast<int>(svec.size());
    if (np < 7) break;
    for (int deg = 5; deg <= 7 && !fitted; ++deg) {
      if (np < deg + 2) break;
      const auto cu = polyfit_1d(svec, uvec, deg, true, q0.u);
      const auto cv = polyfit_1d(svec, vvec, deg, true, q0.v);
      if (cu.empty() || cv.empty()) continue;
      double resid = 0.0;
      for (int k = 0; k < np; ++k) {
        resid = std::max(resid, std::abs(polyval_1d(cu, svec[k]) - uvec[k]));
        resid = std::max(resid, std::abs(polyval_1d(cv, svec[k]) - vvec[k]));
      }
      if (resid <= kFitTol * (1.0 + coord_scale)) {
        ch.cu_ = cu;
        ch.cv_ = cv;
        fitted = true;
      }
    }
    if (m <= 6) break;
  }
  if (!fitted) fail(Errc::straighten_failed, "singular curve fit residual too large");

  // Canonical axis direction: orient the fitted curve so its tangent at the
  // origin has positive u-component (positive v-component on ties).  The rule
  // depends only on the curve's geometry, so charts -- and every signed
  // invariant computed in them -- do not change when the trace direction or
  // the surface orientation does.
  {
    const Vec2 t0{ch.cu_.size() > 1 ? ch.cu_[1] : 0.0, ch.cv_.size() > 1 ? ch.cv_[1] : 0.0};
    const double tn = t0.norm();
    const bool reversed = (t0.u < -1e-6 * tn) || (std::abs(t0.u) <= 1e-6 * tn && t0.v < 0.0);
    if (reversed) {
      for (size_t k = 1; k < ch.cu_.size(); k += 2) ch.cu_[k] = -ch.cu_[k];
      for (size_t k = 1; k < ch.cv_.size(); k += 2) ch.cv_[k] = -ch.cv_[k];
    }
  }

  ch.src_ = f;
  ch.identity_ = false;

  // Chart kind from the null direction against the fitted axis tangent.
  const Vec2 eta0 = null_direction(*f, q0);
  const Vec2 gam1{ch.cu_.size() > 1 ? ch.cu_[1] : 0.0, ch.cv_.size() > 1 ? ch.cv_[1] : 0.0};
  const double gn = gam1.norm();
  if (gn <= 1e-8)
    fail(Errc::straighten_failed, "fitted singular curve has a vanishing tangent");
  ch.kind_ = (std::abs(det(gam1, eta0)) > kAxisKindTol * gn) ? ChartKind::first
                                                             : ChartKind::second;

  if (ch.kind_ == ChartKind::first) {
    // Null direction as a field along the axis: kernel of df from the
    // dominant column at the origin; sign and scale fixed so that
    // det(Gamma', w) > 0 and |w(0)| = 1.
    const Vec3Jet j1 = f->map_jet(q0, 1);
    const Vec3 fu = j1.coeff(1, 0), fv = j1.coeff(0, 1);
    ch.w_branch_ = (fu.norm() >= fv.norm()) ? 0 : 1;
    const Vec2 w0 = (ch.w_branch_ == 0) ? Vec2{-dot(fu, fv), dot(fu, fu)}
                                        : Vec2{dot(fv, fv), -dot(fu, fv)};
    const double d0 = det(gam1, w0);
    if (std::abs(d0) <= 1e-10 * gn * std::max(w0.norm(), kScaleFloor))
      fail(Errc::straighten_failed, "null direction is tangent to the fitted axis");
    ch.w_sign_ = ((d0 > 0.0) ? 1.0 : -1.0) / w0.norm();
  } else {
    ch.w_branch_ = 0;
    ch.w_sign_ = 1.0;
  }

  ch.normal_sign_ = f->orientation_flipped() ? -1 : +1;

  const Vec2 origin{0.0, 0.0};
  const Vec3Jet g1 = ch.map_jet(origin, 1);
  const Vec3 nu0 = ch.normal_jet(origin, 0).value();
  const Vec3 phi0 = ch.phi_jet(origin, 0).value();
  const double t = (ch.kind_ == ChartKind::first)
                       ? triple(g1.coeff(1, 0), phi0, nu0)
                       : triple(phi0, g1.coeff(0, 1), nu0);
  ch.sigma_ = (t >= 0.0) ? +1 : -1;
  return ch;
}

Vec2 AdaptedChart::source_point(Vec2 q) const {
  if (identity_) return q;
  return chart_jet(q, 1).value();
}

ChartJet AdaptedChart::chart_jet(Vec2 q, int order) const {
  const int ord = clamp_order(order);
  if (identity_) return ChartJet::identity(q, ord);

  if (kind_ == ChartKind::second) {
    // theta(U, V) = Gamma(U) + V * perp(Gamma'(U)) / |Gamma'(U)|.
    const ScalarJet g1 = poly1_jet(cu_, q, ord);
    const ScalarJet g2 = poly1_jet(cv_, q, ord);
    const ScalarJet d1 = poly1_jet(poly1_deriv(cu_), q, ord);
    const ScalarJet d2 = poly1_jet(poly1_deriv(cv_), q, ord);
    const ScalarJet nrm = (d1 * d1 + d2 * d2).sqrt();
    const ScalarJet V = ScalarJet::variable_v(q, ord);
    return {g1 + V * (-(d2 / nrm)), g2 + V * (d1 / nrm)};
  }

  // First kind: theta(U, V) = Gamma(U) + V * w(U), w the df-kernel field.
  const int real = std::min(ord, kMaxJetOrder - 2);
  const ScalarJet g1 = poly1_jet(cu_, q, real);
  const ScalarJet g2 = poly1_jet(cv_, q, real);
  const ChartJet curve_chart{g1, g2};
  const Vec2 gamma_at{g1.value(), g2.value()};
  const Vec3Jet fsrc = src_->map_jet(gamma_at, std::min(real + 2, kMaxJetOrder));
  const Vec3Jet fu = compose(fsrc.deriv_u(), curve_chart);
  const Vec3Jet fv = compose(fsrc.deriv_v(), curve_chart);
  ScalarJet w1 = ScalarJet::constant(0.0, q, real);
  ScalarJet w2 = w1;
  if (w_branch_ == 0) {
    w1 = -dot(fu, fv);
    w2 = dot(fu, fu);
  } else {
    w1 = dot(fv, fv);
    w2 = -dot(fu, fv);
  }
  const ScalarJet V = ScalarJet::variable_v(q, real);
  return {g1 + V * (w1 * w_sign_), g2 + V * (w2 * w_sign_)};
}

Vec3Jet AdaptedChart::map_jet(Vec2 q, int order) const {
  const int ord = clamp_order(order);
  if (identity_) return src_->map_jet(q, ord);
  const ChartJet theta = chart_jet(q, ord);
  const Vec3Jet fsrc = src_->map_jet(theta.value(), theta.order());
  return compose(fsrc, theta);
}

Vec3Jet AdaptedChart::raw_phi(Vec2 q, int order) const {
  const int ord = clamp_order(order);
  const bool exact = identity_ && !src_->fitted_adapted();
  const double div_tol = exact ? kDivideByVTol : kFittedDivTol;
  const bool drop = !exact;

  if (kind_ == ChartKind::first) {
    if (std::abs(q.v) >= kPhiAxisSplit) {
      const Vec3Jet g = map_jet(q, clamp_order(ord + 1));
      const Vec3Jet gv = g.deriv_v();
      const ScalarJet V = ScalarJet::variable_v(q, gv.order());
      return divide_vec3(gv, V);
    }
    const Vec2 qa{q.u, 0.0};
    const Vec3Jet ga = map_jet(qa, clamp_order(ord + 2));
    const Vec3Jet phia = ga.deriv_v().divide_by_v(div_tol, drop);
    return (q.v == 0.0) ? phia : recenter(phia, q);
  }

  // Second kind: v phi = g_u + eps(u) g_v.
  if (std::abs(q.v) >= kPhiAxisSplit) {
    const Vec3Jet g = map_jet(q, clamp_order(ord + 1));
    const ScalarJet e = eps_jet(q, g.order() - 1);
    const Vec3Jet num = g.deriv_u() + g.deriv_v() * e;
    const ScalarJet V = ScalarJet::variable_v(q, num.order());
    return divide_vec3(num, V);
  }
  const Vec2 qa{q.u, 0.0};
  const Vec3Jet ga = map_jet(qa, clamp_order(ord + 2));
  const ScalarJet ea = eps_jet(qa, ga.order() - 1);
  const Vec3Jet num = ga.deriv_u() + ga.deriv_v() * ea;
  const Vec3Jet phia = num.divide_by_v(div_tol, drop);
  return (q.v == 0.0) ? phia : recenter(phia, q);
}

Vec3Jet AdaptedChart::phi_jet(Vec2 q, int order) const { return raw_phi(q, order); }

ScalarJet AdaptedChart::eps_jet(Vec2 q, int order) const {
  const int ord = clamp_order(order);
  if (kind_ == ChartKind::first) return ScalarJet::constant(0.0, q, ord);
  const Vec2 qa{q.u, 0.0};
  const Vec3Jet g = map_jet(qa, clamp_order(ord + 1));
  const ScalarJet a = axis_extension(dot(g.deriv_u(), g.deriv_v()));
  const ScalarJet b = axis_extension(dot(g.deriv_v(), g.deriv_v()));
  if (std::abs(b.value()) <= kScaleFloor)
    fail(Errc::frame_collapse, "tangent f_v vanishes on a second-kind axis");
  const ScalarJet eps_axis = -(a / b);
  return vconst_rebase(eps_axis, q.v);
}

Vec3Jet AdaptedChart::normal_jet(Vec2 q, int order) const {
  const int ord = clamp_order(order);
  if (src_->has_normal_seed()) {
    if (identity_) return normalized(src_->normal_seed_jet(q, ord));
    const ChartJet theta = chart_jet(q, ord);
    const Vec3Jet raw = compose(src_->normal_seed_jet(theta.value(), theta.order()), theta);
    return normalized(raw);
  }
  // Frame-constructed normal; smooth across the axis because phi replaces the
  // degenerate tangent direction.
  if (kind_ == ChartKind::first) {
    const Vec3Jet g = map_jet(q, clamp_order(ord + 1));
    const Vec3Jet nu = normalized(cross(g.deriv_u(), phi_jet(q, g.order() - 1)));
    return nu * static_cast<double>(normal_sign_);
  }
  const Vec3Jet g = map_jet(q, clamp_order(ord + 1));
  const Vec3Jet nu = normalized(cross(phi_jet(q, g.order() - 1), g.deriv_v()));
  return nu * static_cast<double>(normal_sign_);
}

ScalarJet AdaptedChart::lambda_jet(Vec2 q, int order) const {
  const int ord = clamp_order(order);
  const Vec3Jet g = map_jet(q, clamp_order(ord + 1));
  const Vec3Jet nu = normal_jet(q, g.order() - 1);
  return triple(g.deriv_u(), g.deriv_v(), nu);
}

void AdaptedChart::validate(double umax, double vmax) const {
  const double us[] = {-umax, -0.5 * umax, 0.0, 0.5 * umax, umax};
  for (double u : us) {
    const Vec2 qa{u, 0.0};
    const Vec3Jet g = map_jet(qa, 1);
    const double s =
        std::max(std::max(g.coeff(1, 0).norm(), g.coeff(0, 1).norm()), kScaleFloor);
    const double lam = lambda_jet(qa, 0).value();
    if (std::abs(lam) > 1e-6 * s * s)
      fail(Errc::invalid_spec, "adapted chart axis is not singular");
    for (double v : {-vmax, -0.5 * vmax, 0.5 * vmax, vmax}) {
      const Vec2 qo{u, v};
      const Vec3Jet go = map_jet(qo, 1);
      const GramInfo gi = gram_info(go.coeff(1, 0), go.coeff(0, 1));
      if (gi.s2 <= kRankTol * (1.0 + gi.s1))
        fail(Errc::invalid_spec, "adapted chart window contains off-axis singular points");
    }
  }
}

}  // namespace frontgeo
