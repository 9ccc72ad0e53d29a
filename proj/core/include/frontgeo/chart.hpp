#pragma once

// Singular-set machinery for wave fronts given by surface jets:
//   - signed area density lambda = det(f_u, f_v, nu) and its zero set S(f),
//   - null directions (kernel of df) and corank at singular points,
//   - predictor/corrector tracing of singular curves and general level
//     curves of a scalar field,
//   - "straightening" a traced singular curve into an adapted chart in
//     which the curve is the u-axis and the null direction is vertical
//     (first kind) or the curve is parametrized by the u-axis with
//     eta = d/du + eps(u) d/dv (second kind),
//   - the adapted frame data (f_u, phi, unit normal, eps) as jets, which is
//     what every invariant in this library is computed from.

#include <memory>
#include <optional>
#include <vector>

#include "frontgeo/jet.hpp"
#include "frontgeo/surface.hpp"

namespace frontgeo {

// Default tolerances (all relative to a local magnitude scale).
inline constexpr double kTraceTol = 1e-10;   // corrector residual, normalized
inline constexpr double kFitTol = 1e-7;      // curve-fit residual, normalized
inline constexpr double kRankTol = 1e-8;     // rank decisions on df, (f,nu)
inline constexpr double kAxisKindTol = 1e-6; // |f_v| test for chart kind

// Rectangular parameter window used to bound tracing.
struct Window {
  double u0 = -1.0, u1 = 1.0, v0 = -1.0, v1 = 1.0;
  bool contains(Vec2 q) const {
    return q.u >= u0 && q.u <= u1 && q.v >= v0 && q.v <= v1;
  }
  double diameter() const;
};

// How a singular point sits relative to the singular curve through it.
enum class PointKind {
  first,              // null direction transverse to the singular curve
  second_admissible,  // tangent null direction, curve still regular (dlambda != 0)
  degenerate,         // dlambda = 0 (rank of f still 1)
  corank_two,         // rank of df is 0
};

struct CurvePoint {
  Vec2 q;          // parameter-plane position
  Vec2 tangent;    // unit tangent in trace direction
  Vec2 eta;        // unit null direction, sign-continuous along the curve
  double lambda;   // field value after correction (diagnostic)
};

struct TracedCurve {
  std::vector<CurvePoint> pts;
  double step = 0.0;
  bool closed = false;      // end met start inside the window
  int seed_index = 0;       // index of the seed point within pts
  const CurvePoint& at(int i) const { return pts[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(pts.size()); }
};

// Scalar field traced by the level-curve tracer. `jet` must supply at least
// order-1 jets; order-2 improves the corrector. `scale` normalizes residuals.
class TraceField {
 public:
  virtual ~TraceField() = default;
  virtual ScalarJet jet(Vec2 q, int order) const = 0;
  virtual double scale(Vec2 q) const = 0;
};

// lambda = det(f_u, f_v, nu) for surfaces carrying a normal seed.
class AreaDensityField : public TraceField {
 public:
  explicit AreaDensityField(std::shared_ptr<const JetSurface> f);
  ScalarJet jet(Vec2 q, int order) const override;
  double scale(Vec2 q) const override;

 private:
  std::shared_ptr<const JetSurface> f_;
};

// lambda_e = det(f_u, f_v, e) with a fixed reference vector e (an
// approximate normal sampled at a nearby regular point). Its zero set agrees
// with S(f) near the sampling region; used when no normal seed is available.
class SurrogateDensityField : public TraceField {
 public:
  SurrogateDensityField(std::shared_ptr<const JetSurface> f, Vec3 e);
  ScalarJet jet(Vec2 q, int order) const override;
  double scale(Vec2 q) const override;
  Vec3 reference() const { return e_; }

 private:
  std::shared_ptr<const JetSurface> f_;
  Vec3 e_;
};

// Build the natural density field for `f`: AreaDensityField when a normal
// seed exists, otherwise a SurrogateDensityField with e = f_u x f_v sampled
// at a regular point near `hint`.
std::unique_ptr<TraceField> make_density_field(std::shared_ptr<const JetSurface> f,
                                               Vec2 hint);

// --- pointwise queries -----------------------------------------------------

// Rank deficiency of df at q: 0 (regular), 1 (corank one), 2 (corank two).
int corank(const JetSurface& f, Vec2 q, double tol = kRankTol);

// Unit kernel vector of df at a corank-1 point (sign: positive v-component,
// or positive u-component when v-component vanishes).
Vec2 null_direction(const JetSurface& f, Vec2 q, double tol = kRankTol);

// True when (f, nu) is an immersion at q (the front condition), decided by
// the rank of the stacked 6x2 Jacobian. Requires a normal: either a seed on
// `f` or a caller-provided unit-normal jet.
bool is_front_point(const JetSurface& f, Vec2 q, double tol = kRankTol);
bool is_front_point(const Vec3Jet& f1, const Vec3Jet& nu1, double tol = kRankTol);

// --- root finding and tracing ----------------------------------------------

// Newton-correct `q` onto {field = 0} moving along grad(field); returns
// nullopt if no convergence within `max_iter`.
std::optional<Vec2> project_to_zero(const TraceField& field, Vec2 q,
                                    double tol = kTraceTol, int max_iter = 30);

// Scan the window on an n x n grid for sign changes / small values of the
// field and project each candidate; returns deduplicated singular seeds.
std::vector<Vec2> find_zero_seeds(const TraceField& field, const Window& win,
                                  int n = 48, double tol = kTraceTol);

// Trace the connected level curve {field = 0} through `seed` with step `h`
// (predictor: tangent Euler + one midpoint refinement; corrector: Newton).
// Stops at the window boundary, on closure, or after `max_pts` points.
// Throws Errc::trace_failure when the corrector diverges, and
// Errc::degenerate_seed when grad(field)(seed) vanishes.
TracedCurve trace_level_curve(const TraceField& field, Vec2 seed,
                              const Window& win, double h,
                              int max_pts = 20000, double tol = kTraceTol);

// Convenience: trace the singular curve of `f` through `seed`, filling eta
// at every accepted point (requires corank 1 along the curve).
TracedCurve trace_singular_curve(std::shared_ptr<const JetSurface> f, Vec2 seed,
                                 const Window& win, double h,
                                 int max_pts = 20000);

// Classify how the singular point `q` (assumed on S(f)) meets its curve.
PointKind point_kind(const JetSurface& f, const TraceField& field, Vec2 q,
                     double tol = kRankTol);

// --- adapted charts ----------------------------------------------------------

enum class ChartKind {
  first,   // f_v = 0 along the axis; eta = d/dv; phi = f_v / v
  second,  // f_u = v phi - eps(u) f_v along the axis; phi from that relation
};

// An adapted chart around a singular point: a reparametrization theta of the
// source surface under which the singular curve is the u-axis. Produces jets
// of the recharted map g = f(theta), the reduced tangent phi, the unit
// normal, and eps (second kind). All jet producers accept any base point in
// the chart's window, on or off the axis.
class AdaptedChart {
 public:
  // Identity chart over a surface already given in adapted form.
  static AdaptedChart identity(std::shared_ptr<const JetSurface> f);

  // Chart from a traced singular curve; the axis origin maps to `at`
  // (a point on / near the curve). Throws Errc::straighten_failed when the
  // curve cannot be fitted or the chart degenerates.
  static AdaptedChart from_curve(std::shared_ptr<const JetSurface> f,
                                 const TracedCurve& curve, Vec2 at);

  ChartKind kind() const { return kind_; }
  int sigma() const { return sigma_; }  // +1 if (basis, nu) positively oriented
  bool is_identity() const { return identity_; }
  const JetSurface& source() const { return *src_; }
  std::shared_ptr<const JetSurface> source_ptr() const { return src_; }

  // Position of chart point q in the source parameter plane.
  Vec2 source_point(Vec2 q) const;

  // Jets at chart base q. Orders are clamped so that internal over-requests
  // stay within kMaxJetOrder; the returned jet carries the realized order.
  ChartJet chart_jet(Vec2 q, int order) const;
  Vec3Jet map_jet(Vec2 q, int order) const;       // g = f(theta)
  Vec3Jet phi_jet(Vec2 q, int order) const;       // phi (see ChartKind)
  Vec3Jet normal_jet(Vec2 q, int order) const;    // unit normal
  ScalarJet lambda_jet(Vec2 q, int order) const;  // det(g_u, g_v, nu)
  ScalarJet eps_jet(Vec2 q, int order) const;     // second kind; zero otherwise

  // Validates that the axis is singular and the off-axis rows are regular in
  // a sample window; throws Errc::invalid_spec on failure.
  void validate(double umax, double vmax) const;

 private:
  AdaptedChart() = default;
  Vec3Jet raw_phi(Vec2 q, int order) const;

  std::shared_ptr<const JetSurface> src_;
  bool identity_ = true;
  ChartKind kind_ = ChartKind::first;
  int sigma_ = +1;
  int normal_sign_ = +1;  // applied to frame-constructed normals
  // Curve model (non-identity): monomial coefficients of Gamma in arclength.
  std::vector<double> cu_, cv_;
  // First kind: which kernel column parametrization and its sign.
  int w_branch_ = 0;
  double w_sign_ = 1.0;
};

// Chart kind of `f` near axis point u0 for a declared-adapted surface.
ChartKind detect_axis_kind(const JetSurface& f, double u0, double tol = kAxisKindTol);

}  // namespace frontgeo
