// SPDX-License-Identifier: Apache-2.0
#pragma once

// Parallel surfaces f^t = f + t nu of a front and their singular geometry:
//   - the offset surface as a jet source (nu is a unit normal of f^t too,
//     so the normal seed is shared),
//   - classification of the singular point of f^t at p (t = 1/kappa_+(p))
//     through two routes that must agree: the ridge order of the bounded
//     principal branch of f at p, and the vanishing-pattern criteria applied
//     to the surrogate density kappa_+ - kappa_+(p) along the principal
//     vector field,
//   - first-kind invariants of the parallel cuspidal edge, computed by the
//     generic pipeline (trace the singular curve of f^t, straighten, apply
//     the edge formulas),
//   - constant-principal-curvature (CPC) lines: level curves kappa_+ = c,
//   - landmarks along a singular curve: exactly cusped points (eta kappa_+
//     zeros), extrema of the limiting normal curvature ((kappa_+)_u zeros),
//     and ridge points (zeros of the derivative along the principal vector).

#include <limits>
#include <memory>
#include <vector>

#include "frontgeo/classify.hpp"
#include "frontgeo/invariants.hpp"

namespace frontgeo {

// Relative vanishing threshold on kappa_+ jets (gradient, Hessian, offsets).
inline constexpr double kParallelVanishTol = 1e-7;
// Discrete cusp witness: consecutive unit tangents with dot below this.
inline constexpr double kCuspDotThreshold = -0.5;

// The offset surface f^t = f + t nu with nu the normalized normal seed of f.
class ParallelSurface : public JetSurface {
 public:
  // Requires a normal seed on f ("normal unavailable" otherwise).
  ParallelSurface(std::shared_ptr<const JetSurface> f, double t);

  Vec3Jet map_jet(Vec2 base, int order) const override;
  bool has_normal_seed() const override { return true; }
  Vec3Jet normal_seed_jet(Vec2 base, int order) const override;
  bool orientation_flipped() const override;

  double offset() const { return t_; }
  std::shared_ptr<const JetSurface> base_surface() const { return f_; }

 private:
  std::shared_ptr<const JetSurface> f_;
  double t_;
};

// Jet of f + t nu at `base` (convenience wrapper over ParallelSurface).
Vec3Jet parallel_jet(std::shared_ptr<const JetSurface> f, double t, Vec2 base, int order);

struct ParallelOptions {
  Window window{};          // tracing window for singular curves
  double trace_step = 1e-3;
  double vanish_tol = kParallelVanishTol;
};

// Classified singular point of f^t at p, t = 1/kappa_+(p).
struct ParallelReport {
  Vec2 point{};            // p (source coordinates), singular for f and f^t
  double t = 0;            // focal offset 1 / kappa_+(p)
  double kappa_plus = 0;   // kappa_+(p)
  bool degenerate = false; // d kappa_+(p) = 0 (within tolerance)
  int ridge_order = -1;    // ridge order of f at p (-1: not a ridge)
  int parallel_rank = 1;   // rank of d(f^t) at p
  double hessian_det = 0;  // det Hess kappa_+(p), adapted-chart coordinates
  // Route 1: ridge order of f (not a ridge -> edge, order 0 -> swallowtail,
  // order 1 -> butterfly; degenerate: Hessian sign + rank + order-0 ridge).
  SingularLabel label_from_ridge = SingularLabel::unresolved;
  // Route 2: vanishing-pattern criteria on kappa_+ - kappa_+(p) along the
  // principal vector field of the bounded branch.
  SingularLabel label_from_criteria = SingularLabel::unresolved;
  ClassifyEvidence criteria_evidence;
  // First-kind invariants of f^t at p, filled when both routes say edge.
  bool edge_defined = false;
  EdgeInvariants edge{};  // kappa_s^t, kappa_nu^t, kappa_c^t, kappa_t^t
};

// Report at a singular point p of f whose bounded branch satisfies
// kappa_+(p) != 0 ("no finite focal offset" otherwise). Adapted surfaces are
// charted directly; otherwise the singular curve through p is traced first.
ParallelReport parallel_singularity(std::shared_ptr<const JetSurface> f, Vec2 p,
                                    const ParallelOptions& opt = {});

// Invariants of the parallel cuspidal edge at p: traces the singular curve
// of f^t through p with the determinant density, straightens it, and applies
// the first-kind formulas. Throws "wrong parallel type" when the parallel
// singularity at p is not a cuspidal edge, "not singular" when p is not
// singular for f^t (t must be 1/kappa_+(p)).
EdgeInvariants parallel_edge_invariants(std::shared_ptr<const JetSurface> f, Vec2 p,
                                        double t, const ParallelOptions& opt = {});

// --- CPC lines ----------------------------------------------------------------

struct CpcPolyline {
  double value = 0;          // the level c of kappa_+
  std::vector<Vec2> points;  // source-plane vertices with kappa_+ = c
  bool closed = false;
  double step = 0;
};

// Trace the level curve kappa_+ = c through the projection of `seed`.
// Near a singular curve the branch is evaluated in an adapted chart (for
// surfaces not declared adapted, the window is interpreted in that chart's
// coordinates); on surfaces with no singular set near the seed the branch
// closer to c of the regular principal curvatures is traced instead.
// Errors: "nothing found" when no kappa_+ = c point exists near the seed;
// "CPC through critical point" when d kappa_+ vanishes at the seed.
CpcPolyline trace_cpc(std::shared_ptr<const JetSurface> f, double c, Vec2 seed,
                      const Window& win, double h = 1e-3);

// --- landmarks ------------------------------------------------------------------

enum class LandmarkType {
  exactly_cusped,     // eta kappa_+ = 0: CPC line tangent to the null direction
  kappa_nu_extremum,  // (kappa_+)_u = 0 in the adapted chart (kappa_nu' = 0)
  ridge,              // derivative of kappa_+ along its principal vector = 0
};
const char* to_string(LandmarkType type);

struct Landmark {
  LandmarkType type = LandmarkType::ridge;
  Vec2 q{};          // located point on the singular curve
  double s = 0;      // arclength along the input curve
  double width = 0;  // one-sided location confidence (the trace step)
  // kappa_s at the point, filled for exactly cusped landmarks (always <= 0
  // there); NaN otherwise.
  double kappa_s = std::numeric_limits<double>::quiet_NaN();
};

struct LandmarkOptions {
  int stride = 1;  // sample every stride-th curve point
};

// Zero crossings of the three landmark quantities along a first-kind singular
// curve of f, each refined by interpolation and reprojection onto the curve.
// Points where the chart or the bounded branch fails are skipped.
std::vector<Landmark> find_landmarks(std::shared_ptr<const JetSurface> f,
                                     const TracedCurve& curve,
                                     const LandmarkOptions& opt = {});

// Indices of interior vertices of a 3-space polyline where consecutive unit
// tangents reverse (dot < kCuspDotThreshold): discrete cusp witnesses.
std::vector<int> detect_cusps(const std::vector<Vec3>& polyline);

}  // namespace frontgeo
