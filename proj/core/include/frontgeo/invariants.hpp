// SPDX-License-Identifier: Apache-2.0
#pragma once

// Geometric invariants of a frontal along its singular set, computed from
// the frame jets of an adapted chart:
//   - the fundamental quantities E, F, G, L, M, N of the adapted frame
//     (first kind: {g_u, phi}; second kind: {phi, g_v}),
//   - first-kind edge invariants: singular curvature kappa_s, limiting
//     normal curvature kappa_nu, cuspidal curvature kappa_c and
//     cusp-directional torsion kappa_t,
//   - second-kind invariants: normalized cuspidal curvature mu_c (whose
//     nonvanishing characterizes fronts among frontals) and kappa_nu at
//     admissible points,
//   - the principal-curvature branches kappa_+ / kappa_- off the axis,
//   - the principal-curvature branch that stays bounded across the axis,
//     extended as a genuine jet, with its principal vector field,
//   - ridge order along the bounded branch and the line-of-curvature test.
//
// Sign conventions: kappa_nu, kappa_c, kappa_t and mu_c are computed in the
// frame carried by the surface's unit normal nu, so they flip sign under
// nu -> -nu; kappa_s carries an explicit sgn(lambda_v) factor and is
// orientation independent. The bounded-branch label ("plus") refers to the
// branches kappa_+/- as defined with the given nu; flipping nu swaps labels
// and negates the value.

#include <array>
#include <limits>
#include <memory>
#include <vector>

#include "frontgeo/chart.hpp"

namespace frontgeo {

// Off-axis branch separation: |B| <= kUmbilicTol * |A| is branch-ambiguous.
inline constexpr double kUmbilicTol = 1e-10;
// line_of_curvature threshold on max |kappa_t|, scaled by max |kappa_c|.
inline constexpr double kLocTol = 1e-8;
// Relative threshold for "this directional derivative vanishes".
inline constexpr double kRidgeVanishTol = 1e-7;
// Relative gap between analytic and finite-difference ridge derivatives.
inline constexpr double kRidgeFdTol = 1e-5;

// Frame quantities as jets at a chart point q (on or off the axis).
//   First kind (frame {g_u, phi, nu}):
//     E = <g_u,g_u>, F = <g_u,phi>, G = <phi,phi>,
//     L = -<g_u,nu_u>, M = -<phi,nu_u>, N = -<phi,nu_v>.
//   Second kind (frame {phi, g_v, nu}):
//     E = <phi,phi>, F = <phi,g_v>, G = <g_v,g_v>,
//     L = -<phi,nu_u>, M = -<phi,nu_v>, N = -<g_v,nu_v>.
struct FundamentalData {
  ChartKind kind = ChartKind::first;
  int sigma = +1;   // chart-center orientation sign of (frame, nu)
  int order = 0;    // realized jet order of E..N
  Vec3Jet g;        // recharted map, order + 1
  Vec3Jet gu, gv;   // its first derivatives, order
  Vec3Jet phi;      // reduced tangent, order
  Vec3Jet nu;       // unit normal, order + 1
  ScalarJet eps;    // second kind: eps(u) as a v-constant jet; else zero
  ScalarJet E, F, G, L, M, N;
};

// Jets of the fundamental quantities at chart point q. Requested `order`
// is clamped to what the chart can deliver (the realized order is recorded
// in the result). Throws "frame collapse" when EG - F^2 <= 0 at q.
FundamentalData fundamental_data(const AdaptedChart& chart, Vec2 q, int order);

// --- first kind --------------------------------------------------------------

struct EdgeInvariants {
  double kappa_s = 0;   // singular curvature
  double kappa_nu = 0;  // limiting normal curvature
  double kappa_c = 0;   // cuspidal curvature
  double kappa_t = 0;   // cusp-directional torsion
};

// Requires a first-kind chart ("wrong kind" otherwise); meaningful on the
// axis, smooth extension off it.
EdgeInvariants edge_invariants(const FundamentalData& fd);
EdgeInvariants edge_invariants(const AdaptedChart& chart, Vec2 q);

// --- second kind -------------------------------------------------------------

struct SecondKindInvariants {
  double mu_c = 0;      // normalized cuspidal curvature G(L + eps M)/(EG - F^2)
  double kappa_nu = std::numeric_limits<double>::quiet_NaN();  // N/G, admissible only
  bool front = false;       // mu_c != 0 <=> front near the point
  bool admissible = false;  // eps not identically zero along the axis
};

SecondKindInvariants second_kind_invariants(const FundamentalData& fd);
SecondKindInvariants second_kind_invariants(const AdaptedChart& chart, Vec2 q);

// --- principal curvature branches -------------------------------------------

struct PrincipalPair {
  double kappa_plus = 0;
  double kappa_minus = 0;
  double gauss = 0;  // K = kappa_plus * kappa_minus
  double mean = 0;   // H = (kappa_plus + kappa_minus) / 2
};

// Both branches at an off-axis point (q.v != 0 required). Throws "branch
// ambiguity" at umbilics and on the axis.
PrincipalPair principal_branches(const FundamentalData& fd);
PrincipalPair principal_branches(const AdaptedChart& chart, Vec2 q);

// The branch of kappa_+/- that extends smoothly across the singular axis.
// exists == false (no throw) when the deciding quantity vanishes: a frontal
// that is not a front near q, where neither branch is guaranteed bounded.
struct BoundedBranch {
  bool exists = false;
  bool which_plus = true;  // true: kappa_+ is the bounded branch (given nu)
  double value = std::numeric_limits<double>::quiet_NaN();
  ScalarJet jet;           // jet of the bounded branch at q
  Vec2 pv{};               // principal vector at q (chart basis)
  ScalarJet pv_u, pv_v;    // principal vector field jets
};

BoundedBranch bounded_branch(const FundamentalData& fd);
BoundedBranch bounded_branch(const AdaptedChart& chart, Vec2 q, int order = 4);

// Principal vector of the bounded branch; throws "no bounded branch".
Vec2 principal_vector(const AdaptedChart& chart, Vec2 q);

// --- ridge order -------------------------------------------------------------

// Successive directional derivatives of the bounded branch along its
// (normalized) principal vector field, and the resulting ridge order:
//   -1 : first derivative nonzero (not a ridge point)
//    k : derivatives 1..k+1 vanish and derivative k+2 does not (k = 0, 1, 2)
//    3 : all four tested derivatives vanish
struct RidgeData {
  int order = -1;
  std::array<double, 4> deriv{};  // D^1 .. D^4 of the bounded branch
  double scale = 1.0;             // vanishing threshold reference
};

RidgeData ridge_data(const AdaptedChart& chart, Vec2 q);
int ridge_order(const AdaptedChart& chart, Vec2 q);

// Independent check: the same directional derivatives from finite
// differences of bounded-branch values along the RK4 integral curve of the
// normalized principal vector field.
std::array<double, 4> ridge_derivs_fd(const AdaptedChart& chart, Vec2 q, double h = 5e-3);

// --- line of curvature --------------------------------------------------------

// True iff the axis segment [u0, u1] is a line of curvature: kappa_t
// vanishes identically (first kind). Second-kind charts always return false.
bool line_of_curvature(const AdaptedChart& chart, double u0, double u1, int samples = 33);

// --- profiles -----------------------------------------------------------------

struct InvariantSample {
  double s = 0;  // arclength along the traced curve (axis u for charts)
  Vec2 q{};      // source-surface parameter point
  ChartKind kind = ChartKind::first;
  bool ok = true;     // row computed without error
  bool front = true;  // (f, nu) immersive at the point
  bool admissible = true;
  double kappa_s = std::numeric_limits<double>::quiet_NaN();
  double kappa_nu = std::numeric_limits<double>::quiet_NaN();
  double kappa_c = std::numeric_limits<double>::quiet_NaN();
  double kappa_t = std::numeric_limits<double>::quiet_NaN();
  double mu_c = std::numeric_limits<double>::quiet_NaN();
  double kappa_plus = std::numeric_limits<double>::quiet_NaN();
  Vec2 pv{};
  int ridge_order = -1;
  bool bounded = false;
  bool fd_ok = true;  // ridge cross-check (when enabled)
};

struct InvariantProfile {
  std::vector<InvariantSample> rows;
};

struct ProfileOptions {
  int stride = 1;        // take every stride-th curve point
  bool fd_check = false; // cross-check ridge derivatives by finite differences
  double fd_step = 5e-3;
};

// One profile row at a chart point (throws on failure).
InvariantSample invariant_sample(const AdaptedChart& chart, Vec2 q,
                                 const ProfileOptions& opt = {});

// Sample the axis of a single chart at n evenly spaced u values.
InvariantProfile profile_on_axis(const AdaptedChart& chart, double u0, double u1,
                                 int n, const ProfileOptions& opt = {});

// Straighten a chart at every stride-th point of a traced singular curve and
// sample at its center. Failed rows are kept with ok = false.
InvariantProfile profile_along_curve(std::shared_ptr<const JetSurface> f,
                                     const TracedCurve& curve,
                                     const ProfileOptions& opt = {});

}  // namespace frontgeo
