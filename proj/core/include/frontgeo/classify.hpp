// SPDX-License-Identifier: Apache-2.0
#pragma once

// Singularity-type classification of corank-1 singular points of fronts from
// the vanishing pattern of directional derivatives of the signed area density
// lambda along a null vector field eta:
//   non-degenerate p (d lambda(p) != 0):
//     cuspidal edge       iff  (eta lambda)(p) != 0
//     swallowtail         iff  (eta lambda)(p) = 0 and (eta eta lambda)(p) != 0
//     cuspidal butterfly  iff  both vanish and (eta eta eta lambda)(p) != 0
//   degenerate corank-1 p (d lambda(p) = 0):
//     cuspidal lips       iff  det Hess(lambda)(p) > 0
//     cuspidal beaks      iff  (eta eta lambda)(p) != 0 and det Hess(lambda)(p) < 0
// The pattern is invariant under scaling lambda by a nonvanishing function and
// under replacing eta by any other extension of the null field along S(f), so
// any density field and any kernel extension below support the same labels.
// The criteria are conclusive for fronts only; at frontal non-front points the
// report keeps the evidence but downgrades the label to `unresolved`.

#include <memory>
#include <optional>
#include <vector>

#include "frontgeo/chart.hpp"

namespace frontgeo {

// A directional derivative "vanishes" iff |value| <= tol * max |lambda coeff|.
inline constexpr double kClassifyVanishTol = 1e-7;
// p counts as "on S(f)" iff |lambda(p)| <= tol * max |lambda coeff|.
inline constexpr double kOnCurveTol = 1e-6;

enum class SingularLabel {
  cuspidal_edge,
  swallowtail,
  cuspidal_butterfly,
  cuspidal_lips,
  cuspidal_beaks,
  unresolved,
  unsupported_corank_2,
};

enum class SingularKind { first, second, degenerate, corank_two };

const char* to_string(SingularLabel label);
const char* to_string(SingularKind kind);

// Values backing a label decision, all evaluated at the classified point.
struct ClassifyEvidence {
  double eta_lambda = 0;           // (eta lambda)(p)
  double eta_eta_lambda = 0;       // (eta eta lambda)(p)
  double eta_eta_eta_lambda = 0;   // (eta eta eta lambda)(p)
  double hessian_det = 0;          // det Hess(lambda)(p)
  double grad_norm = 0;            // |d lambda(p)|
  double scale = 1;                // max |lambda jet coefficient| (tolerance unit)
};

struct SingularPointReport {
  Vec2 location{};
  int corank = 1;
  SingularKind kind = SingularKind::first;
  bool admissible = true;  // second kind: neighbours on S(f) are of the first kind
  bool front = true;       // (f, nu) immersive at the point
  SingularLabel label = SingularLabel::unresolved;
  ClassifyEvidence evidence;
};

struct ClassifyOptions {
  double vanish_tol = kClassifyVanishTol;
  double basis_angle = 0.0;  // rotate the kernel-extension basis (see eta_field)
  double probe_step = 0.03;  // curve offset for the admissibility probe
};

// Null field extension: the surface Jacobian is projected onto the tangent
// plane nu(p)^perp (an orthonormal basis there, rotated by `basis_angle`);
// the larger adjugate column of the resulting 2x2 jet is a smooth field that
// spans ker df along S(f) and is unit at p. Different angles give different
// admissible extensions with the same vanishing pattern. Requires a normal
// seed ("normal unavailable" otherwise) and corank 1 at p.
struct EtaField {
  ScalarJet u, v;
  Vec2 value() const { return {u.value(), v.value()}; }
};
EtaField eta_field(const JetSurface& f, Vec2 p, int order, double basis_angle = 0.0);

// Label from an arbitrary density jet and eta extension at the same base
// point; `degenerate` selects the d lambda = 0 clauses. Fills `ev`.
SingularLabel label_from_density(const ScalarJet& lambda, const EtaField& eta,
                                 bool degenerate, ClassifyEvidence& ev,
                                 double vanish_tol = kClassifyVanishTol);

// Full report at a singular point of f. Throws "not singular" when
// lambda(p) is not zero to tolerance; corank-2 points are reported as
// unsupported rather than thrown.
SingularPointReport classify_singular_point(std::shared_ptr<const JetSurface> f, Vec2 p,
                                            const ClassifyOptions& opt = {});

// 2-D Newton for a degenerate singular point (common zero of lambda_u,
// lambda_v with lambda = 0) from a user seed; "degenerate seed" when the
// iteration stalls, the Hessian is singular, or lambda does not vanish.
Vec2 locate_degenerate_point(std::shared_ptr<const JetSurface> f, Vec2 seed,
                             int max_iter = 40);

// Zeros of (eta lambda) along a traced singular curve (kind transitions:
// swallowtail / butterfly candidates among first-kind points), refined by
// secant steps and projection back onto S(f).
std::vector<Vec2> locate_eta_lambda_zeros(std::shared_ptr<const JetSurface> f,
                                          const TracedCurve& curve);

}  // namespace frontgeo
