// SPDX-License-Identifier: Apache-2.0
#pragma once

// The extended distance squared function
//
//     psi(u, v) = -((|x0 - f(u, v)|^2 - t0^2)) / 2
//
// and its focal degeneracies at a singular point p of a front:
//   - for any center on the normal line, x0 = f(p) + t0 nu(p), psi has a
//     critical point at p (j^1 psi = 0);
//   - when additionally t0 = 1/kappa_+(p) -- x0 is the focal point of the
//     bounded principal branch -- the whole 2-jet of psi vanishes at p;
//   - whether this degenerate critical point is of type D4 (R-equivalent to
//     u^3 + uv^2 or u^3 - uv^2) is decided by the discriminant Delta_psi of
//     the cubic part of psi, and holds exactly when p is not a ridge point
//     of the bounded branch (second-kind points; first-kind points may lose
//     the D4 without being ridges when the u^3-coefficient of psi vanishes);
//   - for frontals that are not fronts (admissible second kind with
//     mu_c(p) = 0) the focal center is taken on the limiting normal
//     curvature, x0 = f(p) + nu(p)/kappa_nu(p), and the critical point is
//     never of type D4 (Delta_psi = 0 automatically).

#include <memory>

#include "frontgeo/chart.hpp"

namespace frontgeo {

// Relative vanishing threshold on kappa_+ / kappa_nu when deciding that no
// focal center exists.
inline constexpr double kDsqVanishTol = 1e-7;
// |Delta_psi| <= kTauDeltaFactor * scale^4 counts as "Delta_psi = 0", where
// scale is the largest third-order Taylor coefficient of psi (Delta_psi is
// quartic in those coefficients).
inline constexpr double kTauDeltaFactor = 1e-7;
// 2-jet coefficients below kTauJetFactor * scale count as vanished.
inline constexpr double kTauJetFactor = 1e-9;

enum class D4Label {
  d4_positive,         // j^2 psi = 0 and Delta_psi > 0 (model u^3 + uv^2)
  d4_negative,         // j^2 psi = 0 and Delta_psi < 0 (model u^3 - uv^2)
  not_d4,              // |Delta_psi| <= tau_delta
  frontal_degenerate,  // frontal-not-front center (kappa_nu); never D4
};

// "D4-positive-sign", "D4-negative-sign", "not-D4", "frontal-degenerate".
const char* to_string(D4Label label);

struct DsqOptions {
  Window window{};        // tracing window for surfaces not declared adapted
  double trace_step = 1e-3;
  double vanish_tol = kDsqVanishTol;
};

struct DsqReport {
  Vec2 point{};             // p, a corank-1 singular point of f
  Vec3 center{};            // x0 = f(p) + nu(p)/kappa
  double t0 = 0;            // 1/kappa (kappa_+ for fronts, kappa_nu frontal)
  bool frontal = false;     // center taken from kappa_nu (frontal, not front)
  double two_jet_norm = 0;  // max |Taylor coefficient| of j^2 psi at p
  double delta_psi = 0;     // cubic discriminant of j^3 psi at p
  double tau_jet = 0;       // threshold used on two_jet_norm
  double tau_delta = 0;     // threshold used on |delta_psi|
  D4Label d4_label = D4Label::not_d4;
  int ridge_order = -1;     // ridge order of the bounded branch (front path)
  // (p is not a ridge point) <=> (|delta_psi| > tau_delta); reported, not
  // enforced. True vacuously on the frontal path.
  bool ridge_consistency = true;
};

// Order-3 jet of psi at p for an arbitrary center x0 and radius t0.
ScalarJet psi_jet(const JetSurface& f, Vec3 x0, double t0, Vec2 p);

// The discriminant of the cubic part of a (>= order-3) jet:
//   Delta = psi_uuu^2 psi_vvv^2 - 6 psi_uuu psi_uuv psi_uvv psi_vvv
//         - 3 psi_uuv^2 psi_uvv^2 + 4 psi_uuv^3 psi_vvv + 4 psi_uuu psi_uvv^3.
// Nonzero together with j^2 psi = 0 characterizes the D4 types.
double delta_psi_discriminant(const ScalarJet& psi);

// Delta_psi at the focal center of the corank-1 singular point p, with x0
// and t0 chosen internally as in DsqReport. Errors: "not singular" off the
// singular set, "corank two" at corank-2 points, "no bounded branch" /
// "wrong kind" for frontal points outside the admissible second kind, and
// "no focal point" when the deciding curvature vanishes at p.
double delta_psi(std::shared_ptr<const JetSurface> f, Vec2 p,
                 const DsqOptions& opt = {});

// Full report: focal center, 2-jet norm, Delta_psi, D4 label and the
// ridge consistency flag. Errors as delta_psi.
DsqReport d4_classify(std::shared_ptr<const JetSurface> f, Vec2 p,
                      const DsqOptions& opt = {});

// Strongly adapted chart at the origin of a second-kind adapted chart:
// reparametrizes the source by the axis-preserving shear
// (u, v) -> (u + c v, v), with c solved linearly from
// <g_uv + c g_uu, g_v>(0) = 0, so that the new chart satisfies
// <g_uv, g_v> = 0 at the origin while the singular curve stays on the
// u-axis. Errors: "wrong kind" on first-kind charts, "degenerate point"
// when <g_uu, g_v>(0) = 0 (inadmissible origin).
AdaptedChart strongly_adapted_chart(const AdaptedChart& chart);

}  // namespace frontgeo
