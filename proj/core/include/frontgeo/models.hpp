// SPDX-License-Identifier: Apache-2.0
//
// Built-in test geometries: the adapted cuspidal-edge normal form with its
// closed-form invariants, and the standard local models for the supported
// singularity classes.

#pragma once

#include <string>
#include <vector>

#include "frontgeo/surface.hpp"

namespace frontgeo {

// f(u, v) = (u,
//            a20 u^2/2 + a30 u^3/6 + v^2/2,
//            b20 u^2/2 + b30 u^3/6 + b12 u v^2/2 + b03 v^3/6) + tails,
// tails = (0, u^4 h1(u), u^4 h2(u) + u^2 v^2 h3(u) + u v^3 h4(u) + v^4 h5(u, v)).
// Requires b03 != 0; b20 >= 0 is the usual normalization but not enforced.
struct NormalFormCoeffs {
  double a20 = 0, a30 = 0;
  double b20 = 0, b30 = 0, b12 = 0, b03 = 1;
  std::vector<double> h1, h2, h3, h4;  // 1-variable tails, monomial in u
  Poly2 h5;                            // 2-variable tail

  // Total degree of every emitted monomial is capped at kMaxInputOrder.
};

// Adapted spec with explicit normal numerator f_u x phi (phi = f_v / v).
SurfaceSpec make_normal_form(const NormalFormCoeffs& c);

// Closed-form values at the origin of the normal form. All derived from the
// leading coefficients; tails do not enter.
struct NormalFormOracles {
  double kappa_s = 0;        // = a20
  double kappa_nu = 0;       // = b20
  double kappa_c = 0;        // = b03
  double kappa_t = 0;        // = b12
  double kp_u = 0;           // (kappa_+)_u(0) = b30 - a20 b12
  double kp_v = 0;           // (kappa_+)_v(0) = -(4 b12^2 + a20 b03^2) / (2 b03)
  double ridge_quantity = 0; // 4 b12^3 + b30 b03^2; zero iff ridge at 0
  double dkp_along_pv = 0;   // directional derivative along (N, -M) at 0
  // Parallel surface f^t, t = 1/b20, at the origin (requires b20 != 0 and the
  // origin not a ridge):
  double kappa_nu_t = 0;     // = -b20
  double kappa_s_t = 0;      // signed closed form
  double kappa_t_t = 0;      // = b20^2 (4 b12^2 + a20 b03^2) / ridge_quantity
  bool parallel_defined = false;
  bool mirror = false;       // b03 < 0: mirrored normalization
};

NormalFormOracles normal_form_oracles(const NormalFormCoeffs& c);

// Standard models: "cuspidal-edge", "swallowtail", "cuspidal-butterfly",
// "cuspidal-lips", "cuspidal-beaks", "d4-plus", "d4-minus".
// The five corank-1 models ship explicit normal numerators; the D4 models are
// corank-2 geometries used to exercise rejection paths.
SurfaceSpec make_standard_model(const std::string& name);

std::vector<std::string> standard_model_names();

}  // namespace frontgeo
