// SPDX-License-Identifier: Apache-2.0
#include "frontgeo/models.hpp"

#include <cmath>

namespace frontgeo {

namespace {

Poly2 poly_1d_in_u(const std::vector<double>& c) {
  Poly2 p;
  for (size_t k = 0; k < c.size(); ++k) p.add_term(static_cast<int>(k), 0, c[k]);
  return p;
}

Poly2 truncate_total_degree(const Poly2& p, int cap) {
  Poly2 r;
  for (const auto& t : p.terms)
    if (t.i + t.j <= cap) r.add_term(t.i, t.j, t.c);
  return r;
}

}  // namespace

SurfaceSpec make_normal_form(const NormalFormCoeffs& c) {
  if (c.b03 == 0.0) fail(Errc::invalid_spec, "invalid surface spec: normal form needs b03 != 0");

  Poly2 fx;
  fx.add_term(1, 0, 1.0);

  Poly2 fy;
  fy.add_term(2, 0, c.a20 / 2.0).add_term(3, 0, c.a30 / 6.0).add_term(0, 2, 0.5);
  {
    Poly2 u4;
    u4.add_term(4, 0, 1.0);
    fy = fy + u4 * poly_1d_in_u(c.h1);
  }

  Poly2 fz;
  fz.add_term(2, 0, c.b20 / 2.0)
      .add_term(3, 0, c.b30 / 6.0)
      .add_term(1, 2, c.b12 / 2.0)
      .add_term(0, 3, c.b03 / 6.0);
  {
    Poly2 u4, u2v2, uv3, v4;
    u4.add_term(4, 0, 1.0);
    u2v2.add_term(2, 2, 1.0);
    uv3.add_term(1, 3, 1.0);
    v4.add_term(0, 4, 1.0);
    fz = fz + u4 * poly_1d_in_u(c.h2) + u2v2 * poly_1d_in_u(c.h3) + uv3 * poly_1d_in_u(c.h4) +
         v4 * c.h5;
  }

  fy = truncate_total_degree(fy, kMaxInputOrder);
  fz = truncate_total_degree(fz, kMaxInputOrder);

  SurfaceSpec spec;
  spec.map = from_components(fx, fy, fz);
  // phi = f_v / v is polynomial for this family; the numerator f_u x phi is an
  // exact polynomial normal field.
  const PolyMap3 fu = from_components(fx.deriv_u(), fy.deriv_u(), fz.deriv_u());
  const PolyMap3 phi = from_components(fx.deriv_v().divide_by_v(), fy.deriv_v().divide_by_v(),
                                       fz.deriv_v().divide_by_v());
  spec.normal = cross(fu, phi);
  spec.adapted = true;
  spec.order = kMaxInputOrder;
  spec.model_name = "normal-form";
  return spec;
}

NormalFormOracles normal_form_oracles(const NormalFormCoeffs& c) {
  if (c.b03 == 0.0) fail(Errc::invalid_spec, "invalid surface spec: normal form needs b03 != 0");
  NormalFormOracles o;
  o.mirror = c.b03 < 0.0;
  o.kappa_s = c.a20;
  o.kappa_nu = c.b20;
  o.kappa_c = c.b03;
  o.kappa_t = c.b12;
  o.kp_u = c.b30 - c.a20 * c.b12;
  o.kp_v = -(4.0 * c.b12 * c.b12 + c.a20 * c.b03 * c.b03) / (2.0 * c.b03);
  o.ridge_quantity = 4.0 * c.b12 * c.b12 * c.b12 + c.b30 * c.b03 * c.b03;
  // Principal direction at the origin is (N, -M) = (b03/2, -b12).
  o.dkp_along_pv = o.ridge_quantity / (2.0 * c.b03);
  if (c.b20 != 0.0 && o.ridge_quantity != 0.0) {
    o.parallel_defined = true;
    o.kappa_nu_t = -c.b20;
    const double inner =
        -4.0 * c.b12 * (c.b30 - c.a20 * c.b12) + c.a20 * (4.0 * c.b12 * c.b12 + c.a20 * c.b03 * c.b03);
    // Sign fixed by whether the derivative of kappa_+ along the principal
    // direction agrees with its u-derivative at the origin; when the
    // u-derivative vanishes the singular curve of the offset is reparametrized
    // and the comparison falls back to the v-derivative.
    const double eps_ref = o.kp_u != 0.0 ? o.dkp_along_pv * o.kp_u : o.dkp_along_pv * o.kp_v;
    const double eps_sign = eps_ref >= 0.0 ? 1.0 : -1.0;
    o.kappa_s_t = eps_sign * c.b20 * inner / o.ridge_quantity;
    o.kappa_t_t =
        c.b20 * c.b20 * (4.0 * c.b12 * c.b12 + c.a20 * c.b03 * c.b03) / o.ridge_quantity;
  }
  return o;
}

SurfaceSpec make_standard_model(const std::string& name) {
  SurfaceSpec spec;
  spec.model_name = name;
  spec.order = kMaxInputOrder;
  Poly2 fx, fy, fz, nx, ny, nz;

  if (name == "cuspidal-edge") {
    // (u, v^2, v^3), normal numerator (0, -3v, 2).
    fx.add_term(1, 0, 1.0);
    fy.add_term(0, 2, 1.0);
    fz.add_term(0, 3, 1.0);
    ny.add_term(0, 1, -3.0);
    nz.add_term(0, 0, 2.0);
    spec.adapted = true;
  } else if (name == "swallowtail") {
    // (u, 3v^4 + uv^2, 4v^3 + 2uv), normal numerator (-v^2, -1, v).
    fx.add_term(1, 0, 1.0);
    fy.add_term(0, 4, 3.0).add_term(1, 2, 1.0);
    fz.add_term(0, 3, 4.0).add_term(1, 1, 2.0);
    nx.add_term(0, 2, -1.0);
    ny.add_term(0, 0, -1.0);
    nz.add_term(0, 1, 1.0);
  } else if (name == "cuspidal-butterfly") {
    // (u, 4v^5 + uv^2, 5v^4 + 2uv), normal numerator (-v^2, -1, v).
    fx.add_term(1, 0, 1.0);
    fy.add_term(0, 5, 4.0).add_term(1, 2, 1.0);
    fz.add_term(0, 4, 5.0).add_term(1, 1, 2.0);
    nx.add_term(0, 2, -1.0);
    ny.add_term(0, 0, -1.0);
    nz.add_term(0, 1, 1.0);
  } else if (name == "cuspidal-lips") {
    // (u, 3v^4 + 2u^2v^2, v^3 + u^2 v), normal numerator (-4uv^2, -1, 4v).
    fx.add_term(1, 0, 1.0);
    fy.add_term(0, 4, 3.0).add_term(2, 2, 2.0);
    fz.add_term(0, 3, 1.0).add_term(2, 1, 1.0);
    nx.add_term(1, 2, -4.0);
    ny.add_term(0, 0, -1.0);
    nz.add_term(0, 1, 4.0);
  } else if (name == "cuspidal-beaks") {
    // (u, 3v^4 - 2u^2v^2, v^3 - u^2 v), normal numerator (4uv^2, -1, 4v).
    fx.add_term(1, 0, 1.0);
    fy.add_term(0, 4, 3.0).add_term(2, 2, -2.0);
    fz.add_term(0, 3, 1.0).add_term(2, 1, -1.0);
    nx.add_term(1, 2, 4.0);
    ny.add_term(0, 0, -1.0);
    nz.add_term(0, 1, 4.0);
  } else if (name == "d4-plus" || name == "d4-minus") {
    // (uv, u^2 +/- 3v^2, u^2 v +/- v^3); corank 2 at the origin, no normal.
    const double s = (name == "d4-plus") ? 1.0 : -1.0;
    fx.add_term(1, 1, 1.0);
    fy.add_term(2, 0, 1.0).add_term(0, 2, 3.0 * s);
    fz.add_term(2, 1, 1.0).add_term(0, 3, s);
    spec.map = from_components(fx, fy, fz);
    return spec;
  } else {
    fail(Errc::unknown_model, "unknown model: " + name);
  }

  spec.map = from_components(fx, fy, fz);
  spec.normal = from_components(nx, ny, nz);
  return spec;
}

std::vector<std::string> standard_model_names() {
  return {"cuspidal-edge",  "swallowtail", "cuspidal-butterfly",
          "cuspidal-lips",  "cuspidal-beaks", "d4-plus", "d4-minus"};
}

}  // namespace frontgeo
