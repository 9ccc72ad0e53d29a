// SPDX-License-Identifier: Apache-2.0
#include "frontgeo/surface.hpp"

#include <cmath>

namespace frontgeo {

Vec3Jet JetSurface::normal_seed_jet(Vec2, int) const {
  fail(Errc::normal_unavailable, "normal unavailable");
}

void SurfaceSpec::validate() const {
  if (order < 0 || order > kMaxInputOrder)
    fail(Errc::invalid_spec, "invalid surface spec: truncation order out of range");
  if (map.degree() > order)
    fail(Errc::invalid_spec, "invalid surface spec: map degree exceeds declared order");
  if (normal) {
    // Orthogonality of the numerator against both partials on a sample grid.
    const PolyMap3& n = *normal;
    double scale = 0.0;
    for (const auto& t : n.terms) scale = std::max({scale, std::fabs(t.c.x), std::fabs(t.c.y), std::fabs(t.c.z)});
    for (const auto& t : map.terms) scale = std::max({scale, std::fabs(t.c.x), std::fabs(t.c.y), std::fabs(t.c.z)});
    scale = std::max(scale, 1.0);
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) {
        const double u = 0.11 * a, v = 0.13 * b;
        const Vec3Jet f = map.jet_at({u, v}, 1);
        const Vec3 fu = f.coeff(1, 0), fv = f.coeff(0, 1);
        const Vec3 nv = n.eval(u, v);
        if (std::fabs(dot(nv, fu)) > kNormalOrthTol * scale * scale ||
            std::fabs(dot(nv, fv)) > kNormalOrthTol * scale * scale)
          fail(Errc::invalid_spec, "invalid surface spec: normal numerator not orthogonal to the map");
      }
  }
}

SurfaceSpec SurfaceSpec::flipped() const {
  SurfaceSpec s = *this;
  s.flip_normal = !s.flip_normal;
  return s;
}

SurfaceSpec SurfaceSpec::transformed(const Mat3& rot, const Vec3& shift) const {
  SurfaceSpec s = *this;
  s.map = map.transformed(rot, shift);
  if (normal) s.normal = normal->transformed(rot, {0, 0, 0});
  return s;
}

PolySurface::PolySurface(SurfaceSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.flip_normal && spec_.normal) {
    spec_.normal = spec_.normal->negated();
    spec_.flip_normal = false;
  }
}

Vec3Jet PolySurface::map_jet(Vec2 base, int order) const { return spec_.map.jet_at(base, order); }

Vec3Jet PolySurface::normal_seed_jet(Vec2 base, int order) const {
  if (!spec_.normal) fail(Errc::normal_unavailable, "normal unavailable");
  return spec_.normal->jet_at(base, order);
}

std::shared_ptr<const JetSurface> make_surface(const SurfaceSpec& spec) {
  return std::make_shared<PolySurface>(spec);
}

Vec3Jet RechartedSurface::map_jet(Vec2 base, int order) const {
  const ChartJet theta = theta_->chart_jet(base, order);
  return compose(src_->map_jet(theta.value(), order), theta);
}

Vec3Jet RechartedSurface::normal_seed_jet(Vec2 base, int order) const {
  const ChartJet theta = theta_->chart_jet(base, order);
  return compose(src_->normal_seed_jet(theta.value(), order), theta);
}

}  // namespace frontgeo
