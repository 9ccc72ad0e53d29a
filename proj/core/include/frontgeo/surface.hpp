// SPDX-License-Identifier: Apache-2.0
//
// Surface sources. A JetSurface produces exact (to truncation) jets of the
// parametrization at arbitrary base points, and optionally a polynomial-like
// normal numerator jet. Concrete sources: polynomial input surfaces, parallel
// offsets, and recharted (composed) surfaces.

#pragma once

#include <memory>
#include <optional>
#include <string>

#include "frontgeo/poly.hpp"

namespace frontgeo {

inline constexpr int kMaxInputOrder = 5;
// Relative orthogonality tolerance for explicit normal numerators.
inline constexpr double kNormalOrthTol = 1e-8;

class JetSurface {
 public:
  virtual ~JetSurface() = default;

  // Jet of the parametrization f at `base`, truncated to `order`.
  virtual Vec3Jet map_jet(Vec2 base, int order) const = 0;

  // True when an explicit (unnormalized) normal field is available.
  virtual bool has_normal_seed() const { return false; }
  // Jet of the unnormalized normal; normalize to get the unit normal.
  virtual Vec3Jet normal_seed_jet(Vec2 base, int order) const;

  // True when the surface is declared adapted: its singular set is the u-axis.
  virtual bool declared_adapted() const { return false; }

  // True when the surface is adapted only up to fitting error (e.g. it wraps a
  // chart built from a traced curve). Axis divisions then use the relaxed
  // fitted tolerance instead of the strict one.
  virtual bool fitted_adapted() const { return false; }

  // True when a frame-constructed normal must be negated (surfaces without an
  // explicit normal carry the orientation flag through to the chart).
  virtual bool orientation_flipped() const { return false; }
};

struct SurfaceSpec {
  PolyMap3 map;
  std::optional<PolyMap3> normal;  // unnormalized normal numerator
  bool adapted = false;
  bool flip_normal = false;
  int order = kMaxInputOrder;  // declared truncation order of the input
  std::string model_name;      // informational, set by model factories

  // Validation: degree caps, and orthogonality of the normal numerator on a
  // sample grid. Throws Errc::invalid_spec on violation.
  void validate() const;

  SurfaceSpec flipped() const;
  SurfaceSpec transformed(const Mat3& rot, const Vec3& shift) const;
};

class PolySurface : public JetSurface {
 public:
  explicit PolySurface(SurfaceSpec spec);

  Vec3Jet map_jet(Vec2 base, int order) const override;
  bool has_normal_seed() const override { return spec_.normal.has_value(); }
  Vec3Jet normal_seed_jet(Vec2 base, int order) const override;
  bool declared_adapted() const override { return spec_.adapted; }
  bool orientation_flipped() const override { return spec_.flip_normal; }

  const SurfaceSpec& spec() const { return spec_; }

 private:
  SurfaceSpec spec_;
};

std::shared_ptr<const JetSurface> make_surface(const SurfaceSpec& spec);

// Surface composed with a smooth chart theta (new coordinates -> old).
// The chart is supplied per base point by a producer object.
class ChartProducer {
 public:
  virtual ~ChartProducer() = default;
  virtual ChartJet chart_jet(Vec2 base, int order) const = 0;
};

class RechartedSurface : public JetSurface {
 public:
  RechartedSurface(std::shared_ptr<const JetSurface> src, std::shared_ptr<const ChartProducer> theta)
      : src_(std::move(src)), theta_(std::move(theta)) {}

  Vec3Jet map_jet(Vec2 base, int order) const override;
  bool has_normal_seed() const override { return src_->has_normal_seed(); }
  Vec3Jet normal_seed_jet(Vec2 base, int order) const override;
  bool orientation_flipped() const override { return src_->orientation_flipped(); }

 private:
  std::shared_ptr<const JetSurface> src_;
  std::shared_ptr<const ChartProducer> theta_;
};

}  // namespace frontgeo
