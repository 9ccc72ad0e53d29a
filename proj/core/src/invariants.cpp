// SPDX-License-Identifier: Apache-2.0
#include "frontgeo/invariants.hpp"

#include <algorithm>
#include <cmath>

#include "frontgeo/errors.hpp"

namespace frontgeo {

namespace {

double sign_or_one(double x) { return x < 0 ? -1.0 : 1.0; }

// Existence threshold for the bounded-branch decider (N~ resp. L^ + eps M^),
// relative to the jet's own magnitude.
bool decider_nonzero(const ScalarJet& lead) {
  const double scale = std::max(lead.max_abs_coeff(), 1e-300);
  return std::abs(lead.value()) > 1e-9 * scale;
}

}  // namespace

FundamentalData fundamental_data(const AdaptedChart& chart, Vec2 q, int order) {
  if (order < 1) order = 1;
  FundamentalData fd;
  fd.kind = chart.kind();
  fd.sigma = chart.sigma();
  fd.g = chart.map_jet(q, order + 1);
  fd.nu = chart.normal_jet(q, order + 1);
  const int ord = std::max(0, std::min({order, fd.g.order() - 1, fd.nu.order() - 1}));
  fd.order = ord;
  fd.phi = chart.phi_jet(q, ord);
  fd.eps = chart.eps_jet(q, ord);
  fd.gu = fd.g.deriv_u();
  fd.gv = fd.g.deriv_v();
  const Vec3Jet nu_u = fd.nu.deriv_u();
  const Vec3Jet nu_v = fd.nu.deriv_v();
  if (fd.kind == ChartKind::first) {
    fd.E = norm2(fd.gu).truncated(ord);
    fd.F = dot(fd.gu, fd.phi).truncated(ord);
    fd.G = norm2(fd.phi).truncated(ord);
    fd.L = (-dot(fd.gu, nu_u)).truncated(ord);
    fd.M = (-dot(fd.phi, nu_u)).truncated(ord);
    fd.N = (-dot(fd.phi, nu_v)).truncated(ord);
  } else {
    fd.E = norm2(fd.phi).truncated(ord);
    fd.F = dot(fd.phi, fd.gv).truncated(ord);
    fd.G = norm2(fd.gv).truncated(ord);
    fd.L = (-dot(fd.phi, nu_u)).truncated(ord);
    fd.M = (-dot(fd.phi, nu_v)).truncated(ord);
    fd.N = (-dot(fd.gv, nu_v)).truncated(ord);
  }
  const double det2 = fd.E.value() * fd.G.value() - fd.F.value() * fd.F.value();
  if (!(det2 > 0))
    fail(Errc::frame_collapse, "adapted frame is degenerate (EG - F^2 <= 0)");
  return fd;
}

// --- first kind --------------------------------------------------------------

EdgeInvariants edge_invariants(const FundamentalData& fd) {
  if (fd.kind != ChartKind::first)
    fail(Errc::wrong_kind, "edge invariants need a first-kind chart point");
  const double E = fd.E.value(), F = fd.F.value(), G = fd.G.value();
  const double L = fd.L.value(), M = fd.M.value(), N = fd.N.value();
  const double D = E * G - F * F;
  EdgeInvariants r;
  r.kappa_nu = L / E;
  r.kappa_c = 2.0 * std::pow(E, 0.75) * N / std::pow(D, 0.75);
  r.kappa_t = (E * M - F * L) / (E * std::sqrt(D));
  const Vec3 fu = fd.g.coeff(1, 0);
  const Vec3 fuu = fd.g.coeff(2, 0);
  const Vec3 nu0 = fd.nu.coeff(0, 0);
  const Vec3 ph = fd.phi.coeff(0, 0);
  const double lambda_v = triple(fu, ph, nu0);
  r.kappa_s = sign_or_one(lambda_v) * triple(fu, fuu, nu0) / std::pow(E, 1.5);
  return r;
}

EdgeInvariants edge_invariants(const AdaptedChart& chart, Vec2 q) {
  return edge_invariants(fundamental_data(chart, q, 1));
}

// --- second kind -------------------------------------------------------------

SecondKindInvariants second_kind_invariants(const FundamentalData& fd) {
  if (fd.kind != ChartKind::second)
    fail(Errc::wrong_kind, "second-kind invariants need a second-kind chart point");
  const double E = fd.E.value(), F = fd.F.value(), G = fd.G.value();
  const double L = fd.L.value(), M = fd.M.value(), N = fd.N.value();
  const double D = E * G - F * F;
  SecondKindInvariants r;
  const double le = L + fd.eps.value() * M;
  r.mu_c = G * le / D;
  r.front = is_front_point(fd.g, fd.nu);
  r.admissible = fd.eps.max_abs_coeff() > 1e-10;
  if (r.admissible) r.kappa_nu = N / G;
  return r;
}

SecondKindInvariants second_kind_invariants(const AdaptedChart& chart, Vec2 q) {
  return second_kind_invariants(fundamental_data(chart, q, 1));
}

// --- principal branches -------------------------------------------------------

namespace {

// A, C, D coefficients of v D kappa^2 - A kappa + C = 0 whose roots are the
// principal branches, as values at the base point of fd.
struct BranchCoeffs {
  double A = 0, C = 0, D = 0, v = 0;
};

BranchCoeffs branch_coeffs(const FundamentalData& fd) {
  BranchCoeffs b;
  b.v = fd.E.base().v;
  const double E = fd.E.value(), F = fd.F.value(), G = fd.G.value();
  const double L = fd.L.value(), M = fd.M.value(), N = fd.N.value();
  b.D = E * G - F * F;
  if (fd.kind == ChartKind::first) {
    b.A = E * N - 2 * b.v * F * M + b.v * G * L;
    b.C = L * N - b.v * M * M;
  } else {
    const double le = L + fd.eps.value() * M;
    b.A = G * le - 2 * b.v * F * M + b.v * E * N;
    b.C = le * N - b.v * M * M;
  }
  return b;
}

}  // namespace

PrincipalPair principal_branches(const FundamentalData& fd) {
  const BranchCoeffs b = branch_coeffs(fd);
  if (b.v == 0.0)
    fail(Errc::branch_ambiguity, "principal branches need an off-axis point (v != 0)");
  const double disc = std::max(0.0, b.A * b.A - 4.0 * b.v * b.D * b.C);
  const double B = std::sqrt(disc);
  if (B <= kUmbilicTol * std::abs(b.A))
    fail(Errc::branch_ambiguity, "umbilic point: branches coincide");
  PrincipalPair r;
  // Evaluate the cancellation-free root first, recover the other from the
  // product 4 v D C = (A+B)(A-B).
  if (b.A >= 0) {
    r.kappa_plus = 2.0 * b.C / (b.A + B);
    r.kappa_minus = (b.A + B) / (2.0 * b.v * b.D);
  } else {
    r.kappa_minus = 2.0 * b.C / (b.A - B);
    r.kappa_plus = (b.A - B) / (2.0 * b.v * b.D);
  }
  r.gauss = b.C / (b.v * b.D);
  r.mean = b.A / (2.0 * b.v * b.D);
  return r;
}

PrincipalPair principal_branches(const AdaptedChart& chart, Vec2 q) {
  return principal_branches(fundamental_data(chart, q, 1));
}

BoundedBranch bounded_branch(const FundamentalData& fd) {
  const int ord = fd.order;
  const Vec2 base = fd.E.base();
  const ScalarJet vj = ScalarJet::variable_v(base, ord);
  const ScalarJet D = (fd.E * fd.G - fd.F * fd.F).truncated(ord);
  ScalarJet A, C, lead;
  if (fd.kind == ChartKind::first) {
    lead = fd.N;
    A = fd.E * fd.N - (vj * (fd.F * fd.M)) * 2.0 + vj * (fd.G * fd.L);
    C = fd.L * fd.N - vj * (fd.M * fd.M);
  } else {
    lead = fd.L + fd.eps * fd.M;
    A = fd.G * lead - (vj * (fd.F * fd.M)) * 2.0 + vj * (fd.E * fd.N);
    C = lead * fd.N - vj * (fd.M * fd.M);
  }

  BoundedBranch bb;
  if (!decider_nonzero(lead) || std::abs(A.value()) <= 1e-300) return bb;

  // Bounded branch as a jet: with s = sgn(A) near the axis, the square root
  // B = |A| sqrt(1 - X) = s A sqrt(1 - X), X = 4 v D C / A^2, and both cases
  // (s = +1: kappa_+, s = -1: kappa_-) collapse to 2C / (A (1 + sqrt(1-X))).
  const ScalarJet X = (vj * (D * C)) * 4.0 / (A * A);
  const ScalarJet one_minus = (-X) + 1.0;
  if (one_minus.value() <= 0) return bb;  // beyond the fold: no smooth branch here
  const ScalarJet root = one_minus.sqrt();
  bb.jet = (C * 2.0) / (A * (root + 1.0));
  bb.value = bb.jet.value();
  bb.which_plus = lead.value() > 0;
  bb.exists = true;

  if (fd.kind == ChartKind::first) {
    bb.pv_u = fd.N - vj * (bb.jet * fd.G);
    bb.pv_v = -fd.M + bb.jet * fd.F;
  } else {
    bb.pv_u = -fd.M + bb.jet * fd.F;
    bb.pv_v = fd.L - bb.jet * (vj * fd.E - fd.eps * fd.F);
  }
  bb.pv = {bb.pv_u.value(), bb.pv_v.value()};
  return bb;
}

BoundedBranch bounded_branch(const AdaptedChart& chart, Vec2 q, int order) {
  return bounded_branch(fundamental_data(chart, q, order));
}

Vec2 principal_vector(const AdaptedChart& chart, Vec2 q) {
  const BoundedBranch bb = bounded_branch(chart, q, 1);
  if (!bb.exists)
    fail(Errc::no_bounded_branch, "no bounded principal branch at the point");
  return bb.pv;
}

// --- ridge order --------------------------------------------------------------

namespace {

RidgeData ridge_from_branch(const BoundedBranch& bb) {
  const double n0 = std::hypot(bb.pv.u, bb.pv.v);
  if (n0 <= 0) fail(Errc::frame_collapse, "vanishing principal vector");
  if (bb.jet.order() < 4)
    fail(Errc::jet_mismatch, "ridge order needs an order-4 bounded-branch jet");
  const ScalarJet w1 = bb.pv_u * (1.0 / n0);
  const ScalarJet w2 = bb.pv_v * (1.0 / n0);
  RidgeData rd;
  rd.scale = std::max(1.0, bb.jet.max_abs_coeff());
  ScalarJet cur = bb.jet;
  for (int m = 0; m < 4; ++m) {
    cur = w1 * cur.deriv_u() + w2 * cur.deriv_v();
    rd.deriv[static_cast<size_t>(m)] = cur.value();
  }
  const double tau = kRidgeVanishTol * rd.scale;
  int k = 0;
  while (k < 4 && std::abs(rd.deriv[static_cast<size_t>(k)]) <= tau) ++k;
  rd.order = (k == 0) ? -1 : (k >= 4 ? 3 : k - 1);
  return rd;
}

}  // namespace

RidgeData ridge_data(const AdaptedChart& chart, Vec2 q) {
  const BoundedBranch bb = bounded_branch(chart, q, 4);
  if (!bb.exists)
    fail(Errc::no_bounded_branch, "ridge order needs a bounded principal branch");
  return ridge_from_branch(bb);
}

int ridge_order(const AdaptedChart& chart, Vec2 q) { return ridge_data(chart, q).order; }

std::array<double, 4> ridge_derivs_fd(const AdaptedChart& chart, Vec2 q, double h) {
  // Unit principal-vector field and bounded value, freshly computed per point.
  const auto dir = [&](Vec2 x) -> Vec2 {
    const BoundedBranch bb = bounded_branch(chart, x, 1);
    if (!bb.exists) fail(Errc::no_bounded_branch, "bounded branch lost along the flow");
    const double n = std::hypot(bb.pv.u, bb.pv.v);
    return {bb.pv.u / n, bb.pv.v / n};
  };
  const auto value = [&](Vec2 x) -> double {
    const BoundedBranch bb = bounded_branch(chart, x, 1);
    if (!bb.exists) fail(Errc::no_bounded_branch, "bounded branch lost along the flow");
    return bb.value;
  };

  // RK4 flow of the unit field, several substeps per stencil offset.
  const int kSub = 8;
  const auto advance = [&](Vec2 x, double dt) -> Vec2 {
    const double sub = dt / kSub;
    for (int i = 0; i < kSub; ++i) {
      const Vec2 k1 = dir(x);
      const Vec2 k2 = dir(x + k1 * (sub / 2));
      const Vec2 k3 = dir(x + k2 * (sub / 2));
      const Vec2 k4 = dir(x + k3 * sub);
      x = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (sub / 6.0);
    }
    return x;
  };

  // Samples F(k h), k = -3..3, marching outward from q.
  std::array<double, 7> f{};
  f[3] = value(q);
  Vec2 fwd = q, bwd = q;
  for (int k = 1; k <= 3; ++k) {
    fwd = advance(fwd, h);
    bwd = advance(bwd, -h);
    f[static_cast<size_t>(3 + k)] = value(fwd);
    f[static_cast<size_t>(3 - k)] = value(bwd);
  }

  // Fourth-order central stencils for d^m/dt^m, m = 1..4, offsets -3..3.
  static const double kSten[4][7] = {
      {0, 1.0 / 12, -2.0 / 3, 0, 2.0 / 3, -1.0 / 12, 0},
      {0, -1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12, 0},
      {1.0 / 8, -1.0, 13.0 / 8, 0, -13.0 / 8, 1.0, -1.0 / 8},
      {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6},
  };
  std::array<double, 4> out{};
  for (int m = 0; m < 4; ++m) {
    double acc = 0;
    for (int k = 0; k < 7; ++k) acc += kSten[m][k] * f[static_cast<size_t>(k)];
    out[static_cast<size_t>(m)] = acc / std::pow(h, m + 1);
  }
  return out;
}

// --- line of curvature ---------------------------------------------------------

bool line_of_curvature(const AdaptedChart& chart, double u0, double u1, int samples) {
  if (chart.kind() == ChartKind::second) return false;
  if (samples < 2) samples = 2;
  double max_t = 0, max_c = 0;
  for (int i = 0; i < samples; ++i) {
    const double u = u0 + (u1 - u0) * i / (samples - 1);
    const EdgeInvariants e = edge_invariants(chart, {u, 0.0});
    max_t = std::max(max_t, std::abs(e.kappa_t));
    max_c = std::max(max_c, std::abs(e.kappa_c));
  }
  return max_t <= kLocTol * std::max(max_c, 1e-300);
}

// --- profiles -------------------------------------------------------------------

InvariantSample invariant_sample(const AdaptedChart& chart, Vec2 q,
                                 const ProfileOptions& opt) {
  InvariantSample r;
  r.s = q.u;
  r.q = chart.source_point(q);
  const FundamentalData fd = fundamental_data(chart, q, 4);
  r.kind = fd.kind;
  r.front = is_front_point(fd.g, fd.nu);
  if (fd.kind == ChartKind::first) {
    const EdgeInvariants e = edge_invariants(fd);
    r.kappa_s = e.kappa_s;
    r.kappa_nu = e.kappa_nu;
    r.kappa_c = e.kappa_c;
    r.kappa_t = e.kappa_t;
    r.admissible = true;
  } else {
    const SecondKindInvariants s = second_kind_invariants(fd);
    r.mu_c = s.mu_c;
    r.kappa_nu = s.kappa_nu;
    r.admissible = s.admissible;
  }
  const BoundedBranch bb = bounded_branch(fd);
  r.bounded = bb.exists;
  if (bb.exists) {
    r.kappa_plus = bb.value;
    r.pv = bb.pv;
    const RidgeData rd = ridge_from_branch(bb);
    r.ridge_order = rd.order;
    if (opt.fd_check) {
      const auto fdv = ridge_derivs_fd(chart, q, opt.fd_step);
      // Compare the derivative that decides the order; parametrization
      // differences make later ones incomparable.
      const int decide = r.ridge_order < 0 ? 0 : std::min(r.ridge_order + 1, 3);
      if (r.ridge_order < 3) {
        const size_t i = static_cast<size_t>(decide);
        const double ref = std::max({1.0, std::abs(rd.deriv[i]), rd.scale});
        r.fd_ok = std::abs(fdv[i] - rd.deriv[i]) <= kRidgeFdTol * ref;
      }
    }
  }
  return r;
}

InvariantProfile profile_on_axis(const AdaptedChart& chart, double u0, double u1,
                                 int n, const ProfileOptions& opt) {
  InvariantProfile prof;
  if (n < 2) n = 2;
  for (int i = 0; i < n; ++i) {
    const double u = u0 + (u1 - u0) * i / (n - 1);
    try {
      prof.rows.push_back(invariant_sample(chart, {u, 0.0}, opt));
    } catch (const Error&) {
      InvariantSample bad;
      bad.s = u;
      bad.q = chart.source_point({u, 0.0});
      bad.ok = false;
      prof.rows.push_back(bad);
    }
  }
  return prof;
}

InvariantProfile profile_along_curve(std::shared_ptr<const JetSurface> f,
                                     const TracedCurve& curve,
                                     const ProfileOptions& opt) {
  InvariantProfile prof;
  const int stride = std::max(1, opt.stride);
  double s = 0;
  for (int i = 0; i < curve.size(); ++i) {
    if (i > 0) s += (curve.at(i).q - curve.at(i - 1).q).norm();
    if (i % stride != 0 && i != curve.size() - 1) continue;
    InvariantSample row;
    try {
      const AdaptedChart chart = AdaptedChart::from_curve(f, curve, curve.at(i).q);
      row = invariant_sample(chart, {0.0, 0.0}, opt);
    } catch (const Error&) {
      row.ok = false;
    }
    row.s = s;
    row.q = curve.at(i).q;
    prof.rows.push_back(row);
  }
  return prof;
}

}  // namespace frontgeo
