#pragma once

// Closed loops in control-parameter space, path-ordered holonomies, Stokes
// surface integrals over the three gate charts, rectangle synthesis for
// target gates, and ZYZ Euler decomposition.
//
// Sign conventions (frozen against full time-domain adiabatic evolution of
// the driven (N+1)-level system, see tests): the Schrodinger transport of
// dark-frame coefficients is c(T) = P exp(-int A) c(0) for the connection
// A^{ab} = <psi^a|d psi^b>, later path segments multiplying on the left.
// HolonomyResult.unitary is that transport matrix in the frame basis at the
// base point. With the frame curvatures
//   Ry     (theta1, theta2): F = -i cos(theta1) sigma_y
//   Rz     (theta2, phi2):   F = +i sin(2 theta2) |1><1|
//   Phase4 (theta4, phi5):   F = -i sin(2 theta4) |g4><g4|
// a ccw loop therefore evaluates to exp(i * sign * area * G) with signs
// (+1, -1, +1); synthesize_loop orients its rectangle so the holonomy is
// exactly exp(+i angle * G), G in {sigma_y, |1><1|, |g4><g4|}.

#include "holo/lambda_system.hpp"

#include <cmath>

namespace holo {

enum class GateKind { Ry, Rz, Phase4 };

struct LoopPath {
  std::vector<SphericalParams> vertices;  // first == last == base point
  int n_steps = 1000;                     // discretization per segment

  void validate() const {
    if (vertices.size() < 2) throw std::invalid_argument("LoopPath: need at least 2 vertices");
    if (n_steps < 1) throw std::invalid_argument("LoopPath: n_steps must be >= 1");
    const auto& a = vertices.front();
    const auto& b = vertices.back();
    for (int mu = 0; mu < a.coord_count(); ++mu)
      if (std::abs(a.coord(mu) - b.coord(mu)) > 1e-14)
        throw std::invalid_argument("LoopPath: loop not closed");
    for (double th : a.thetas)
      if (std::abs(th) > 1e-12)
        throw std::invalid_argument("LoopPath: base point must have all thetas zero");
  }
};

struct HolonomyResult {
  MatrixXc unitary;                         // (N-1)x(N-1), dark-frame basis at base point
  double discretization_error_estimate = 0; // max-abs diff vs doubled resolution
};

namespace detail {

inline MatrixXc holonomy_product_analytic(const LoopPath& loop, Chart chart, int n_steps) {
  const int n = loop.vertices.front().n_ground;
  const int ncoord = 2 * (n - 1);
  MatrixXc u = MatrixXc::Identity(n - 1, n - 1);
  const auto& table = chart_detail::frame_table(chart);
  for (size_t seg = 0; seg + 1 < loop.vertices.size(); ++seg) {
    const auto& a = loop.vertices[seg];
    const auto& b = loop.vertices[seg + 1];
    std::vector<double> delta(ncoord);
    bool moved = false;
    for (int mu = 0; mu < ncoord; ++mu) {
      delta[mu] = (b.coord(mu) - a.coord(mu)) / n_steps;
      moved = moved || delta[mu] != 0.0;
    }
    if (!moved) continue;
    for (int s = 0; s < n_steps; ++s) {
      SphericalParams mid = a;
      for (int mu = 0; mu < ncoord; ++mu) mid.coord(mu) += (s + 0.5) * delta[mu];
      MatrixXc psi = chart_detail::table_frame(table, mid);
      MatrixXc gen = MatrixXc::Zero(n - 1, n - 1);
      for (int mu = 0; mu < ncoord; ++mu) {
        if (delta[mu] == 0.0) continue;
        gen += (psi.adjoint() * chart_detail::table_frame_derivative(table, mid, mu)) * delta[mu];
      }
      u = expm_anti_hermitian(-gen) * u;  // transport sign, later segments leftmost
    }
  }
  return u;
}

inline MatrixXc holonomy_product_numeric(const LoopPath& loop, int n_steps, double fd_step) {
  const int n = loop.vertices.front().n_ground;
  const int ncoord = 2 * (n - 1);
  MatrixXc u = MatrixXc::Identity(n - 1, n - 1);
  // start gauge: the canonical logical embedding at the base point
  MatrixXc base = MatrixXc::Zero(n + 1, n - 1);
  for (int k = 0; k < n - 1; ++k) base(k, k) = 1.0;
  DarkFrame ref{base, Chart::numeric};
  ref = dark_basis(couplings_from_spherical(loop.vertices.front()), ref);
  for (size_t seg = 0; seg + 1 < loop.vertices.size(); ++seg) {
    const auto& a = loop.vertices[seg];
    const auto& b = loop.vertices[seg + 1];
    std::vector<double> delta(ncoord);
    bool moved = false;
    for (int mu = 0; mu < ncoord; ++mu) {
      delta[mu] = (b.coord(mu) - a.coord(mu)) / n_steps;
      moved = moved || delta[mu] != 0.0;
    }
    if (!moved) continue;
    for (int s = 0; s < n_steps; ++s) {
      SphericalParams mid = a;
      for (int mu = 0; mu < ncoord; ++mu) mid.coord(mu) += (s + 0.5) * delta[mu];
      DarkFrame center = dark_basis(couplings_from_spherical(mid), ref);
      MatrixXc gen = MatrixXc::Zero(n - 1, n - 1);
      for (int mu = 0; mu < ncoord; ++mu) {
        if (delta[mu] == 0.0) continue;
        gen += detail::numeric_connection_component(mid, center, mu, fd_step) * delta[mu];
      }
      // project out symmetric FD noise; the exact connection is anti-Hermitian
      gen = 0.5 * (gen - gen.adjoint().eval());
      u = expm_anti_hermitian(-gen) * u;
      ref = center;
    }
  }
  // The Procrustes continuation is close to the parallel gauge, so most of
  // the holonomy lives in the closure mismatch between the continued frame
  // back at the base point and the starting frame.
  DarkFrame end = dark_basis(couplings_from_spherical(loop.vertices.back()), ref);
  MatrixXc start = dark_basis(couplings_from_spherical(loop.vertices.front()),
                              DarkFrame{base, Chart::numeric})
                       .states;
  return (start.adjoint() * end.states) * u;
}

}  // namespace detail

// P exp of the connection along the loop: midpoint exponential per sub-step,
// later path segments multiplying on the left. Error estimate by comparison
// at doubled resolution.
inline HolonomyResult path_ordered_holonomy(const LoopPath& loop, Chart chart,
                                            double fd_step = 1e-5) {
  loop.validate();
  MatrixXc u1, u2;
  if (chart == Chart::numeric) {
    u1 = detail::holonomy_product_numeric(loop, loop.n_steps, fd_step);
    u2 = detail::holonomy_product_numeric(loop, 2 * loop.n_steps, fd_step);
  } else {
    if (loop.vertices.front().n_ground != chart_n_ground(chart))
      throw std::invalid_argument("path_ordered_holonomy: N does not match chart");
    u1 = detail::holonomy_product_analytic(loop, chart, loop.n_steps);
    u2 = detail::holonomy_product_analytic(loop, chart, 2 * loop.n_steps);
  }
  return HolonomyResult{u1, max_abs(u1 - u2)};
}

// ---------------------------------------------------------------------------
// Stokes surface integrals over the gate charts
// ---------------------------------------------------------------------------

struct GateChart {
  GateKind kind;
  Chart chart;
  int x_coord;  // theta-like coordinate carrying the density
  int y_coord;
  std::function<double(double)> density;
};

inline const GateChart& gate_chart(GateKind kind) {
  // coordinate layout: thetas 0..N-2 then phis (phi_2 first)
  static const GateChart ry{GateKind::Ry, Chart::analytic_n3, 0, 1,
                            [](double x) { return std::cos(x); }};
  static const GateChart rz{GateKind::Rz, Chart::analytic_n3, 1, 2 + 0,
                            [](double x) { return std::sin(2 * x); }};
  static const GateChart p4{GateKind::Phase4, Chart::analytic_n5, 3, 4 + 3,
                            [](double x) { return std::sin(2 * x); }};
  switch (kind) {
    case GateKind::Ry: return ry;
    case GateKind::Rz: return rz;
    default: return p4;
  }
}

inline MatrixXc gate_generator(GateKind kind) {
  switch (kind) {
    case GateKind::Ry: return pauli_y();
    case GateKind::Rz: {
      MatrixXc p = MatrixXc::Zero(2, 2);
      p(1, 1) = 1.0;
      return p;
    }
    default: {
      MatrixXc p = MatrixXc::Zero(4, 4);
      p(3, 3) = 1.0;
      return p;
    }
  }
}

// Sign s_chart in holonomy(ccw loop) = exp(i * s_chart * area * generator)
// under the transport convention P exp(-int A).
inline double chart_orientation_sign(GateKind kind) {
  switch (kind) {
    case GateKind::Ry: return +1.0;
    case GateKind::Rz: return -1.0;
    default: return +1.0;
  }
}

namespace detail {

inline GateKind detect_gate_chart(const LoopPath& loop) {
  const auto& v0 = loop.vertices.front();
  const int ncoord = v0.coord_count();
  std::vector<bool> moves(ncoord, false);
  for (const auto& v : loop.vertices)
    for (int mu = 0; mu < ncoord; ++mu)
      if (std::abs(v.coord(mu)) > 1e-12) moves[mu] = true;
  auto matches = [&](GateKind kind) {
    const auto& gc = gate_chart(kind);
    if (chart_n_ground(gc.chart) != v0.n_ground) return false;
    for (int mu = 0; mu < ncoord; ++mu)
      if (moves[mu] && mu != gc.x_coord && mu != gc.y_coord) return false;
    return true;
  };
  for (GateKind kind : {GateKind::Ry, GateKind::Rz, GateKind::Phase4})
    if (matches(kind)) return kind;
  throw std::invalid_argument("surface_integral_angle: loop not confined to a supported chart");
}

}  // namespace detail

// ccw-signed integral of the chart density over the enclosed region, as the
// Green's line integral sum_edges int P(x) dy with P(x) = int_0^x density.
// The antiderivative is evaluated by adaptive quadrature, never in closed
// form (tests hold the closed forms as independent oracles).
inline double surface_integral_angle(const LoopPath& loop,
                                     std::optional<GateKind> kind_hint = std::nullopt) {
  loop.validate();
  const GateKind kind = kind_hint ? *kind_hint : detail::detect_gate_chart(loop);
  const auto& gc = gate_chart(kind);
  auto pdens = [&](double x) {
    return x == 0.0 ? 0.0 : integrate_adaptive(gc.density, 0.0, x, 1e-13);
  };
  double total = 0.0;
  for (size_t seg = 0; seg + 1 < loop.vertices.size(); ++seg) {
    const double x0 = loop.vertices[seg].coord(gc.x_coord);
    const double x1 = loop.vertices[seg + 1].coord(gc.x_coord);
    const double y0 = loop.vertices[seg].coord(gc.y_coord);
    const double y1 = loop.vertices[seg + 1].coord(gc.y_coord);
    const double dy = y1 - y0;
    if (dy == 0.0) continue;
    total += dy * integrate_adaptive([&](double s) { return pdens(x0 + s * (x1 - x0)); }, 0.0,
                                     1.0, 1e-13);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Loop synthesis and composition
// ---------------------------------------------------------------------------

inline constexpr double kRectangleCapacity = 2 * PI;

namespace detail {

inline LoopPath rectangle_loop(GateKind kind, double x_extent, double y_extent, bool ccw,
                               int n_steps) {
  const auto& gc = gate_chart(kind);
  const int n = chart_n_ground(gc.chart);
  auto vertex = [&](double x, double y) {
    SphericalParams p = SphericalParams::zero(n);
    p.coord(gc.x_coord) = x;
    p.coord(gc.y_coord) = y;
    return p;
  };
  LoopPath loop;
  loop.n_steps = n_steps;
  if (ccw)
    loop.vertices = {vertex(0, 0), vertex(x_extent, 0), vertex(x_extent, y_extent),
                     vertex(0, y_extent), vertex(0, 0)};
  else
    loop.vertices = {vertex(0, 0), vertex(0, y_extent), vertex(x_extent, y_extent),
                     vertex(x_extent, 0), vertex(0, 0)};
  return loop;
}

}  // namespace detail

// Axis-aligned rectangle whose weighted area equals |angle| to 1e-10 (1-D
// root find on the theta side, the other side fixed at 2 pi), traversed so
// the holonomy equals exp(+i angle gate_generator).
inline LoopPath synthesize_loop(GateKind kind, double angle, int n_steps = 1000,
                                bool reduce_mod_2pi = true) {
  if (reduce_mod_2pi) {
    angle = std::remainder(angle, 2 * PI);  // into (-pi, pi]
  } else if (std::abs(angle) > kRectangleCapacity) {
    throw std::invalid_argument(
        "synthesize_loop: angle exceeds single-rectangle capacity, compose loops");
  }
  const auto& gc = gate_chart(kind);
  const int n = chart_n_ground(gc.chart);
  if (angle == 0.0) {
    LoopPath loop;
    loop.n_steps = n_steps;
    loop.vertices = {SphericalParams::zero(n), SphericalParams::zero(n)};
    return loop;
  }
  const double target = std::abs(angle);
  const double y_extent = 2 * PI;
  // separable area: y_extent * S(h), S monotone on [0, pi/2]
  auto area_of = [&](double h) {
    return kind == GateKind::Ry ? y_extent * std::sin(h)
                                : y_extent * std::sin(h) * std::sin(h);
  };
  double h = find_root([&](double x) { return area_of(x) - target; }, 0.0, PI / 2, 1e-15);
  // ccw loop gives exp(i * sign * area * G); pick orientation for +|angle|,
  // then flip for negative requested angle.
  bool ccw = chart_orientation_sign(kind) > 0.0;
  if (angle < 0.0) ccw = !ccw;
  return detail::rectangle_loop(kind, h, y_extent, ccw, n_steps);
}

// chi2 after chi1, both anchored at the same base point.
inline LoopPath compose_loops(const LoopPath& chi1, const LoopPath& chi2) {
  chi1.validate();
  chi2.validate();
  LoopPath out = chi1;
  out.vertices.insert(out.vertices.end(), chi2.vertices.begin() + 1, chi2.vertices.end());
  out.n_steps = std::max(chi1.n_steps, chi2.n_steps);
  return out;
}

inline LoopPath reverse_loop(const LoopPath& loop) {
  LoopPath out = loop;
  std::reverse(out.vertices.begin(), out.vertices.end());
  return out;
}

// ---------------------------------------------------------------------------
// Euler decomposition  u = Rz(gamma) Ry(beta) Rz(alpha)
// with Ry(b) = exp(i b sigma_y) and Rz(a) = diag(e^{-ia/2}, e^{ia/2}).
// ---------------------------------------------------------------------------

struct EulerAngles {
  double gamma = 0, beta = 0, alpha = 0;
};

inline MatrixXc euler_rz(double a) {
  MatrixXc m = MatrixXc::Zero(2, 2);
  m(0, 0) = std::exp(Complex(0, -a / 2));
  m(1, 1) = std::exp(Complex(0, a / 2));
  return m;
}

inline MatrixXc euler_ry(double b) {
  MatrixXc m(2, 2);
  m << std::cos(b), std::sin(b), -std::sin(b), std::cos(b);
  return m;
}

inline MatrixXc euler_compose(const EulerAngles& e) {
  return euler_rz(e.gamma) * euler_ry(e.beta) * euler_rz(e.alpha);
}

inline EulerAngles euler_decompose(const MatrixXc& u) {
  if (u.rows() != 2 || u.cols() != 2) throw std::invalid_argument("euler_decompose: need 2x2");
  if (unitarity_defect(u) > 1e-10) throw std::invalid_argument("euler_decompose: not unitary");
  if (std::abs(u.determinant() - Complex(1, 0)) > 1e-10)
    throw std::invalid_argument("euler_decompose: det != 1");

  auto wrap = [](double a) { return std::remainder(a, 2 * PI); };
  const double r0 = std::abs(u(0, 0));
  const double r1 = std::abs(u(0, 1));
  // u00 = cos(b) e^{-i(g+a)/2}, u01 = sin(b) e^{-i(g-a)/2}, sin(b) >= 0
  if (r1 < 1e-12) {  // diagonal
    EulerAngles e;
    e.beta = 0;
    e.alpha = 0;
    e.gamma = wrap(-2.0 * std::arg(u(0, 0)));
    return e;
  }
  if (r0 < 1e-12) {  // anti-diagonal
    EulerAngles e;
    e.beta = PI / 2;
    e.alpha = 0;
    e.gamma = wrap(-2.0 * std::arg(u(0, 1)));
    return e;
  }
  const double p0 = std::arg(u(0, 0));
  const double p1 = std::arg(u(0, 1));
  EulerAngles best;
  double best_cost = 1e300;
  for (int branch = 0; branch < 2; ++branch) {
    // branch 0: cos(b) = +r0, mu = -p0; branch 1: cos(b) = -r0, mu = -p0 + pi
    const double cb = branch == 0 ? r0 : -r0;
    const double mu = branch == 0 ? -p0 : -p0 + PI;
    const double nu = -p1;
    EulerAngles e;
    e.beta = std::atan2(r1, cb);  // in [0, pi] since r1 >= 0
    e.gamma = wrap(mu + nu);
    e.alpha = wrap(mu - nu);
    if (max_abs(euler_compose(e) - u) > 1e-9) continue;
    const double cost = std::abs(e.gamma) + std::abs(e.alpha);
    if (cost < best_cost) {
      best_cost = cost;
      best = e;
    }
  }
  if (best_cost > 1e299) throw std::runtime_error("euler_decompose: no branch reproduced input");
  return best;
}

}  // namespace holo
