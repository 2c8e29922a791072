#pragma once

// Time-dependent (generally non-Hermitian) Schrodinger propagation:
// i dpsi/dt = H(t) psi, adaptive embedded Dormand-Prince 5(4) on the complex
// state. The state is never renormalized; norm^2 is the no-jump survival
// probability and fidelities are taken on the unnormalized state.

#include "holo/composite.hpp"

namespace holo {

inline constexpr int kOutputGridPoints = 2001;

struct HamiltonianTerm {
  MatrixXc op;
  std::function<Complex(double)> coeff;
};

struct TimeDependentHamiltonian {
  MatrixXc constant;                  // includes -i gamma/-i kappa dissipators
  std::vector<HamiltonianTerm> terms;

  int dim() const { return (int)constant.rows(); }

  void apply(double t, const VectorXc& psi, VectorXc& out) const {
    out.noalias() = constant * psi;
    for (const auto& term : terms) {
      const Complex c = term.coeff(t);
      if (c != Complex(0, 0)) out.noalias() += c * (term.op * psi);
    }
  }

  MatrixXc matrix(double t) const {
    MatrixXc h = constant;
    for (const auto& term : terms) h += term.coeff(t) * term.op;
    return h;
  }
};

struct Projector {
  std::string label;
  std::vector<int> indices;

  double population(const VectorXc& psi) const {
    double p = 0;
    for (int i : indices) p += std::norm(psi[i]);
    return p;
  }
};

struct EvolutionResult {
  VectorXd times;                                // output grid
  std::vector<VectorXc> trajectory;              // unnormalized states
  std::vector<std::string> projector_labels;
  std::vector<std::vector<double>> populations;  // [projector][grid point]
  VectorXd norm2;                                // survival probability series
  double final_norm2 = 0;

  const VectorXc& final_state() const { return trajectory.back(); }
};

namespace rk45 {
// Dormand-Prince 5(4) tableau
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
}  // namespace rk45

// Solves i dpsi/dt = H(t) psi on [0, T] with local error <= tol per unit time,
// recording populations of the requested projectors on a fixed output grid.
inline EvolutionResult evolve(const TimeDependentHamiltonian& h, const VectorXc& psi0, double T,
                              double tol = 1e-9, const std::vector<Projector>& projectors = {},
                              int grid_points = kOutputGridPoints) {
  if (psi0.size() != h.dim()) throw std::invalid_argument("evolve: dimension mismatch");
  if (T <= 0) throw std::invalid_argument("evolve: T must be > 0");
  if (grid_points < 2) throw std::invalid_argument("evolve: need at least 2 grid points");

  EvolutionResult res;
  res.times = VectorXd::LinSpaced(grid_points, 0.0, T);
  res.trajectory.reserve(grid_points);
  res.norm2.resize(grid_points);
  res.projector_labels.reserve(projectors.size());
  for (const auto& p : projectors) res.projector_labels.push_back(p.label);
  res.populations.assign(projectors.size(), std::vector<double>(grid_points, 0.0));

  auto record = [&](int g, const VectorXc& psi) {
    res.trajectory.push_back(psi);
    res.norm2[g] = psi.squaredNorm();
    for (size_t k = 0; k < projectors.size(); ++k)
      res.populations[k][g] = projectors[k].population(psi);
  };

  const Complex minus_i(0, -1);
  VectorXc y = psi0;
  VectorXc k1(h.dim()), k2(h.dim()), k3(h.dim()), k4(h.dim()), k5(h.dim()), k6(h.dim()),
      k7(h.dim()), ytmp(h.dim()), ynew(h.dim()), err(h.dim());

  auto deriv = [&](double t, const VectorXc& state, VectorXc& out) {
    h.apply(t, state, out);
    out *= minus_i;
  };

  record(0, y);
  double t = 0.0;
  int next_grid = 1;
  deriv(t, y, k1);
  double hstep = std::min(T / 100.0, 1.0 / std::max(1.0, k1.cwiseAbs().maxCoeff()));
  const double hmin = T * 1e-14;

  while (next_grid < grid_points) {
    const double t_target = res.times[next_grid];
    if (t + hstep > t_target) hstep = t_target - t;
    if (hstep < hmin) throw std::runtime_error("evolve: step-size underflow (stiff input)");

    ytmp = y + hstep * rk45::a21 * k1;
    deriv(t + rk45::c2 * hstep, ytmp, k2);
    ytmp = y + hstep * (rk45::a31 * k1 + rk45::a32 * k2);
    deriv(t + rk45::c3 * hstep, ytmp, k3);
    ytmp = y + hstep * (rk45::a41 * k1 + rk45::a42 * k2 + rk45::a43 * k3);
    deriv(t + rk45::c4 * hstep, ytmp, k4);
    ytmp = y + hstep * (rk45::a51 * k1 + rk45::a52 * k2 + rk45::a53 * k3 + rk45::a54 * k4);
    deriv(t + rk45::c5 * hstep, ytmp, k5);
    ytmp = y + hstep *
                   (rk45::a61 * k1 + rk45::a62 * k2 + rk45::a63 * k3 + rk45::a64 * k4 +
                    rk45::a65 * k5);
    deriv(t + hstep, ytmp, k6);
    ynew = y + hstep * (rk45::b1 * k1 + rk45::b3 * k3 + rk45::b4 * k4 + rk45::b5 * k5 +
                        rk45::b6 * k6);
    deriv(t + hstep, ynew, k7);
    err = hstep * (rk45::e1 * k1 + rk45::e3 * k3 + rk45::e4 * k4 + rk45::e5 * k5 +
                   rk45::e6 * k6 + rk45::e7 * k7);

    const double err_norm = err.cwiseAbs().maxCoeff();
    const double tol_step = tol * hstep;
    if (err_norm <= tol_step || hstep <= hmin * 2) {
      t += hstep;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      if (t >= t_target - 1e-12 * T) {
        record(next_grid, y);
        ++next_grid;
      }
    }
    const double scale = err_norm > 0 ? 0.9 * std::pow(tol_step / err_norm, 0.2) : 5.0;
    hstep *= std::clamp(scale, 0.2, 5.0);
    hstep = std::min(hstep, T / 10.0);
  }

  res.final_norm2 = res.norm2[grid_points - 1];
  return res;
}

struct FidelityReport {
  double fidelity = 0;  // |<target|psi(T)>|^2 on the unnormalized state
  struct ProjectorStats {
    std::string label;
    double max = 0;
    double integral = 0;  // trapezoid on the output grid
  };
  std::vector<ProjectorStats> projector_stats;
};

inline FidelityReport fidelity_and_populations(const EvolutionResult& r, const VectorXc& target) {
  FidelityReport rep;
  const Complex ov = target.adjoint() * r.final_state();
  rep.fidelity = std::norm(ov);
  const int g = (int)r.times.size();
  for (size_t k = 0; k < r.populations.size(); ++k) {
    FidelityReport::ProjectorStats st;
    st.label = r.projector_labels[k];
    const auto& series = r.populations[k];
    st.max = *std::max_element(series.begin(), series.end());
    double integral = 0;
    for (int i = 0; i + 1 < g; ++i)
      integral += 0.5 * (series[i] + series[i + 1]) * (r.times[i + 1] - r.times[i]);
    st.integral = integral;
    rep.projector_stats.push_back(std::move(st));
  }
  return rep;
}

}  // namespace holo
