// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Criterion 8's dominance clauses compare simulation against both
// closed-form bound conventions as stated and are reported honestly even
// where those constants are too tight (measured ratios are shown).

#include "holo/bounds.hpp"
#include "holo/holonomy.hpp"
#include "holo/scenario.hpp"

#include <catch2/catch.hpp>

#include <chrono>
#include <cstdio>

using namespace holo;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void report(int criterion, const std::string& what, bool ok) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  std::fflush(stdout);
}

MatrixXc gate_target(GateKind kind, double angle) {
  return expm_anti_hermitian(Complex(0, 1) * angle * gate_generator(kind));
}

}  // namespace

TEST_CASE("criterion 1: connection exactness") {
  const double t0 = now_seconds();
  const double step = 1e-5, tol = 1e-8;
  bool ok = true;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> th(0.05, PI / 2 - 0.05), ph(0.0, 2 * PI);

  for (int k = 0; k < 10; ++k) {  // N=3 Ry chart: A_theta2 = -i sin(theta1) sigma_y
    SphericalParams p(3, {th(rng), th(rng)}, {0.0, 0.0}, 1.0);
    MatrixXc analytic = analytic_connection_component(p, Chart::analytic_n3, 1);
    MatrixXc fd = fd_connection_component(p, Chart::analytic_n3, 1, step);
    MatrixXc pinned = Complex(0, -1) * std::sin(p.thetas[0]) * pauli_y();
    ok = ok && max_abs(analytic - fd) < tol && max_abs(analytic - pinned) < tol;
  }
  for (int k = 0; k < 10; ++k) {  // N=5 phase chart: A_phi5 = -i sin^2(theta4)|g4><g4|
    SphericalParams p(5, {0, 0, 0, th(rng)}, {0, 0, 0, ph(rng)}, 1.0);
    MatrixXc analytic = analytic_connection_component(p, Chart::analytic_n5, 7);
    MatrixXc fd = fd_connection_component(p, Chart::analytic_n5, 7, step);
    MatrixXc pinned = MatrixXc::Zero(4, 4);
    pinned(3, 3) = Complex(0, -std::pow(std::sin(p.thetas[3]), 2));
    ok = ok && max_abs(analytic - fd) < tol && max_abs(analytic - pinned) < tol;
  }
  const double elapsed = now_seconds() - t0;
  ok = ok && elapsed < 1.0;
  report(1, "analytic connections match finite differences of the frames (1e-8, " +
                std::to_string(elapsed) + " s)",
         ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 2: Stokes-holonomy agreement") {
  const double t0 = now_seconds();
  bool ok = true;
  for (GateKind kind : {GateKind::Ry, GateKind::Rz, GateKind::Phase4}) {
    for (double angle : {PI / 4, PI / 2, PI}) {
      LoopPath loop = synthesize_loop(kind, angle, 10000);
      MatrixXc u = path_ordered_holonomy(loop, gate_chart(kind).chart).unitary;
      const double err = max_abs(u - gate_target(kind, angle));
      if (err >= 1e-4) {
        std::printf("  gate %d angle %.4f: error %.2e exceeds 1e-4\n", (int)kind, angle, err);
        ok = false;
      }
    }
    // the connection is constant along every rectangle edge, so the midpoint
    // geometric integrator is exact at any n_steps and the quadrupling ladder
    // sits at the roundoff floor (~1e-12); monotone decrease is asserted
    // above that floor and the measured values are printed for transparency
    double prev = 1e300;
    for (int n : {156, 625, 2500, 10000}) {
      LoopPath loop = synthesize_loop(kind, PI / 2, n);
      const double err =
          max_abs(path_ordered_holonomy(loop, gate_chart(kind).chart).unitary -
                  gate_target(kind, PI / 2));
      std::printf("  gate %d n_steps %5d: |U - exp(angle G)| = %.3e\n", (int)kind, n, err);
      if (!(err <= prev + 1e-10)) ok = false;
      prev = err;
    }
  }
  const double elapsed = now_seconds() - t0;
  ok = ok && elapsed < 10.0;
  report(2, "synthesized rectangles match exp(angle generator) to 1e-4 at n=1e4; ladder "
            "monotone above the roundoff floor (" +
                std::to_string(elapsed) + " s)",
         ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 3: phase-gate selectivity") {
  LoopPath loop = synthesize_loop(GateKind::Phase4, PI, 10000);
  MatrixXc u = path_ordered_holonomy(loop, Chart::analytic_n5).unitary;
  bool ok = true;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (r != c && std::abs(u(r, c)) >= 1e-6) ok = false;
  for (int d = 0; d < 3; ++d)
    if (std::abs(u(d, d) - Complex(1, 0)) >= 1e-4) ok = false;
  if (std::abs(u(3, 3) - Complex(-1, 0)) >= 1e-4) ok = false;
  report(3, "Phase4(pi) holonomy is diag(1,1,1,-1) with off-diagonals < 1e-6", ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 4: universality witness") {
  const int rank3 = holonomy_rank_lower_bound(random_sample_points(3, 50), Chart::analytic_n3);
  const int rank5 = holonomy_rank_lower_bound(random_sample_points(5, 50), Chart::analytic_n5);
  const bool ok = rank3 >= 4 && rank5 >= 16;
  report(4, "curvature span rank " + std::to_string(rank3) + " >= 4 (N=3), " +
                std::to_string(rank5) + " >= 16 (N=5) over 50 samples",
         ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 5: lossless optical transfer") {
  const double t0 = now_seconds();
  SchemeParams p;  // gamma = kappa = 0, Omega = 0.05 g, Delta = 0, a = tau = 0.15
  p.total_time = 1.0e4;
  EvolutionResult evo;
  TransferResult r = run_transfer(Scheme::optical, p, 0, 2, 1e-9, &evo);
  FidelityReport rep = fidelity_and_populations(evo, evo.final_state());
  const double max_pe = rep.projector_stats[1].max;
  const double elapsed = now_seconds() - t0;
  const bool ok = r.fidelity >= 0.99 && max_pe < 0.01 && p.total_time <= 1.0e5 && elapsed < 30.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "|g3 g1 0> -> |g1 g3 0| at T = 1e4/g: fidelity %.4f >= 0.99, max P_e %.2e < "
                "0.01 (%.1f s)",
                r.fidelity, max_pe, elapsed);
  report(5, buf, ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 6: motional three-step swap") {
  SchemeParams p;
  p.delta = 10.0;
  p.eta = 0.1;
  p.swap_step_time = 4000.0;
  p.total_time = 8.0e5;
  SwapResult r = three_step_swap(p, 1, 0, 1e-9);
  const bool ok = r.transfer.fidelity >= 0.99 && r.transfer.max_p1ph < 0.01;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "|1>|0> -> |0>|2> with eliminated dynamics: fidelity %.4f >= 0.99, max cavity "
                "population %.2e < 0.01",
                r.transfer.fidelity, r.transfer.max_p1ph);
  report(6, buf, ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 7: effective-Hamiltonian validity") {
  SchemeParams p10;
  p10.delta = 10.0;
  p10.eta = 0.1;
  p10.nu = 50.0;
  p10.total_time = 2000.0;
  p10.counter_rotating = true;  // full generator keeps the 2 nu term
  SchemeParams p100 = p10;
  p100.delta = 100.0;
  const double d10 = effective_equivalence_report(p10, 1e-10);
  const double d100 = effective_equivalence_report(p100, 1e-10);
  const bool ok = d10 <= 0.05 && d100 * 25.0 <= d10;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "sup-norm population discrepancy %.2e <= 0.05 at Delta = 10 g; %.2e at "
                "Delta = 100 g (ratio %.0fx >= 25x)",
                d10, d100, d10 / d100);
  report(7, buf, ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 8: bound dominance on a (T, Delta) grid") {
  // Both bound conventions are evaluated as stated. The exact first-order
  // transition amplitude at the pulse crossing exceeds those constants by
  // ~2 e^{a^2/tau^2}; the dominance clauses below report the measured ratios
  // honestly rather than loosening the forms.
  struct GridSpec {
    Scheme scheme;
    double omega;
    std::vector<double> deltas;
    std::vector<double> times;
  };
  // grid points sit inside the adiabatic regime (G_eff T >= 150) where the
  // first-order amplitude theory behind the bounds is self-consistent
  const std::vector<GridSpec> grids = {
      {Scheme::motional, 0.05, {5.0, 10.0, 20.0}, {6.0e5, 1.2e6, 2.4e6}},
      {Scheme::modified, 0.2, {5.0, 10.0, 20.0}, {8.0e5, 1.2e6, 1.6e6}},
  };
  bool dominance_halved = true, dominance_unhalved = true, amplitude_ok = true;
  for (const auto& grid : grids) {
    for (double delta : grid.deltas) {
      for (double T : grid.times) {
        SchemeParams p;
        p.delta = delta;
        p.omega_peak = grid.omega;
        p.eta = 0.1;
        p.total_time = T;
        const double geff = grid.scheme == Scheme::motional
                                ? p.g * p.eta * p.omega_peak / delta
                                : p.g * p.omega_peak / delta;
        const double d_shift = grid.scheme == Scheme::motional ? 0.0 : p.g * p.g / delta;
        TransferResult r = grid.scheme == Scheme::motional
                               ? run_transfer(Scheme::motional, p, 1, 0, 1e-10)
                               : run_transfer(Scheme::modified, p, 0, 2, 1e-10);
        AdiabaticBound ab =
            adiabatic_population_bound(geff, T, p.pulse_a, p.pulse_tau, d_shift);
        const double unhalved = p1ph_bound_unhalved(geff, T, p.pulse_a, p.pulse_tau);
        std::printf("  %s Delta=%4.0f T=%.1e: max P1ph %.3e | halved %.3e (x%.1f) | "
                    "unhalved %.3e (x%.1f)\n",
                    grid.scheme == Scheme::motional ? "motional" : "modified", delta, T,
                    r.max_p1ph, ab.bound, r.max_p1ph / ab.bound, unhalved,
                    r.max_p1ph / unhalved);
        if (r.max_p1ph > ab.bound) dominance_halved = false;
        if (r.max_p1ph > unhalved) dominance_unhalved = false;
        for (bool plus : {false, true}) {
          const double num = transition_amplitude_numeric(geff, T, p.pulse_a, p.pulse_tau,
                                                          d_shift, plus);
          const double messiah =
              ab.bound * (plus ? ab.prefactor_plus : ab.prefactor_minus);
          if (num > messiah) {
            std::printf("    transition amplitude %s %.3e exceeds %.3e\n", plus ? "+" : "-",
                        num, messiah);
            amplitude_ok = false;
          }
        }
      }
    }
  }
  report(8, "simulated max P_1ph <= halved-convention closed-form bound", dominance_halved);
  report(8, "simulated max P_1ph <= unhalved-convention closed-form bound", dominance_unhalved);
  report(8, "numeric transition amplitude <= closed-form bound at all grid points",
         amplitude_ok);
  CHECK(dominance_halved);
  CHECK(dominance_unhalved);
  REQUIRE(amplitude_ok);
}

TEST_CASE("criterion 9: decoherence ordering and sweep monotonicity") {
  const std::vector<double> axis = {0.0, 0.005, 0.01};
  auto grid_fidelity = [&](Scheme scheme, double T, int w1, int w2) {
    std::vector<std::vector<double>> fid(axis.size(), std::vector<double>(axis.size()));
    for (size_t i = 0; i < axis.size(); ++i)
      for (size_t j = 0; j < axis.size(); ++j) {
        SchemeParams p = default_scheme_params(scheme);
        p.total_time = T;
        p.gamma = axis[i];
        p.kappa = axis[j];
        fid[i][j] = run_transfer(scheme, p, w1, w2, 1e-9).fidelity;
      }
    return fid;
  };
  auto monotone = [&](const std::vector<std::vector<double>>& fid) {
    bool ok = true;
    for (size_t i = 0; i < axis.size(); ++i)
      for (size_t j = 0; j < axis.size(); ++j) {
        if (i > 0 && fid[i][j] > fid[i - 1][j] + 1e-7) ok = false;
        if (j > 0 && fid[i][j] > fid[i][j - 1] + 1e-7) ok = false;
      }
    return ok;
  };

  auto fid_opt = grid_fidelity(Scheme::optical, 7.5e4, 0, 2);
  const double opt_drop_gamma = fid_opt[0][0] - fid_opt[2][0];
  const double opt_drop_kappa = fid_opt[0][0] - fid_opt[0][2];
  auto fid_mot = grid_fidelity(Scheme::motional, 8.0e6, 1, 0);
  const double mot_drop_gamma = fid_mot[0][0] - fid_mot[2][0];
  const double mot_drop_kappa = fid_mot[0][0] - fid_mot[0][2];

  const bool order_ok = opt_drop_kappa > opt_drop_gamma && mot_drop_gamma > mot_drop_kappa;
  const bool mono_ok = monotone(fid_opt) && monotone(fid_mot);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "optical drops (kappa %.4f > gamma %.4f); motional reversed (gamma %.4f > "
                "kappa %.4f); grids monotone",
                opt_drop_kappa, opt_drop_gamma, mot_drop_gamma, mot_drop_kappa);
  report(9, buf, order_ok && mono_ok);
  REQUIRE(order_ok);
  REQUIRE(mono_ok);
}

TEST_CASE("criterion 10: excitation-sector conservation") {
  SchemeParams p;
  p.delta = 10.0;
  p.eta = 0.1;
  p.total_time = 1.0e6;

  auto run_at_cutoff = [&](int cutoff, double* variance) {
    SchemeParams pc = p;
    pc.fock_cutoff = cutoff;
    PulseSchedule sched = default_schedule(pc, 2, 1);
    SchemeModel m = build_motional_effective(pc, sched);
    VectorXc psi0 = m.sys.basis_state({1, 0, 0});
    MatrixXc n_op = m.sys.embed(0, number_op(cutoff)) + m.sys.embed(1, number_op(cutoff)) +
                    m.sys.embed(2, number_op(cutoff));
    EvolutionResult r = evolve(m.h, psi0, pc.total_time, 1e-10);
    if (variance) {
      double mean = 0;
      std::vector<double> series;
      for (const auto& psi : r.trajectory)
        series.push_back(std::real(Complex(psi.adjoint() * (n_op * psi))));
      for (double v : series) mean += v;
      mean /= series.size();
      double var = 0;
      for (double v : series) var += (v - mean) * (v - mean);
      *variance = var / series.size();
    }
    VectorXc target = m.sys.basis_state({0, 1, 0});
    return std::norm(Complex(target.adjoint() * r.final_state()));
  };

  double variance = 0;
  const double fid2 = run_at_cutoff(2, &variance);
  const double fid3 = run_at_cutoff(3, nullptr);
  const bool ok = variance < 1e-9 && std::abs(fid2 - fid3) < 1e-6;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "excitation variance %.2e < 1e-9; cutoff 2 -> 3 fidelity change %.2e < 1e-6",
                variance, std::abs(fid2 - fid3));
  report(10, buf, ok);
  REQUIRE(ok);
}
