#pragma once

// Rotating-frame Hamiltonians for the three two-atom state-transfer schemes
// (optical, motional full/effective, modified optical with Stark
// compensation), their cavity-dark states, the Fig.-3 logical encodings, and
// the end-to-end transfer pipelines including the three-step swap.
//
// All generators are built directly in their rotating-frame forms; the
// non-Hermitian -i gamma / -i kappa dissipators enter the generator (no-jump
// evolution, state never renormalized).

#include "holo/evolver.hpp"
#include "holo/pulses.hpp"

#include <chrono>

namespace holo {

enum class Scheme { optical, motional, modified };

struct SchemeParams {
  double g = 1.0;        // atom-cavity coupling, the frequency unit
  double delta = 0.0;    // laser detuning
  double gamma = 0.0;    // spontaneous rate
  double kappa = 0.0;    // cavity loss rate
  double eta = 0.1;      // Lamb-Dicke parameter (motional)
  double nu = 50.0;      // trap frequency (motional full)
  double omega_peak = 0.05;
  double pulse_a = 0.15;
  double pulse_tau = 0.15;
  double total_time = 4.0e4;
  int fock_cutoff = 2;              // cavity and motional Fock dimension
  bool counter_rotating = false;    // keep the e^{-2 i nu t} sideband term
  double swap_step_time = 4000.0;   // duration of swap steps 1 and 3
  double swap_step_delta = 0.0;     // detuning of swap steps 1 and 3

  void validate() const {
    if (g <= 0) throw std::invalid_argument("SchemeParams: g must be > 0");
    if (gamma < 0 || kappa < 0) throw std::invalid_argument("SchemeParams: negative rate");
    if (fock_cutoff < 2) throw std::invalid_argument("SchemeParams: fock_cutoff < 2");
    if (total_time <= 0) throw std::invalid_argument("SchemeParams: T <= 0");
  }

  std::vector<std::string> regime_warnings(Scheme scheme) const {
    std::vector<std::string> w;
    if (scheme == Scheme::motional) {
      if (!(eta > 0)) w.push_back("motional scheme requires eta > 0");
      if (eta > 0.3) w.push_back("Lamb-Dicke parameter above 0.3");
    }
    if (scheme != Scheme::optical || delta != 0.0) {
      const double m = std::max(omega_peak, scheme == Scheme::motional ? eta * g : g);
      if (delta < 5.0 * m) w.push_back("effective regime marginal: delta < 5 max(coupling)");
    }
    return w;
  }
};

struct SchemeModel {
  CompositeSystem sys;
  TimeDependentHamiltonian h;
  PulseSchedule schedule;
  Projector p1ph;  // cavity photon number >= 1
  Projector pe;    // excited-level population (empty for effective models)
  std::vector<std::string> warnings;
};

inline PulseSchedule default_schedule(const SchemeParams& p, int receiver_id, int sender_id) {
  return counterintuitive_pair(p.total_time, p.omega_peak, p.pulse_a, p.pulse_tau, receiver_id,
                               sender_id);
}

// ---------------------------------------------------------------------------
// Scheme builders
// ---------------------------------------------------------------------------

// Two 3-level atoms (g1, g3, e1) sharing one cavity mode:
// H_i = -(Delta + i gamma)|e><e|_i + (Omega_i(t)|e><g1|_i + g b|e><g3|_i + h.c.),
// plus -i kappa b^dag b once.
inline SchemeModel build_optical(const SchemeParams& p, const PulseSchedule& schedule) {
  p.validate();
  const int nc = p.fock_cutoff;
  CompositeSystem sys({{"atom1", 3, {"g1", "g3", "e1"}},
                       {"atom2", 3, {"g1", "g3", "e1"}},
                       {"cav", nc, fock_labels(nc)}});
  constexpr int G1 = 0, G3 = 1, E1 = 2;
  const MatrixXc b = annihilator(nc);
  const MatrixXc nb = number_op(nc);

  SchemeModel m{sys, {}, schedule, {}, {}, p.regime_warnings(Scheme::optical)};
  m.h.constant = MatrixXc::Zero(sys.dim(), sys.dim());
  for (int atom = 0; atom < 2; ++atom) {
    MatrixXc ee = sys.embed(atom, ketbra(3, E1, E1));
    m.h.constant += Complex(-p.delta, -p.gamma) * ee;
    MatrixXc cav_coupling =
        sys.embed_product({{atom, ketbra(3, E1, G3)}, {2, b}});
    m.h.constant += p.g * (cav_coupling + cav_coupling.adjoint().eval());
    MatrixXc drive = sys.embed(atom, ketbra(3, E1, G1));
    MatrixXc drive_h = drive + drive.adjoint().eval();
    const int id = atom + 1;
    m.h.terms.push_back({drive_h, [schedule, id](double t) {
                           return Complex(schedule.amplitude(id, t), 0);
                         }});
  }
  m.h.constant += Complex(0, -p.kappa) * sys.embed(2, nb);

  m.p1ph = {"p1ph", sys.indices_where(2, [](int n) { return n >= 1; })};
  std::vector<int> e_idx = sys.indices_where(0, [](int l) { return l == E1; });
  for (int i : sys.indices_where(1, [](int l) { return l == E1; })) e_idx.push_back(i);
  std::sort(e_idx.begin(), e_idx.end());
  e_idx.erase(std::unique(e_idx.begin(), e_idx.end()), e_idx.end());
  m.pe = {"pe", e_idx};
  return m;
}

// Two trapped 2-level atoms (g3, e1) with motional modes and the cavity:
// H_i = -(Delta + i gamma)|e><e|_i + (Omega_i(t)|e><g3|_i + h.c.)
//       + eta g ((a_i^dag b + a_i b e^{-2 i nu t})|e><g3|_i + h.c.),
// plus -i kappa b^dag b. The e^{-2 i nu t} term is kept only when
// counter_rotating is set.
inline SchemeModel build_motional_full(const SchemeParams& p, const PulseSchedule& schedule) {
  p.validate();
  const int nc = p.fock_cutoff;
  CompositeSystem sys({{"int1", 2, {"g3", "e1"}},
                       {"int2", 2, {"g3", "e1"}},
                       {"cm1", nc, fock_labels(nc)},
                       {"cm2", nc, fock_labels(nc)},
                       {"cav", nc, fock_labels(nc)}});
  constexpr int G3 = 0, E1 = 1;
  const MatrixXc a = annihilator(nc);
  const MatrixXc adag = a.adjoint();
  const MatrixXc nb = number_op(nc);

  SchemeModel m{sys, {}, schedule, {}, {}, p.regime_warnings(Scheme::motional)};
  m.h.constant = MatrixXc::Zero(sys.dim(), sys.dim());
  const double nu = p.nu;
  for (int atom = 0; atom < 2; ++atom) {
    const int int_f = atom, cm_f = 2 + atom;
    m.h.constant += Complex(-p.delta, -p.gamma) * sys.embed(int_f, ketbra(2, E1, E1));
    MatrixXc red = sys.embed_product({{int_f, ketbra(2, E1, G3)}, {cm_f, adag}, {4, a}});
    m.h.constant += p.eta * p.g * (red + red.adjoint().eval());
    MatrixXc drive = sys.embed(int_f, ketbra(2, E1, G3));
    MatrixXc drive_h = drive + drive.adjoint().eval();
    const int id = atom + 1;
    m.h.terms.push_back({drive_h, [schedule, id](double t) {
                           return Complex(schedule.amplitude(id, t), 0);
                         }});
    if (p.counter_rotating) {
      MatrixXc cr = sys.embed_product({{int_f, ketbra(2, E1, G3)}, {cm_f, a}, {4, a}});
      const double eg = p.eta * p.g;
      m.h.terms.push_back({cr, [eg, nu](double t) { return eg * std::exp(Complex(0, -2 * nu * t)); }});
      MatrixXc cr_dag = cr.adjoint();
      m.h.terms.push_back(
          {cr_dag, [eg, nu](double t) { return eg * std::exp(Complex(0, 2 * nu * t)); }});
    }
  }
  m.h.constant += Complex(0, -p.kappa) * sys.embed(4, nb);

  m.p1ph = {"p1ph", sys.indices_where(4, [](int n) { return n >= 1; })};
  std::vector<int> e_idx = sys.indices_where(0, [](int l) { return l == E1; });
  for (int i : sys.indices_where(1, [](int l) { return l == E1; })) e_idx.push_back(i);
  std::sort(e_idx.begin(), e_idx.end());
  e_idx.erase(std::unique(e_idx.begin(), e_idx.end()), e_idx.end());
  m.pe = {"pe", e_idx};
  return m;
}

// Adiabatically eliminated motional model on cm1 x cm2 x cavity:
// H = sum_i eta g Omega_i(t)/(Delta + i gamma) (a_i b^dag + a_i^dag b)
//     - i kappa b^dag b - i sum_i gamma Omega_i(t)^2/(Delta^2 + gamma^2).
inline SchemeModel build_motional_effective(const SchemeParams& p,
                                            const PulseSchedule& schedule) {
  p.validate();
  const int nc = p.fock_cutoff;
  CompositeSystem sys({{"cm1", nc, fock_labels(nc)},
                       {"cm2", nc, fock_labels(nc)},
                       {"cav", nc, fock_labels(nc)}});
  const MatrixXc a = annihilator(nc);
  const MatrixXc nb = number_op(nc);

  SchemeModel m{sys, {}, schedule, {}, {}, p.regime_warnings(Scheme::motional)};
  m.h.constant = Complex(0, -p.kappa) * sys.embed(2, nb);
  const Complex denom(p.delta, p.gamma);
  const double decay_denom = p.delta * p.delta + p.gamma * p.gamma;
  const MatrixXc ident = MatrixXc::Identity(sys.dim(), sys.dim());
  for (int atom = 0; atom < 2; ++atom) {
    MatrixXc ab_dag = sys.embed_product({{atom, a}, {2, a.adjoint()}});
    MatrixXc exchange = ab_dag + ab_dag.adjoint().eval();
    const int id = atom + 1;
    const double etag = p.eta * p.g;
    m.h.terms.push_back({exchange, [schedule, id, etag, denom](double t) {
                           return etag * schedule.amplitude(id, t) / denom;
                         }});
    const double gam = p.gamma;
    if (gam > 0) {
      m.h.terms.push_back({ident, [schedule, id, gam, decay_denom](double t) {
                             const double om = schedule.amplitude(id, t);
                             return Complex(0, -gam * om * om / decay_denom);
                           }});
    }
  }
  m.p1ph = {"p1ph", sys.indices_where(2, [](int n) { return n >= 1; })};
  m.pe = {"pe", {}};
  return m;
}

// Stark-compensated optical scheme on 2-level atoms (g1, g3) x cavity:
// H_i = -2 i gamma Omega_i(t)^2/(Delta^2+gamma^2)|g1><g1|_i
//       + g^2/(Delta + i gamma) b^dag b |g3><g3|_i
//       + g Omega_i(t)/(Delta + i gamma) (b^dag |g3><g1|_i + b |g1><g3|_i)
//       - i kappa b^dag b.
inline SchemeModel build_modified_optical(const SchemeParams& p, const PulseSchedule& schedule) {
  p.validate();
  const int nc = p.fock_cutoff;
  CompositeSystem sys({{"atom1", 2, {"g1", "g3"}},
                       {"atom2", 2, {"g1", "g3"}},
                       {"cav", nc, fock_labels(nc)}});
  constexpr int G1 = 0, G3 = 1;
  const MatrixXc b = annihilator(nc);
  const MatrixXc nb = number_op(nc);

  SchemeModel m{sys, {}, schedule, {}, {}, p.regime_warnings(Scheme::modified)};
  const Complex denom(p.delta, p.gamma);
  const double decay_denom = p.delta * p.delta + p.gamma * p.gamma;
  m.h.constant = Complex(0, -p.kappa) * sys.embed(2, nb);
  for (int atom = 0; atom < 2; ++atom) {
    MatrixXc kerr = sys.embed_product({{atom, ketbra(2, G3, G3)}, {2, nb}});
    m.h.constant += (p.g * p.g / denom) * kerr;
    MatrixXc raise = sys.embed_product({{atom, ketbra(2, G3, G1)}, {2, b.adjoint()}});
    MatrixXc pair = raise + raise.adjoint().eval();
    const int id = atom + 1;
    const double g = p.g;
    m.h.terms.push_back({pair, [schedule, id, g, denom](double t) {
                           return g * schedule.amplitude(id, t) / denom;
                         }});
    const double gam = p.gamma;
    if (gam > 0) {
      MatrixXc g1g1 = sys.embed(atom, ketbra(2, G1, G1));
      m.h.terms.push_back({g1g1, [schedule, id, gam, decay_denom](double t) {
                             const double om = schedule.amplitude(id, t);
                             return Complex(0, -2.0 * gam * om * om / decay_denom);
                           }});
    }
  }
  m.p1ph = {"p1ph", sys.indices_where(2, [](int n) { return n >= 1; })};
  m.pe = {"pe", {}};
  return m;
}

// ---------------------------------------------------------------------------
// Dark states
// ---------------------------------------------------------------------------

// Normalized cavity-dark states in each scheme's labeled basis. Signs follow
// the annihilation requirement of the builders above (the two-term states
// need the relative minus; the optical three-term state interferes through
// its one-photon component).
inline VectorXc scheme_dark_state(Scheme scheme, double omega1, double omega2, double g,
                                  int fock_cutoff = 2) {
  if (omega1 == 0.0 && omega2 == 0.0)
    throw std::invalid_argument("scheme_dark_state: both couplings zero");
  switch (scheme) {
    case Scheme::optical: {
      CompositeSystem sys({{"atom1", 3, {"g1", "g3", "e1"}},
                           {"atom2", 3, {"g1", "g3", "e1"}},
                           {"cav", fock_cutoff, fock_labels(fock_cutoff)}});
      VectorXc v = VectorXc::Zero(sys.dim());
      v[sys.index_of({0, 1, 0})] = omega2 * g;        // |g1 g3 0>
      v[sys.index_of({1, 0, 0})] = omega1 * g;        // |g3 g1 0>
      v[sys.index_of({1, 1, 1})] = -omega1 * omega2;  // |g3 g3 1>
      return v / v.norm();
    }
    case Scheme::motional: {
      CompositeSystem sys({{"cm1", fock_cutoff, fock_labels(fock_cutoff)},
                           {"cm2", fock_cutoff, fock_labels(fock_cutoff)},
                           {"cav", fock_cutoff, fock_labels(fock_cutoff)}});
      VectorXc v = VectorXc::Zero(sys.dim());
      v[sys.index_of({1, 0, 0})] = omega2;
      v[sys.index_of({0, 1, 0})] = -omega1;
      return v / v.norm();
    }
    case Scheme::modified: {
      CompositeSystem sys({{"atom1", 2, {"g1", "g3"}},
                           {"atom2", 2, {"g1", "g3"}},
                           {"cav", fock_cutoff, fock_labels(fock_cutoff)}});
      VectorXc v = VectorXc::Zero(sys.dim());
      v[sys.index_of({0, 1, 0})] = omega2;   // |g1 g3 0>
      v[sys.index_of({1, 0, 0})] = -omega1;  // |g3 g1 0>
      return v / v.norm();
    }
  }
  throw std::invalid_argument("scheme_dark_state: undefined scheme");
}

// ---------------------------------------------------------------------------
// Logical encodings (transfer-scheme tables plus the single-atom 2-qubit one)
// ---------------------------------------------------------------------------

struct LogicalEncoding {
  // transfer encoding: atom1 {g3 -> 0, g1 -> 1}; atom2 {g3 -> 0, g4 -> 1, g1 -> 2, g2 -> 3}
  static const std::vector<std::pair<std::string, int>>& atom1_table() {
    static const std::vector<std::pair<std::string, int>> t = {{"g3", 0}, {"g1", 1}};
    return t;
  }
  static const std::vector<std::pair<std::string, int>>& atom2_table() {
    static const std::vector<std::pair<std::string, int>> t = {
        {"g3", 0}, {"g4", 1}, {"g1", 2}, {"g2", 3}};
    return t;
  }
  // single-atom table: |g1>=|00>, |g2>=|01>, |g3>=|10>, |g4>=|11>
  static const std::vector<std::pair<std::string, int>>& single_atom_table() {
    static const std::vector<std::pair<std::string, int>> t = {
        {"g1", 0}, {"g2", 1}, {"g3", 2}, {"g4", 3}};
    return t;
  }

  static bool is_bijection(const std::vector<std::pair<std::string, int>>& table) {
    std::vector<std::string> keys;
    std::vector<int> vals;
    for (const auto& [k, v] : table) {
      keys.push_back(k);
      vals.push_back(v);
    }
    std::sort(keys.begin(), keys.end());
    std::sort(vals.begin(), vals.end());
    return std::adjacent_find(keys.begin(), keys.end()) == keys.end() &&
           std::adjacent_find(vals.begin(), vals.end()) == vals.end();
  }

  static int atom2_word(const std::string& label) {
    for (const auto& [k, v] : atom2_table())
      if (k == label) return v;
    throw std::invalid_argument("LogicalEncoding: unknown label " + label);
  }
};

// ---------------------------------------------------------------------------
// Transfer pipelines
// ---------------------------------------------------------------------------

struct TransferResult {
  double fidelity = 0;
  double max_p1ph = 0;
  double int_p1ph = 0;
  double int_pe = 0;
  double norm_loss = 0;
  double wallclock = 0;  // seconds, excluded from CSV rows
};

namespace detail {

struct TransferSetup {
  SchemeModel model;
  VectorXc psi0;
  VectorXc target;
};

inline TransferSetup transfer_setup(Scheme scheme, const SchemeParams& p, int word1, int word2) {
  if (scheme == Scheme::motional) {
    if (!((word1 == 0 || word1 == 1) && word2 == 0))
      throw std::invalid_argument(
          "run_transfer: motional scheme encodes atom1 word in {0,1} with atom2 word 0");
    PulseSchedule sched = default_schedule(p, /*receiver*/ 2, /*sender*/ 1);
    SchemeModel m = build_motional_effective(p, sched);
    VectorXc psi0 = m.sys.basis_state({word1 == 1 ? 1 : 0, 0, 0});
    VectorXc target = m.sys.basis_state({0, word1 == 1 ? 1 : 0, 0});
    return {std::move(m), std::move(psi0), std::move(target)};
  }
  // optical / modified: words over the simulated Lambda channel only
  const bool a1_g1 = word1 == 1;
  const bool a2_g1 = word2 == 2;
  if (!(word1 == 0 || word1 == 1) || !(word2 == 0 || word2 == 2))
    throw std::invalid_argument(
        "run_transfer: word outside the simulated g1/g3 channel (g2/g4 states need the "
        "second Lambda channel)");
  if (a1_g1 && a2_g1)
    throw std::invalid_argument("run_transfer: both atoms loaded leaves the one-excitation sector");
  // receiver = atom ending in g1; for the trivial word order is irrelevant
  const int receiver = a2_g1 ? 1 : 2;
  const int sender = 3 - receiver;
  PulseSchedule sched = default_schedule(p, receiver, sender);
  SchemeModel m = scheme == Scheme::optical ? build_optical(p, sched)
                                            : build_modified_optical(p, sched);
  // both builders order the atom factor as (g1, g3[, e1])
  auto phys = [](bool in_g1) { return in_g1 ? 0 : 1; };
  VectorXc psi0 = m.sys.basis_state({phys(a1_g1), phys(a2_g1), 0});
  VectorXc target = m.sys.basis_state({phys(a2_g1), phys(a1_g1), 0});
  return {std::move(m), std::move(psi0), std::move(target)};
}

inline TransferResult score(const SchemeModel& m, const EvolutionResult& evo,
                            const VectorXc& target, double wallclock) {
  FidelityReport rep = fidelity_and_populations(evo, target);
  TransferResult r;
  r.fidelity = rep.fidelity;
  r.max_p1ph = rep.projector_stats[0].max;
  r.int_p1ph = rep.projector_stats[0].integral;
  r.int_pe = rep.projector_stats[1].integral;
  r.norm_loss = 1.0 - evo.final_norm2;
  r.wallclock = wallclock;
  (void)m;
  return r;
}

}  // namespace detail

// Full pipeline: encode, build generator, evolve under counterintuitive
// pulses, score against the target word (fidelity on the unnormalized state).
inline TransferResult run_transfer(Scheme scheme, const SchemeParams& p, int word1, int word2,
                                   double tol = 1e-9, EvolutionResult* evo_out = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  detail::TransferSetup setup = detail::transfer_setup(scheme, p, word1, word2);
  EvolutionResult evo = evolve(setup.model.h, setup.psi0, p.total_time, tol,
                               {setup.model.p1ph, setup.model.pe});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  TransferResult r = detail::score(setup.model, evo, setup.target, secs);
  if (evo_out) *evo_out = std::move(evo);
  return r;
}

// sup over time and tracked mode populations of |P_full - P_effective| for
// the motional scheme, matched initial states under the natural embedding.
inline double effective_equivalence_report(const SchemeParams& p, double tol = 1e-10) {
  PulseSchedule sched = default_schedule(p, 2, 1);
  SchemeModel full = build_motional_full(p, sched);
  SchemeModel eff = build_motional_effective(p, sched);

  auto mode_projectors = [](const SchemeModel& m, const std::vector<std::string>& labels) {
    std::vector<Projector> out;
    for (const auto& lab : labels) {
      const int f = m.sys.factor_index(lab);
      out.push_back({lab, m.sys.indices_where(f, [](int n) { return n >= 1; })});
    }
    return out;
  };
  const std::vector<std::string> labels = {"cm1", "cm2", "cav"};

  VectorXc psi0_full = full.sys.basis_state({0, 0, 1, 0, 0});  // g3 g3, n_cm1 = 1
  VectorXc psi0_eff = eff.sys.basis_state({1, 0, 0});
  EvolutionResult r_full =
      evolve(full.h, psi0_full, p.total_time, tol, mode_projectors(full, labels));
  EvolutionResult r_eff = evolve(eff.h, psi0_eff, p.total_time, tol, mode_projectors(eff, labels));

  double sup = 0;
  for (size_t k = 0; k < labels.size(); ++k)
    for (int i = 0; i < (int)r_full.times.size(); ++i)
      sup = std::max(sup, std::abs(r_full.populations[k][i] - r_eff.populations[k][i]));
  return sup;
}

// ---------------------------------------------------------------------------
// Three-step swap (internal -> motional -> motional -> internal)
// ---------------------------------------------------------------------------

struct SwapResult {
  TransferResult transfer;
  double max_p1ph_step2 = 0;
};

// Steps 1/3 are resonant single-atom Lambda passages
// |g1, 0_cm> -- Omega_c(t) -- |e1, 0_cm> -- eta Omega_s(t) a -- |g3, 1_cm>
// with the same Gaussian geometry as step 2 and matched peaks
// (eta Omega_s = Omega_c = omega_peak); step 2 is the eliminated
// cavity-mediated motional exchange.
inline SwapResult three_step_swap(const SchemeParams& p, int word1, int word2,
                                  double tol = 1e-9) {
  if (!((word1 == 0 || word1 == 1) && word2 == 0))
    throw std::invalid_argument("three_step_swap: supported initial words are (0,0) and (1,0)");
  const auto t0 = std::chrono::steady_clock::now();
  const int nc = p.fock_cutoff;
  CompositeSystem sys({{"int1", 3, {"g1", "g3", "e1"}},
                       {"cm1", nc, fock_labels(nc)},
                       {"int2", 3, {"g1", "g3", "e1"}},
                       {"cm2", nc, fock_labels(nc)},
                       {"cav", nc, fock_labels(nc)}});
  constexpr int G1 = 0, G3 = 1, E1 = 2;
  const MatrixXc a = annihilator(nc);
  const MatrixXc nb = number_op(nc);

  const Projector p1ph{"p1ph", sys.indices_where(4, [](int n) { return n >= 1; })};
  std::vector<int> e_idx = sys.indices_where(0, [](int l) { return l == E1; });
  for (int i : sys.indices_where(2, [](int l) { return l == E1; })) e_idx.push_back(i);
  std::sort(e_idx.begin(), e_idx.end());
  e_idx.erase(std::unique(e_idx.begin(), e_idx.end()), e_idx.end());
  const Projector pe{"pe", e_idx};

  // single-atom Lambda step; direction false: |g1,0> -> |g3,1>, true: reverse
  auto lambda_step = [&](int atom_factor, int cm_factor, bool reverse) {
    TimeDependentHamiltonian h;
    h.constant = Complex(-p.swap_step_delta, -p.gamma) * sys.embed(atom_factor, ketbra(3, E1, E1));
    h.constant += Complex(0, -p.kappa) * sys.embed(4, nb);
    MatrixXc carrier = sys.embed(atom_factor, ketbra(3, E1, G1));
    MatrixXc carrier_h = carrier + carrier.adjoint().eval();
    MatrixXc sideband = sys.embed_product({{atom_factor, ketbra(3, E1, G3)}, {cm_factor, a}});
    MatrixXc sideband_h = sideband + sideband.adjoint().eval();
    // counterintuitive: the leg holding the target state pulses first
    const double t_sb = reverse ? 0.5 + p.pulse_a : 0.5 - p.pulse_a;
    const double t_ca = reverse ? 0.5 - p.pulse_a : 0.5 + p.pulse_a;
    PulseSchedule sched;
    sched.total_time = p.swap_step_time;
    sched.pulses = {{1, {p.omega_peak, t_sb, p.pulse_tau}}, {2, {p.omega_peak, t_ca, p.pulse_tau}}};
    h.terms.push_back({sideband_h, [sched](double t) { return Complex(sched.amplitude(1, t), 0); }});
    h.terms.push_back({carrier_h, [sched](double t) { return Complex(sched.amplitude(2, t), 0); }});
    return h;
  };

  // step 2: eliminated exchange on (cm1, cm2, cav)
  auto step2 = [&]() {
    TimeDependentHamiltonian h;
    h.constant = Complex(0, -p.kappa) * sys.embed(4, nb);
    const Complex denom(p.delta, p.gamma);
    const double decay_denom = p.delta * p.delta + p.gamma * p.gamma;
    PulseSchedule sched =
        counterintuitive_pair(p.total_time, p.omega_peak, p.pulse_a, p.pulse_tau, 2, 1);
    const MatrixXc ident = MatrixXc::Identity(sys.dim(), sys.dim());
    for (int atom = 0; atom < 2; ++atom) {
      const int cm_f = atom == 0 ? 1 : 3;
      MatrixXc ab_dag = sys.embed_product({{cm_f, a}, {4, a.adjoint()}});
      MatrixXc exchange = ab_dag + ab_dag.adjoint().eval();
      const int id = atom + 1;
      const double etag = p.eta * p.g;
      h.terms.push_back({exchange, [sched, id, etag, denom](double t) {
                           return etag * sched.amplitude(id, t) / denom;
                         }});
      const double gam = p.gamma;
      if (gam > 0)
        h.terms.push_back({ident, [sched, id, gam, decay_denom](double t) {
                             const double om = sched.amplitude(id, t);
                             return Complex(0, -gam * om * om / decay_denom);
                           }});
    }
    return h;
  };

  VectorXc psi = sys.basis_state({word1 == 1 ? G1 : G3, 0, G3, 0, 0});
  const VectorXc target = sys.basis_state({G3, 0, word1 == 1 ? G1 : G3, 0, 0});

  double max_p1ph = 0, int_p1ph = 0, int_pe = 0, max_p1ph_step2 = 0;
  auto run_piece = [&](const TimeDependentHamiltonian& h, double T, bool is_step2) {
    EvolutionResult r = evolve(h, psi, T, tol, {p1ph, pe});
    FidelityReport rep = fidelity_and_populations(r, target);
    max_p1ph = std::max(max_p1ph, rep.projector_stats[0].max);
    if (is_step2) max_p1ph_step2 = rep.projector_stats[0].max;
    int_p1ph += rep.projector_stats[0].integral;
    int_pe += rep.projector_stats[1].integral;
    psi = r.final_state();
  };

  run_piece(lambda_step(0, 1, false), p.swap_step_time, false);
  run_piece(step2(), p.total_time, true);
  run_piece(lambda_step(2, 3, true), p.swap_step_time, false);

  SwapResult out;
  out.transfer.fidelity = std::norm((target.adjoint() * psi)(0, 0));
  out.transfer.max_p1ph = max_p1ph;
  out.transfer.int_p1ph = int_p1ph;
  out.transfer.int_pe = int_pe;
  out.transfer.norm_loss = 1.0 - psi.squaredNorm();
  out.transfer.wallclock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.max_p1ph_step2 = max_p1ph_step2;
  return out;
}

}  // namespace holo
