#pragma once

// (N+1)-level Lambda system: spherical control coordinates, couplings, the
// dark-state frames of the two analytic charts plus numeric continuation,
// and the geometric objects (connection, curvature, holonomy-rank bound)
// living on the control manifold.
//
// Conventions fixed here and relied on everywhere else:
//  - basis order (|g1>,...,|gN>,|e>), excited index N (0-based);
//  - hbar = 1, frequencies in units of the atom-cavity coupling g;
//  - H = sum_k (Omega_k |g_k><e| + conj(Omega_k) |e><g_k|), so the bright
//    state N^{-1/2} sum_k Omega_k |g_k> carries all coupling to |e> and the
//    analytic frames below are exact dark states for complex phases;
//  - coordinates per point: (theta_1..theta_{N-1}, phi_2..phi_N).

#include "holo/core.hpp"

#include <algorithm>
#include <optional>
#include <random>

namespace holo {

enum class Chart { analytic_n3, analytic_n5, numeric };

struct SphericalParams {
  int n_ground = 3;            // N >= 2
  std::vector<double> thetas;  // theta_1..theta_{N-1}
  std::vector<double> phis;    // phi_2..phi_N
  double magnitude = 1.0;      // |Omega| >= 0, units of g

  SphericalParams() = default;
  SphericalParams(int n, std::vector<double> th, std::vector<double> ph, double mag = 1.0)
      : n_ground(n), thetas(std::move(th)), phis(std::move(ph)), magnitude(mag) {
    validate();
  }

  static SphericalParams zero(int n, double mag = 1.0) {
    return SphericalParams(n, std::vector<double>(n - 1, 0.0), std::vector<double>(n - 1, 0.0),
                           mag);
  }

  void validate() const {
    if (n_ground < 2) throw std::invalid_argument("SphericalParams: need N >= 2");
    if ((int)thetas.size() != n_ground - 1 || (int)phis.size() != n_ground - 1)
      throw std::invalid_argument("SphericalParams: need N-1 thetas and N-1 phis");
    if (magnitude < 0.0) throw std::invalid_argument("SphericalParams: |Omega| < 0");
  }

  int coord_count() const { return 2 * (n_ground - 1); }
  double coord(int mu) const {
    return mu < n_ground - 1 ? thetas[mu] : phis[mu - (n_ground - 1)];
  }
  double& coord(int mu) {
    return mu < n_ground - 1 ? thetas[mu] : phis[mu - (n_ground - 1)];
  }
};

struct CouplingVector {
  std::vector<Complex> omegas;  // Omega_1..Omega_N
  int n() const { return (int)omegas.size(); }
  double norm2() const {
    double s = 0;
    for (const auto& w : omegas) s += std::norm(w);
    return s;
  }
};

// Generalized spherical coordinates: Omega_1 = |O| sin t1,
// Omega_k = |O| e^{-i phi_k} cos t1..cos t_{k-1} sin t_k (k < N),
// Omega_N = |O| e^{-i phi_N} cos t1..cos t_{N-1}.
inline CouplingVector couplings_from_spherical(const SphericalParams& p) {
  p.validate();
  const int n = p.n_ground;
  CouplingVector c;
  c.omegas.resize(n);
  double cos_prefix = 1.0;
  for (int k = 0; k < n; ++k) {
    double amp;
    if (k < n - 1) {
      amp = cos_prefix * std::sin(p.thetas[k]);
      cos_prefix *= std::cos(p.thetas[k]);
    } else {
      amp = cos_prefix;  // trailing cosine product
    }
    Complex phase = k == 0 ? Complex(1, 0) : std::exp(Complex(0, -p.phis[k - 1]));
    c.omegas[k] = p.magnitude * amp * phase;
  }
  return c;
}

inline MatrixXc build_hamiltonian(const CouplingVector& c) {
  const int n = c.n();
  MatrixXc h = MatrixXc::Zero(n + 1, n + 1);
  for (int k = 0; k < n; ++k) {
    h(k, n) = c.omegas[k];
    h(n, k) = std::conj(c.omegas[k]);
  }
  return h;
}

inline VectorXc bright_state(const CouplingVector& c) {
  const double nn = c.norm2();
  if (nn == 0.0) throw std::invalid_argument("bright_state: all couplings zero");
  VectorXc b = VectorXc::Zero(c.n() + 1);
  for (int k = 0; k < c.n(); ++k) b[k] = c.omegas[k] / std::sqrt(nn);
  return b;
}

struct DarkFrame {
  MatrixXc states;  // (N+1) x (N-1), columns orthonormal, zero |e> row
  Chart chart_id = Chart::numeric;
  int n_ground() const { return (int)states.rows() - 1; }
};

// ---------------------------------------------------------------------------
// Analytic charts. Frame components are signed monomials
// sign * prod cos(theta_i) * prod sin(theta_j) * e^{-i phi_p}, which keeps
// first and second derivatives exact.
// ---------------------------------------------------------------------------

namespace chart_detail {

struct Monomial {
  double sign = 1.0;
  std::vector<int> cosv;  // theta indices appearing as cosines
  std::vector<int> sinv;  // theta indices appearing as sines
  int phase = -1;         // phi index (phi_{phase+2}), or -1
};

inline Complex mono_value(const Monomial& m, const SphericalParams& p) {
  double r = m.sign;
  for (int k : m.cosv) r *= std::cos(p.thetas[k]);
  for (int k : m.sinv) r *= std::sin(p.thetas[k]);
  if (m.phase < 0) return Complex(r, 0);
  return r * std::exp(Complex(0, -p.phis[m.phase]));
}

// d/d(coordinate mu) as a list of (coefficient, monomial).
inline std::vector<std::pair<Complex, Monomial>> mono_derivative(const Monomial& m, int mu,
                                                                 int n_ground) {
  std::vector<std::pair<Complex, Monomial>> out;
  const int n_theta = n_ground - 1;
  if (mu < n_theta) {
    for (size_t i = 0; i < m.cosv.size(); ++i) {
      if (m.cosv[i] != mu) continue;
      Monomial d = m;
      d.cosv.erase(d.cosv.begin() + i);
      d.sinv.push_back(mu);
      out.emplace_back(Complex(-1, 0), d);
    }
    for (size_t i = 0; i < m.sinv.size(); ++i) {
      if (m.sinv[i] != mu) continue;
      Monomial d = m;
      d.sinv.erase(d.sinv.begin() + i);
      d.cosv.push_back(mu);
      out.emplace_back(Complex(1, 0), d);
    }
  } else {
    if (m.phase == mu - n_theta) out.emplace_back(Complex(0, -1), m);
  }
  return out;
}

struct FrameTable {
  int n_ground = 0;
  // entries[col] = list of (row, monomial)
  std::vector<std::vector<std::pair<int, Monomial>>> entries;
};

inline const FrameTable& frame_table_n3() {
  static const FrameTable t = [] {
    FrameTable f;
    f.n_ground = 3;
    f.entries.resize(2);
    // psi^1 = cos t1 |g1> - sin t1 (e^{-i p2} sin t2 |g2> + e^{-i p3} cos t2 |g3>)
    f.entries[0] = {{0, {+1.0, {0}, {}, -1}}, {1, {-1.0, {}, {0, 1}, 0}}, {2, {-1.0, {1}, {0}, 1}}};
    // psi^2 = -e^{-i p2} cos t2 |g2> + e^{-i p3} sin t2 |g3>
    f.entries[1] = {{1, {-1.0, {1}, {}, 0}}, {2, {+1.0, {}, {1}, 1}}};
    return f;
  }();
  return t;
}

inline const FrameTable& frame_table_n5() {
  static const FrameTable t = [] {
    FrameTable f;
    f.n_ground = 5;
    f.entries.resize(4);
    f.entries[0] = {{0, {+1.0, {0}, {}, -1}},
                    {1, {-1.0, {}, {0, 1}, 0}},
                    {2, {-1.0, {1}, {0, 2}, 1}},
                    {3, {-1.0, {1, 2}, {0, 3}, 2}},
                    {4, {-1.0, {1, 2, 3}, {0}, 3}}};
    f.entries[1] = {{1, {+1.0, {1}, {}, 0}},
                    {2, {-1.0, {}, {1, 2}, 1}},
                    {3, {-1.0, {2}, {1, 3}, 2}},
                    {4, {-1.0, {2, 3}, {1}, 3}}};
    f.entries[2] = {{2, {+1.0, {2}, {}, 1}},
                    {3, {-1.0, {}, {2, 3}, 2}},
                    {4, {-1.0, {3}, {2}, 3}}};
    f.entries[3] = {{3, {-1.0, {3}, {}, 2}}, {4, {+1.0, {}, {3}, 3}}};
    return f;
  }();
  return t;
}

inline const FrameTable& frame_table(Chart chart) {
  switch (chart) {
    case Chart::analytic_n3: return frame_table_n3();
    case Chart::analytic_n5: return frame_table_n5();
    default: throw std::invalid_argument("no frame table for numeric chart");
  }
}

inline MatrixXc table_frame(const FrameTable& t, const SphericalParams& p) {
  MatrixXc psi = MatrixXc::Zero(t.n_ground + 1, t.n_ground - 1);
  for (int col = 0; col < (int)t.entries.size(); ++col)
    for (const auto& [row, mono] : t.entries[col]) psi(row, col) += mono_value(mono, p);
  return psi;
}

inline MatrixXc table_frame_derivative(const FrameTable& t, const SphericalParams& p, int mu) {
  MatrixXc d = MatrixXc::Zero(t.n_ground + 1, t.n_ground - 1);
  for (int col = 0; col < (int)t.entries.size(); ++col)
    for (const auto& [row, mono] : t.entries[col])
      for (const auto& [coeff, dm] : mono_derivative(mono, mu, t.n_ground))
        d(row, col) += coeff * mono_value(dm, p);
  return d;
}

inline MatrixXc table_frame_second_derivative(const FrameTable& t, const SphericalParams& p,
                                              int mu, int nu) {
  MatrixXc d = MatrixXc::Zero(t.n_ground + 1, t.n_ground - 1);
  for (int col = 0; col < (int)t.entries.size(); ++col)
    for (const auto& [row, mono] : t.entries[col])
      for (const auto& [c1, dm1] : mono_derivative(mono, mu, t.n_ground))
        for (const auto& [c2, dm2] : mono_derivative(dm1, nu, t.n_ground))
          d(row, col) += c1 * c2 * mono_value(dm2, p);
  return d;
}

}  // namespace chart_detail

inline int chart_n_ground(Chart chart) {
  switch (chart) {
    case Chart::analytic_n3: return 3;
    case Chart::analytic_n5: return 5;
    default: throw std::invalid_argument("numeric chart has no fixed N");
  }
}

inline DarkFrame analytic_dark_frame(const SphericalParams& p, Chart chart) {
  const auto& t = chart_detail::frame_table(chart);
  if (p.n_ground != t.n_ground)
    throw std::invalid_argument("analytic_dark_frame: N does not match chart");
  return DarkFrame{chart_detail::table_frame(t, p), chart};
}

// ---------------------------------------------------------------------------
// Numeric dark basis with smooth-gauge continuation
// ---------------------------------------------------------------------------

// Orthonormal basis of the zero-energy eigenspace (the orthocomplement of the
// bright vector inside the ground manifold). With a reference frame the
// result is gauge-aligned to it (phase + within-space rotation maximizing
// overlap); alignment quality below 0.5 signals a chart breakdown.
inline DarkFrame dark_basis(const CouplingVector& c,
                            const std::optional<DarkFrame>& reference = std::nullopt) {
  const int n = c.n();
  const double nn = c.norm2();
  if (nn == 0.0)
    throw std::invalid_argument("dark_basis: all couplings zero, dark space degenerate");
  VectorXc b(n);
  for (int k = 0; k < n; ++k) b[k] = c.omegas[k] / std::sqrt(nn);
  // Householder complement of b inside C^N: QR of the n x 1 matrix b gives Q
  // whose trailing n-1 columns are an orthonormal basis of b-perp.
  Eigen::HouseholderQR<MatrixXc> qr(b);
  MatrixXc q = qr.householderQ();
  MatrixXc ground = q.rightCols(n - 1);
  MatrixXc states = MatrixXc::Zero(n + 1, n - 1);
  states.topRows(n) = ground;
  if (reference) {
    if (reference->states.rows() != n + 1 || reference->states.cols() != n - 1)
      throw std::invalid_argument("dark_basis: reference frame has wrong shape");
    // Procrustes alignment: W = U V^dag from svd(D^dag R), aligned = D U V^dag.
    MatrixXc ov = states.adjoint() * reference->states;
    Eigen::JacobiSVD<MatrixXc> svd(ov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() < 0.5)
      throw std::runtime_error("dark_basis: gauge discontinuity (overlap below 0.5)");
    states = states * (svd.matrixU() * svd.matrixV().adjoint());
  }
  return DarkFrame{states, Chart::numeric};
}

inline DarkFrame dark_frame_at(const SphericalParams& p, Chart chart,
                               const std::optional<DarkFrame>& reference = std::nullopt) {
  if (chart == Chart::numeric) return dark_basis(couplings_from_spherical(p), reference);
  return analytic_dark_frame(p, chart);
}

// ---------------------------------------------------------------------------
// Connection and curvature
// ---------------------------------------------------------------------------

struct ConnectionSample {
  SphericalParams point;
  std::vector<MatrixXc> components;  // A_mu, (N-1)x(N-1) anti-Hermitian
};

struct CurvatureComponent {
  int mu = 0, nu = 0;  // mu < nu
  MatrixXc f;
};

struct ConnectionCurvature {
  ConnectionSample connection;
  std::vector<CurvatureComponent> curvature;
};

inline MatrixXc analytic_connection_component(const SphericalParams& p, Chart chart, int mu) {
  const auto& t = chart_detail::frame_table(chart);
  MatrixXc psi = chart_detail::table_frame(t, p);
  MatrixXc dpsi = chart_detail::table_frame_derivative(t, p, mu);
  return psi.adjoint() * dpsi;
}

// Central-difference connection of the same analytic frame (same gauge by
// construction); used by the exactness checks.
inline MatrixXc fd_connection_component(const SphericalParams& p, Chart chart, int mu,
                                        double step) {
  SphericalParams pp = p, pm = p;
  pp.coord(mu) += step;
  pm.coord(mu) -= step;
  const auto& t = chart_detail::frame_table(chart);
  MatrixXc psi = chart_detail::table_frame(t, p);
  MatrixXc diff = (chart_detail::table_frame(t, pp) - chart_detail::table_frame(t, pm)) /
                  (2.0 * step);
  return psi.adjoint() * diff;
}

namespace detail {

// Numeric-chart frame in a consistent local gauge: everything aligned
// directly to the frame at the expansion point.
inline MatrixXc numeric_frame_aligned(const SphericalParams& q, const DarkFrame& center) {
  DarkFrame f = dark_basis(couplings_from_spherical(q), center);
  return f.states;
}

inline MatrixXc numeric_connection_component(const SphericalParams& p, const DarkFrame& center,
                                             int mu, double step) {
  SphericalParams pp = p, pm = p;
  pp.coord(mu) += step;
  pm.coord(mu) -= step;
  MatrixXc diff =
      (numeric_frame_aligned(pp, center) - numeric_frame_aligned(pm, center)) / (2.0 * step);
  return center.states.adjoint() * diff;
}

}  // namespace detail

inline ConnectionCurvature connection_and_curvature(const SphericalParams& p, Chart chart,
                                                    double step = 1e-5) {
  p.validate();
  const int ncoord = p.coord_count();
  ConnectionCurvature out;
  out.connection.point = p;
  out.connection.components.resize(ncoord);

  if (chart != Chart::numeric) {
    const auto& t = chart_detail::frame_table(chart);
    MatrixXc psi = chart_detail::table_frame(t, p);
    std::vector<MatrixXc> dpsi(ncoord);
    for (int mu = 0; mu < ncoord; ++mu) {
      dpsi[mu] = chart_detail::table_frame_derivative(t, p, mu);
      out.connection.components[mu] = psi.adjoint() * dpsi[mu];
    }
    for (int mu = 0; mu < ncoord; ++mu)
      for (int nu = mu + 1; nu < ncoord; ++nu) {
        // dA_nu/dmu = <d_mu psi|d_nu psi> + <psi|d_mu d_nu psi>, all exact
        MatrixXc dmu_anu = dpsi[mu].adjoint() * dpsi[nu] +
                           psi.adjoint() * chart_detail::table_frame_second_derivative(t, p, mu, nu);
        MatrixXc dnu_amu = dpsi[nu].adjoint() * dpsi[mu] +
                           psi.adjoint() * chart_detail::table_frame_second_derivative(t, p, nu, mu);
        const MatrixXc& amu = out.connection.components[mu];
        const MatrixXc& anu = out.connection.components[nu];
        MatrixXc f = dmu_anu - dnu_amu - (amu * anu - anu * amu);
        out.curvature.push_back({mu, nu, f});
      }
    return out;
  }

  if (step <= 0.0) throw std::invalid_argument("connection_and_curvature: step must be > 0");
  DarkFrame center = dark_basis(couplings_from_spherical(p));
  for (int mu = 0; mu < ncoord; ++mu)
    out.connection.components[mu] = detail::numeric_connection_component(p, center, mu, step);
  for (int mu = 0; mu < ncoord; ++mu)
    for (int nu = mu + 1; nu < ncoord; ++nu) {
      auto a_nu_at = [&](double offset) {
        SphericalParams q = p;
        q.coord(mu) += offset;
        return detail::numeric_connection_component(q, center, nu, step);
      };
      auto a_mu_at = [&](double offset) {
        SphericalParams q = p;
        q.coord(nu) += offset;
        return detail::numeric_connection_component(q, center, mu, step);
      };
      MatrixXc dmu_anu = (a_nu_at(step) - a_nu_at(-step)) / (2.0 * step);
      MatrixXc dnu_amu = (a_mu_at(step) - a_mu_at(-step)) / (2.0 * step);
      const MatrixXc& amu = out.connection.components[mu];
      const MatrixXc& anu = out.connection.components[nu];
      out.curvature.push_back({mu, nu, dmu_anu - dnu_amu - (amu * anu - anu * amu)});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Holonomy-group rank lower bound
// ---------------------------------------------------------------------------

// Real dimension of the span of all curvature components across the samples,
// embedding each anti-Hermitian (N-1)x(N-1) matrix into R^{(N-1)^2}.
// Singular values below sv_threshold * sigma_max count as zero; flat_floor is
// the absolute roundoff floor below which the whole bundle counts as flat.
inline int holonomy_rank_lower_bound(const std::vector<SphericalParams>& samples, Chart chart,
                                     double sv_threshold = 1e-8, double flat_floor = 1e-9) {
  if (samples.empty()) throw std::invalid_argument("holonomy_rank_lower_bound: empty sample list");
  const int n = samples.front().n_ground;
  const int dim = (n - 1) * (n - 1);
  std::vector<VectorXd> rows;
  for (const auto& p : samples) {
    ConnectionCurvature cc = connection_and_curvature(p, chart);
    for (const auto& comp : cc.curvature) {
      VectorXd v(dim);
      int idx = 0;
      for (int i = 0; i < n - 1; ++i) {
        v[idx++] = comp.f(i, i).imag();
        for (int j = i + 1; j < n - 1; ++j) {
          v[idx++] = comp.f(i, j).real();
          v[idx++] = comp.f(i, j).imag();
        }
      }
      rows.push_back(v);
    }
  }
  MatrixXd m((Eigen::Index)rows.size(), dim);
  for (size_t r = 0; r < rows.size(); ++r) m.row((Eigen::Index)r) = rows[r];
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= flat_floor) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv[k] > sv_threshold * sv[0]) ++rank;
  return rank;
}

inline std::vector<SphericalParams> random_sample_points(int n_ground, int count,
                                                         unsigned seed = 20260808u) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> th(0.1, PI / 2 - 0.1), ph(0.0, 2 * PI);
  std::vector<SphericalParams> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    std::vector<double> thetas(n_ground - 1), phis(n_ground - 1);
    for (auto& x : thetas) x = th(rng);
    for (auto& x : phis) x = ph(rng);
    out.emplace_back(n_ground, std::move(thetas), std::move(phis), 1.0);
  }
  return out;
}

}  // namespace holo
