#pragma once

// Shared numerics: complex linear-algebra aliases, small matrix helpers,
// exact exponentials of anti-Hermitian generators, adaptive quadrature.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace holo {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr Complex I_UNIT{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

inline MatrixXc pauli_y() {
  MatrixXc s(2, 2);
  s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return s;
}

// exp(A) for anti-Hermitian A, through the Hermitian matrix iA. Unitary to
// roundoff regardless of ||A||.
inline MatrixXc expm_anti_hermitian(const MatrixXc& a) {
  MatrixXc h = I_UNIT * a;
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("expm: eigensolve failed");
  VectorXc phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    phases[k] = std::exp(Complex(0, -es.eigenvalues()[k]));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
  MatrixXc c(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return c;
}

inline double max_abs(const MatrixXc& m) { return m.cwiseAbs().maxCoeff(); }

inline double unitarity_defect(const MatrixXc& u) {
  MatrixXc d = u.adjoint() * u - MatrixXc::Identity(u.rows(), u.cols());
  return max_abs(d);
}

// Adaptive Simpson on [a,b]; fn must be smooth. Used for pulse averages and
// enclosed-area line integrals.
namespace detail {
inline double simpson_rec(const std::function<double(double)>& fn, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm), frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("adaptive quadrature: max depth reached");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double integrate_adaptive(const std::function<double(double)>& fn, double a, double b,
                                 double tol = 1e-11, int max_depth = 48) {
  if (a == b) return 0.0;
  const double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(fn, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Brent-style 1-D root find on [lo, hi]; f(lo) and f(hi) must bracket zero.
inline double find_root(const std::function<double(double)>& f, double lo, double hi,
                        double tol = 1e-14, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::invalid_argument("find_root: endpoints do not bracket");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0 || hi - lo < tol) return mid;
    if (flo * fmid < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace holo
