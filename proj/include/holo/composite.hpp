#pragma once

// Labeled tensor-product Hilbert spaces: atoms x cavity Fock x motional Fock,
// with basis bookkeeping and operator embedding.

#include "holo/core.hpp"

#include <numeric>

namespace holo {

struct Factor {
  std::string label;
  int dim = 0;
  std::vector<std::string> basis;  // one label per level
};

class CompositeSystem {
 public:
  CompositeSystem() = default;
  explicit CompositeSystem(std::vector<Factor> factors) : factors_(std::move(factors)) {
    dim_ = 1;
    for (const auto& f : factors_) {
      if (f.dim <= 0 || (int)f.basis.size() != f.dim)
        throw std::invalid_argument("CompositeSystem: factor dims/labels mismatch");
      dim_ *= f.dim;
    }
  }

  int dim() const { return dim_; }
  int n_factors() const { return (int)factors_.size(); }
  const Factor& factor(int i) const { return factors_.at(i); }

  int factor_index(const std::string& label) const {
    for (int i = 0; i < n_factors(); ++i)
      if (factors_[i].label == label) return i;
    throw std::invalid_argument("CompositeSystem: no factor " + label);
  }

  // first factor slowest (leftmost in the Kronecker product)
  int index_of(const std::vector<int>& levels) const {
    if ((int)levels.size() != n_factors())
      throw std::invalid_argument("CompositeSystem: level tuple size mismatch");
    int idx = 0;
    for (int i = 0; i < n_factors(); ++i) {
      if (levels[i] < 0 || levels[i] >= factors_[i].dim)
        throw std::invalid_argument("CompositeSystem: level out of range");
      idx = idx * factors_[i].dim + levels[i];
    }
    return idx;
  }

  std::vector<int> levels_of(int idx) const {
    std::vector<int> lv(n_factors());
    for (int i = n_factors() - 1; i >= 0; --i) {
      lv[i] = idx % factors_[i].dim;
      idx /= factors_[i].dim;
    }
    return lv;
  }

  VectorXc basis_state(const std::vector<int>& levels) const {
    VectorXc v = VectorXc::Zero(dim_);
    v[index_of(levels)] = 1.0;
    return v;
  }

  MatrixXc embed(int factor_idx, const MatrixXc& op) const {
    if (op.rows() != factors_[factor_idx].dim || op.cols() != factors_[factor_idx].dim)
      throw std::invalid_argument("CompositeSystem: operator dim mismatch");
    MatrixXc out = MatrixXc::Identity(1, 1);
    for (int i = 0; i < n_factors(); ++i) {
      const MatrixXc& next = i == factor_idx
                                 ? op
                                 : MatrixXc::Identity(factors_[i].dim, factors_[i].dim);
      out = kron(out, next);
    }
    return out;
  }

  // product of one single-factor operator per listed factor
  MatrixXc embed_product(const std::vector<std::pair<int, MatrixXc>>& ops) const {
    MatrixXc out = MatrixXc::Identity(dim_, dim_);
    for (const auto& [idx, op] : ops) out = (embed(idx, op) * out).eval();
    return out;
  }

  // indices whose factor level satisfies the predicate
  std::vector<int> indices_where(int factor_idx, const std::function<bool(int)>& pred) const {
    std::vector<int> out;
    for (int idx = 0; idx < dim_; ++idx)
      if (pred(levels_of(idx)[factor_idx])) out.push_back(idx);
    return out;
  }

 private:
  std::vector<Factor> factors_;
  int dim_ = 0;
};

inline std::vector<std::string> fock_labels(int cutoff) {
  std::vector<std::string> v(cutoff);
  for (int n = 0; n < cutoff; ++n) v[n] = std::to_string(n);
  return v;
}

inline MatrixXc annihilator(int cutoff) {
  MatrixXc a = MatrixXc::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt((double)n);
  return a;
}

inline MatrixXc number_op(int cutoff) {
  MatrixXc n = MatrixXc::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) n(k, k) = k;
  return n;
}

inline MatrixXc ketbra(int dim, int i, int j) {
  MatrixXc m = MatrixXc::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

}  // namespace holo
