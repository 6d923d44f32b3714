#pragma once

// Dense information-theoretic helpers. Everything here is templated on the
// Eigen expression type so callers can pass blocks, maps or temporaries.

#include <Eigen/Dense>
#include <cmath>

namespace clarify {

/// Shannon entropy in bits of a (not necessarily normalized) probability vector.
/// Zero entries contribute nothing.
template <typename Derived>
typename Derived::Scalar entropy_bits(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  Scalar h = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar v = p.coeff(i);
    if (v > 0) h -= v * std::log2(v);
  }
  return h;
}

/// Row-wise entropies of a row-stochastic matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> row_entropies_bits(
    const Eigen::MatrixBase<Derived>& rows) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(rows.rows());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) out(r) = entropy_bits(rows.row(r).transpose());
  return out;
}

/// KL(p || q) in bits. Terms with p_i == 0 vanish; q_i == 0 with p_i > 0 yields +inf.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar kl_divergence_bits(const Eigen::MatrixBase<DerivedP>& p,
                                             const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  Scalar d = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar pi = p.coeff(i);
    if (pi <= 0) continue;
    const Scalar qi = q.coeff(i);
    if (qi <= 0) return std::numeric_limits<Scalar>::infinity();
    d += pi * std::log2(pi / qi);
  }
  return d;
}

/// Numerically stable softmax of `scores / temperature`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(
    const Eigen::MatrixBase<Derived>& scores, typename Derived::Scalar temperature) {
  using Vec = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  Vec z = scores / temperature;
  const auto peak = z.maxCoeff();
  Vec e = (z.array() - peak).exp().matrix();
  return e / e.sum();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  const auto na = a.norm();
  const auto nb = b.norm();
  if (na == 0 || nb == 0) return 0;
  return a.dot(b) / (na * nb);
}

}  // namespace clarify
