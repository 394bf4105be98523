#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gsure/error.hpp"
#include "gsure/frame.hpp"
#include "gsure/laplacian.hpp"
#include "gsure/partition.hpp"

namespace gsure {

/// Full spectral decomposition of a (small) Laplacian.
///
/// `basis` holds orthonormal eigenvectors u_l of the symmetric form (L, or Ln
/// for random-walk). The eigenvectors of the operator itself are
/// chi_l = u_l / s with s = sqrt(D) for random-walk and s = 1 otherwise, so
/// rho(L) f = s^{-1} U rho(Lambda) U^T (s f).
struct EigenDecomposition {
  LaplacianVariant variant = LaplacianVariant::unnormalized;
  Vector eigenvalues;  // descending
  Eigen::MatrixXd basis;
  Vector similarity;

  std::size_t size() const { return eigenvalues.size(); }

  Vector eigenvector(std::size_t l) const {
    Vector chi(size());
    for (std::size_t i = 0; i < size(); ++i) chi[i] = basis(i, l) / similarity[i];
    return chi;
  }

  /// Coordinates U^T (s f) of a signal in the symmetric eigenbasis.
  Eigen::VectorXd analyze(std::span<const double> f) const {
    Eigen::VectorXd sf(size());
    for (std::size_t i = 0; i < size(); ++i) sf[i] = similarity[i] * f[i];
    return basis.transpose() * sf;
  }

  /// s^{-1} U c.
  Vector synthesize(const Eigen::VectorXd& coords) const {
    Eigen::VectorXd y = basis * coords;
    Vector out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = y[i] / similarity[i];
    return out;
  }

  /// rho(L) f by functional calculus.
  template <class Fn>
  Vector apply_function(Fn&& rho, std::span<const double> f) const {
    Eigen::VectorXd c = analyze(f);
    for (std::size_t l = 0; l < size(); ++l) c[l] *= rho(eigenvalues[l]);
    return synthesize(c);
  }
};

/// Dense matrix of the symmetric form of `op`. Oracle scale only.
inline Eigen::MatrixXd dense_symmetric_matrix(const LaplacianOperator& op) {
  const std::size_t n = op.num_nodes();
  const SparseGraph& g = op.graph();
  const auto d = op.degrees();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const bool scaled = op.variant() != LaplacianVariant::unnormalized;
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = scaled ? 1.0 : d[i];
    const auto nb = g.neighbors_of(i);
    const auto w = g.weights_of(i);
    for (std::size_t e = 0; e < nb.size(); ++e)
      m(i, nb[e]) = scaled ? -w[e] / std::sqrt(d[i] * d[nb[e]]) : -w[e];
  }
  return m;
}

/// Full eigendecomposition via a dense symmetric solver. Refuses graphs above
/// `max_nodes`; use the Chebyshev transforms for those.
inline EigenDecomposition exact_eigendecomposition(const LaplacianOperator& op, std::size_t max_nodes = 5000) {
  const std::size_t n = op.num_nodes();
  if (n > max_nodes)
    throw InvalidArgument("exact_eigendecomposition: " + std::to_string(n) + " nodes exceeds the cap of " +
                          std::to_string(max_nodes) + "; use the Chebyshev (fast) transform instead");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_symmetric_matrix(op));
  if (solver.info() != Eigen::Success) throw ComputationError("exact_eigendecomposition: eigensolver failed");

  EigenDecomposition eig;
  eig.variant = op.variant();
  eig.eigenvalues.resize(n);
  eig.basis.resize(n, n);
  // Eigen sorts ascending; store descending.
  for (std::size_t l = 0; l < n; ++l) {
    eig.eigenvalues[l] = solver.eigenvalues()[n - 1 - l];
    eig.basis.col(l) = solver.eigenvectors().col(n - 1 - l);
  }
  eig.similarity.assign(n, 1.0);
  if (op.variant() == LaplacianVariant::random_walk) {
    const auto d = op.degrees();
    for (std::size_t i = 0; i < n; ++i) eig.similarity[i] = std::sqrt(d[i]);
  }
  return eig;
}

/// SGWT computed exactly through the eigendecomposition:
///   forward:  block j = sqrt(psi_j)(L) f
///   inverse:  sum_j sqrt(psi_j)(L) eta_j
class ExactSgwt {
 public:
  ExactSgwt(EigenDecomposition eig, PartitionOfUnity pou) : eig_(std::move(eig)), pou_(std::move(pou)) {
    const std::size_t scales = pou_.num_scales();
    gains_.resize(scales, Vector(eig_.size()));
    for (std::size_t j = 0; j < scales; ++j)
      for (std::size_t l = 0; l < eig_.size(); ++l)
        gains_[j][l] = pou_.sqrt_psi(static_cast<int>(j), std::max(eig_.eigenvalues[l], 0.0));
  }

  std::size_t num_nodes() const { return eig_.size(); }
  std::size_t num_scales() const { return pou_.num_scales(); }
  const EigenDecomposition& eigen() const { return eig_; }
  const PartitionOfUnity& partition() const { return pou_; }

  std::string fingerprint() const {
    return "exact;variant=" + std::string(to_string(eig_.variant)) + ";" + pou_.fingerprint();
  }

  FrameCoefficients forward(std::span<const double> f) const {
    if (f.size() != num_nodes()) throw InvalidArgument("sgwt_forward_exact: signal length does not match graph");
    const Eigen::VectorXd c = eig_.analyze(f);
    FrameCoefficients out(num_nodes(), num_scales());
    Eigen::VectorXd cj(num_nodes());
    for (std::size_t j = 0; j < num_scales(); ++j) {
      for (std::size_t l = 0; l < num_nodes(); ++l) cj[l] = gains_[j][l] * c[l];
      const Vector block = eig_.synthesize(cj);
      std::copy(block.begin(), block.end(), out.scale(j).begin());
    }
    return out;
  }

  Vector inverse(const FrameCoefficients& coeffs) const {
    if (coeffs.num_nodes() != num_nodes() || coeffs.num_scales() != num_scales())
      throw InvalidArgument("sgwt_inverse_exact: coefficient dimensions do not match the frame");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(num_nodes());
    for (std::size_t j = 0; j < num_scales(); ++j) {
      const Eigen::VectorXd c = eig_.analyze(coeffs.scale(j));
      for (std::size_t l = 0; l < num_nodes(); ++l) acc[l] += gains_[j][l] * c[l];
    }
    return eig_.synthesize(acc);
  }

  /// Dense analysis matrix: row i is the frame vector of (scale i / n, node i % n).
  Eigen::MatrixXd frame_matrix(std::size_t max_nodes = 200) const {
    const std::size_t n = num_nodes();
    if (n > max_nodes)
      throw InvalidArgument("frame_matrix_exact: " + std::to_string(n) + " nodes exceeds the oracle cap of " +
                            std::to_string(max_nodes));
    Eigen::MatrixXd w(n * num_scales(), n);
    const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(eig_.similarity.data(), n);
    for (std::size_t j = 0; j < num_scales(); ++j) {
      const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(gains_[j].data(), n);
      Eigen::MatrixXd block = eig_.basis * g.asDiagonal() * eig_.basis.transpose();
      block = s.cwiseInverse().asDiagonal() * block * s.asDiagonal();
      w.middleRows(j * n, n) = block;
    }
    return w;
  }

 private:
  EigenDecomposition eig_;
  PartitionOfUnity pou_;
  std::vector<Vector> gains_;  // gains_[j][l] = sqrt(psi_j(lambda_l))
};

inline FrameCoefficients sgwt_forward_exact(const LaplacianOperator& op, std::span<const double> f,
                                            const PartitionOfUnity& pou) {
  return ExactSgwt(exact_eigendecomposition(op), pou).forward(f);
}

inline Vector sgwt_inverse_exact(const LaplacianOperator& op, const FrameCoefficients& coeffs,
                                 const PartitionOfUnity& pou) {
  return ExactSgwt(exact_eigendecomposition(op), pou).inverse(coeffs);
}

inline Eigen::MatrixXd frame_matrix_exact(const LaplacianOperator& op, const PartitionOfUnity& pou,
                                          std::size_t max_nodes = 200) {
  if (op.num_nodes() > max_nodes)
    throw InvalidArgument("frame_matrix_exact: " + std::to_string(op.num_nodes()) +
                          " nodes exceeds the oracle cap of " + std::to_string(max_nodes));
  return ExactSgwt(exact_eigendecomposition(op), pou).frame_matrix(max_nodes);
}

/// Squared norm of frame coefficients in the geometry where the frame is
/// tight: Euclidean for the symmetric variants, D-weighted for random-walk.
inline double frame_energy(const LaplacianOperator& op, const FrameCoefficients& coeffs) {
  double acc = 0.0;
  for (std::size_t j = 0; j < coeffs.num_scales(); ++j) acc += op.energy(coeffs.scale(j));
  return acc;
}

}  // namespace gsure
