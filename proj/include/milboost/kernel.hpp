#ifndef MILBOOST_KERNEL_HPP
#define MILBOOST_KERNEL_HPP

#include "milboost/data.hpp"
#include "milboost/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>

namespace mil {

enum class KernelKind { Linear, Gaussian, Precomputed };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Similarity oracle over instances.
///
/// Gaussian uses K(a, b) = exp(-sigma * ||a - b||^2): sigma multiplies the
/// squared distance, it is not a bandwidth.
///
/// Precomputed kernels are indexed: every instance is a length-1 vector whose
/// single entry is a row index into `gram`. Raw evaluation is rejected.
struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  double sigma = 0.01;
  std::shared_ptr<const Eigen::MatrixXd> gram;

  static KernelSpec linear() { return {KernelKind::Linear, 0.0, nullptr}; }
  static KernelSpec gaussian(double sigma) { return {KernelKind::Gaussian, sigma, nullptr}; }
  static KernelSpec precomputed(Eigen::MatrixXd gram);

  /// Throws ValidationError when parameters are unusable.
  void validate() const;
};

/// Evaluates K(a, b) on raw instances (linear and gaussian kinds).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar kernel_eval(const KernelSpec& spec, const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size())
    throw ValidationError("kernel_eval: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  switch (spec.kind) {
    case KernelKind::Linear:
      return a.dot(b);
    case KernelKind::Gaussian:
      if (!(spec.sigma > 0)) throw ValidationError("kernel_eval: gaussian sigma must be > 0");
      return std::exp(-Scalar(spec.sigma) * (a - b).squaredNorm());
    case KernelKind::Precomputed:
      break;
  }
  throw ValidationError("kernel_eval: precomputed kernel must be evaluated through indices");
}

/// Evaluates a precomputed kernel by row/column index.
double kernel_eval_indexed(const KernelSpec& spec, Eigen::Index i, Eigen::Index j);

/// Evaluates K on two instances of any kind (precomputed reads the index
/// stored in each instance).
double kernel_value(const KernelSpec& spec, const Instance& a, const Instance& b);

struct GramMatrix {
  Eigen::MatrixXd entries;
  KernelSpec kernel;

  Eigen::Index size() const { return entries.rows(); }
  /// max_z K(z, z), an upper bound on ||Phi(z)||^2 over the pool.
  double max_diagonal() const { return entries.diagonal().maxCoeff(); }
};

/// entries(i, j) = K(pool[i], pool[j]).
GramMatrix gram_matrix(const KernelSpec& spec, const InstancePool& pool);

/// Kernel values between every instance of `bag` (rows) and every pool
/// element (columns): the k_x vectors stacked as rows.
Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Bag& bag, const InstancePool& pool);

struct GramCheck {
  double asymmetry = 0;      // max |K - K^T|
  double min_eigenvalue = 0;
  double max_eigenvalue = 0;
  bool symmetric = false;    // asymmetry <= 1e-12
  bool psd = false;          // min_eig >= -1e-8 * |max_eig|
};

/// Symmetry and positive-semidefiniteness diagnostics.
GramCheck check_gram(const Eigen::MatrixXd& gram);

}  // namespace mil

#endif  // MILBOOST_KERNEL_HPP
