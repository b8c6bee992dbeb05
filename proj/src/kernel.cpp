#include "milboost/kernel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace mil {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Linear:
      return "linear";
    case KernelKind::Gaussian:
      return "gaussian";
    case KernelKind::Precomputed:
      return "precomputed";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "linear") return KernelKind::Linear;
  if (name == "gaussian") return KernelKind::Gaussian;
  if (name == "precomputed") return KernelKind::Precomputed;
  throw ValidationError("unknown kernel kind '" + name + "'");
}

KernelSpec KernelSpec::precomputed(Eigen::MatrixXd gram) {
  KernelSpec spec{KernelKind::Precomputed, 0.0,
                  std::make_shared<const Eigen::MatrixXd>(std::move(gram))};
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  switch (kind) {
    case KernelKind::Linear:
      return;
    case KernelKind::Gaussian:
      if (!(sigma > 0) || !std::isfinite(sigma))
        throw ValidationError("gaussian kernel requires finite sigma > 0");
      return;
    case KernelKind::Precomputed: {
      if (!gram) throw ValidationError("precomputed kernel has no Gram matrix");
      if (gram->rows() != gram->cols() || gram->rows() == 0)
        throw ValidationError("precomputed Gram matrix must be square and nonempty");
      if (!gram->allFinite()) throw ValidationError("precomputed Gram matrix has non-finite entries");
      const double asym = (*gram - gram->transpose()).cwiseAbs().maxCoeff();
      const double scale = std::max(1.0, gram->cwiseAbs().maxCoeff());
      if (asym > 1e-12 * scale)
        throw ValidationError("precomputed Gram matrix is not symmetric (max asymmetry " +
                              std::to_string(asym) + ")");
      return;
    }
  }
}

double kernel_eval_indexed(const KernelSpec& spec, Eigen::Index i, Eigen::Index j) {
  if (spec.kind != KernelKind::Precomputed || !spec.gram)
    throw ValidationError("kernel_eval_indexed requires a precomputed kernel");
  const auto n = spec.gram->rows();
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw ValidationError("precomputed kernel index out of range (" + std::to_string(i) + ", " +
                          std::to_string(j) + "), Gram size " + std::to_string(n));
  return (*spec.gram)(i, j);
}

namespace {

Eigen::Index stored_index(const Instance& x) {
  if (x.size() != 1 || x[0] < 0 || x[0] != std::floor(x[0]))
    throw ValidationError("precomputed-kernel instances must hold a single nonnegative integer index");
  return static_cast<Eigen::Index>(x[0]);
}

}  // namespace

double kernel_value(const KernelSpec& spec, const Instance& a, const Instance& b) {
  if (spec.kind == KernelKind::Precomputed)
    return kernel_eval_indexed(spec, stored_index(a), stored_index(b));
  return kernel_eval(spec, a, b);
}

GramMatrix gram_matrix(const KernelSpec& spec, const InstancePool& pool) {
  if (pool.empty()) throw ValidationError("gram_matrix: empty pool");
  spec.validate();
  const auto p = static_cast<Eigen::Index>(pool.size());
  GramMatrix g{Eigen::MatrixXd(p, p), spec};
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel_value(spec, pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
      g.entries(i, j) = v;
      g.entries(j, i) = v;
    }
  }
  return g;
}

Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Bag& bag, const InstancePool& pool) {
  const auto n = static_cast<Eigen::Index>(bag.size());
  const auto p = static_cast<Eigen::Index>(pool.size());
  if (spec.kind == KernelKind::Linear) {
    if (bag.dim() != pool.dim())
      throw ValidationError("cross_kernel: bag dimension " + std::to_string(bag.dim()) +
                            " does not match pool dimension " + std::to_string(pool.dim()));
    return bag.rows() * pool.rows().transpose();
  }
  Eigen::MatrixXd k(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      k(i, j) = kernel_value(spec, bag[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  return k;
}

GramCheck check_gram(const Eigen::MatrixXd& gram) {
  GramCheck c;
  c.asymmetry = (gram - gram.transpose()).cwiseAbs().maxCoeff();
  c.symmetric = c.asymmetry <= 1e-12;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  c.max_eigenvalue = es.eigenvalues().maxCoeff();
  c.psd = c.min_eigenvalue >= -1e-8 * std::abs(c.max_eigenvalue);
  return c;
}

}  // namespace mil
