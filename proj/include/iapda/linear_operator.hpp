#ifndef IAPDA_LINEAR_OPERATOR_HPP
#define IAPDA_LINEAR_OPERATOR_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace iapda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

/// Thrown when array shapes do not agree with the problem they are used with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown for inadmissible parameters (negative weights, alpha < 3, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_size(const Vector& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(v.size()));
  }
}

/// Linear map A: R^n -> R^m backed by a dense or a compressed sparse matrix.
/// An operator with zero rows encodes "no equality constraint".
class LinearOperator {
 public:
  LinearOperator() : storage_(Matrix(0, 0)) {}
  explicit LinearOperator(Matrix dense) : storage_(std::move(dense)) {}
  explicit LinearOperator(SparseMatrix sparse) : storage_(std::move(sparse)) {
    std::get<SparseMatrix>(storage_).makeCompressed();
  }

  /// The empty operator R^n -> R^0.
  static LinearOperator empty(Index n) { return LinearOperator(Matrix(0, n)); }

  Index rows() const {
    return std::visit([](const auto& a) { return static_cast<Index>(a.rows()); }, storage_);
  }
  Index cols() const {
    return std::visit([](const auto& a) { return static_cast<Index>(a.cols()); }, storage_);
  }
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }

  Vector apply(const Vector& x) const {
    require_size(x, cols(), "LinearOperator::apply");
    return std::visit([&](const auto& a) -> Vector { return a * x; }, storage_);
  }

  Vector apply_adjoint(const Vector& y) const {
    require_size(y, rows(), "LinearOperator::apply_adjoint");
    return std::visit([&](const auto& a) -> Vector { return a.transpose() * y; }, storage_);
  }

  Matrix to_dense() const {
    if (const auto* d = std::get_if<Matrix>(&storage_)) return *d;
    return Matrix(std::get<SparseMatrix>(storage_));
  }

  /// A^T A as a dense n x n matrix.
  Matrix gram() const {
    return std::visit(
        [](const auto& a) -> Matrix {
          if constexpr (std::is_same_v<std::decay_t<decltype(a)>, SparseMatrix>) {
            return Matrix(SparseMatrix(a.transpose() * a));
          } else {
            return a.transpose() * a;
          }
        },
        storage_);
  }

  const Matrix* dense() const { return std::get_if<Matrix>(&storage_); }
  const SparseMatrix* sparse() const { return std::get_if<SparseMatrix>(&storage_); }

 private:
  std::variant<Matrix, SparseMatrix> storage_;
};

}  // namespace iapda

#endif  // IAPDA_LINEAR_OPERATOR_HPP
