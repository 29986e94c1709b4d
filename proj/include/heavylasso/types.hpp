#pragma once

// Shared domain types: design matrix, datasets, coefficients, fit configuration
// and results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heavylasso {

/// Dimension mismatch or another broken precondition on a call.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A FitConfig / ScenarioSpec / CLI knob outside its legal range.
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data that cannot be used (non-finite entries, all-zero design, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite objective or iterate during a fit.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Dense column-major matrix. Coordinate descent walks feature columns, so
/// each column is a contiguous span.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }

  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }

  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Regression instance (X, y). Validated on construction and immutable after.
class Dataset {
 public:
  Dataset(Matrix x, std::vector<double> y);

  const Matrix& x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }
  std::size_t n() const noexcept { return x_.rows(); }
  std::size_t p() const noexcept { return x_.cols(); }

 private:
  Matrix x_;
  std::vector<double> y_;
};

/// Coefficient vector plus an (optional, default zero) unpenalized intercept.
struct Coefficients {
  std::vector<double> beta;
  double intercept = 0.0;

  Coefficients() = default;
  explicit Coefficients(std::vector<double> b, double b0 = 0.0)
      : beta(std::move(b)), intercept(b0) {}
  static Coefficients zeros(std::size_t p) { return Coefficients(std::vector<double>(p, 0.0)); }

  std::size_t size() const noexcept { return beta.size(); }
  std::vector<std::size_t> support() const;
  std::size_t nonzeros() const;
  double l1_norm() const;
};

enum class LossKind { student, squared, huber };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& name);

struct FitConfig {
  LossKind loss_kind = LossKind::student;
  double nu = 3.0;
  double scale_c = 1.0;
  double huber_delta = 1.345;
  double lambda = 0.0;
  int outer_max = 1000;
  int inner_sweeps = 1;
  double tol = 1e-7;
  bool standardize = false;
  bool intercept = false;
  // Reproduces the literal beta_j <- S(z_j, lambda) / A_j update, i.e. the
  // objective without the 1/n factor on the loss.
  bool unnormalized_update = false;

  /// Throws InvalidConfig when any knob is out of range.
  void validate() const;
};

struct FitResult {
  Coefficients coef;
  std::vector<double> weights;          // final E-step / IRLS weights
  std::vector<double> objective_trace;  // penalized objective after each outer iteration
  int iterations = 0;
  bool converged = false;
  std::vector<std::size_t> degenerate_columns;
};

}  // namespace heavylasso
