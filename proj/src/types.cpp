#include "heavylasso/types.hpp"

#include <cmath>

namespace heavylasso {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw ContractViolation("ragged rows in Matrix::from_rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Dataset::Dataset(Matrix x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() == 0 || x_.cols() == 0) throw InvalidInput("dataset needs n >= 1 and p >= 1");
  if (x_.rows() != y_.size()) {
    throw ContractViolation("design has " + std::to_string(x_.rows()) + " rows but response has " +
                            std::to_string(y_.size()) + " entries");
  }
  for (double v : x_.data()) {
    if (!std::isfinite(v)) throw InvalidInput("design matrix contains a non-finite entry");
  }
  for (double v : y_) {
    if (!std::isfinite(v)) throw InvalidInput("response contains a non-finite entry");
  }
}

std::vector<std::size_t> Coefficients::support() const {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) s.push_back(j);
  }
  return s;
}

std::size_t Coefficients::nonzeros() const {
  std::size_t k = 0;
  for (double b : beta) k += (b != 0.0);
  return k;
}

double Coefficients::l1_norm() const {
  double s = 0.0;
  for (double b : beta) s += std::abs(b);
  return s;
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::student: return "student";
    case LossKind::squared: return "squared";
    case LossKind::huber: return "huber";
  }
  return "unknown";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "student") return LossKind::student;
  if (name == "squared") return LossKind::squared;
  if (name == "huber") return LossKind::huber;
  throw InvalidConfig("unknown loss kind '" + name + "' (expected student, squared or huber)");
}

void FitConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(nu)) throw InvalidConfig("nu must be a positive finite number");
  if (!positive(scale_c)) throw InvalidConfig("scale_c must be a positive finite number");
  if (loss_kind == LossKind::huber && !positive(huber_delta)) {
    throw InvalidConfig("huber delta must be positive");
  }
  if (!(lambda >= 0.0) || std::isnan(lambda)) throw InvalidConfig("lambda must be >= 0");
  if (outer_max < 1) throw InvalidConfig("outer_max must be >= 1");
  if (inner_sweeps < 1) throw InvalidConfig("inner_sweeps must be >= 1");
  if (!positive(tol)) throw InvalidConfig("tol must be positive");
}

}  // namespace heavylasso
