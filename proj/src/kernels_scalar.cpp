#include "heavylasso/kernels.hpp"

namespace heavylasso::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double wdot_scalar(const double* w, const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

double wsqnorm_scalar(const double* w, const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * x[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void inv_shift_sq_scalar(const double* r, double nu, double scale, double* out,
                         std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = scale / (nu + r[i] * r[i]);
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{"scalar",     dot_scalar,  wdot_scalar,
                                 wsqnorm_scalar, axpy_scalar, inv_shift_sq_scalar};
  return table;
}

}  // namespace heavylasso::kernels
