#pragma once

// Inner-loop arithmetic kernels. Every kernel has a portable scalar reference
// implementation; an AVX2+FMA variant is selected at runtime when the CPU
// supports it. Vector variants reassociate sums, so results agree with the
// scalar reference to rounding, not bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace heavylasso::kernels {

struct KernelTable {
  const char* name;
  // sum_i x_i * y_i
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i w_i * x_i * y_i
  double (*wdot)(const double* w, const double* x, const double* y, std::size_t n);
  // sum_i w_i * x_i^2
  double (*wsqnorm)(const double* w, const double* x, std::size_t n);
  // y_i += a * x_i
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out_i = scale / (nu + r_i^2)
  void (*inv_shift_sq)(const double* r, double nu, double scale, double* out, std::size_t n);
};

enum class Backend { scalar, avx2 };

const KernelTable& scalar_table() noexcept;
/// nullptr when the build has no AVX2 variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

/// Active table. Chosen once: AVX2 when available unless the environment
/// variable HEAVYLASSO_SIMD=scalar is set.
const KernelTable& active() noexcept;

/// Overrides the active backend; returns false if it is unavailable.
bool select_backend(Backend backend) noexcept;
std::string_view active_name() noexcept;

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline double wdot(std::span<const double> w, std::span<const double> x,
                   std::span<const double> y) {
  return active().wdot(w.data(), x.data(), y.data(), x.size());
}
inline double wsqnorm(std::span<const double> w, std::span<const double> x) {
  return active().wsqnorm(w.data(), x.data(), x.size());
}
inline double sqnorm(std::span<const double> x) { return dot(x, x); }
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline void inv_shift_sq(std::span<const double> r, double nu, double scale,
                         std::span<double> out) {
  active().inv_shift_sq(r.data(), nu, scale, out.data(), r.size());
}

}  // namespace heavylasso::kernels
