#include <atomic>
#include <cstdlib>
#include <string_view>

#include "heavylasso/kernels.hpp"

namespace heavylasso::kernels {

const KernelTable* avx2_table_impl() noexcept;

namespace {

bool cpu_has_avx2_fma() noexcept {
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() noexcept {
  const char* env = std::getenv("HEAVYLASSO_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return &scalar_table();
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() noexcept {
  static const bool usable = cpu_has_avx2_fma();
  return usable ? avx2_table_impl() : nullptr;
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_relaxed); }

bool select_backend(Backend backend) noexcept {
  const KernelTable* t = backend == Backend::scalar ? &scalar_table() : avx2_table();
  if (t == nullptr) return false;
  slot().store(t, std::memory_order_relaxed);
  return true;
}

std::string_view active_name() noexcept { return active().name; }

}  // namespace heavylasso::kernels
