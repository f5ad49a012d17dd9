#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "vidmem/errors.hpp"
#include "vidmem/kernels/kernels.hpp"

namespace vidmem::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(VIDMEM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  const bool avx2 = cpu_has_avx2();
  if (const char* env = std::getenv("VIDMEM_KERNELS")) {
    const std::string_view want(env);
    if (want == "reference") return Backend::Reference;
    if (want == "avx2" && avx2) return Backend::Avx2;
  }
  return avx2 ? Backend::Avx2 : Backend::Reference;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

void require_same(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": length mismatch " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

}  // namespace

std::string_view backend_name(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "reference";
}

bool avx2_available() {
  static const bool available = cpu_has_avx2();
  return available;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void select_backend(Backend backend) {
  if (backend == Backend::Avx2 && !avx2_available()) {
    throw ParameterError("AVX2 kernels are not available on this host");
  }
  current().store(backend, std::memory_order_relaxed);
}

const KernelTable& table(Backend backend) {
#if defined(VIDMEM_HAVE_AVX2)
  if (backend == Backend::Avx2) {
    if (!avx2_available()) throw ParameterError("AVX2 kernels are not available on this host");
    return avx2_table();
  }
#else
  if (backend == Backend::Avx2) throw ParameterError("AVX2 kernels were not compiled in");
#endif
  return reference_table();
}

const KernelTable& active() { return table(active_backend()); }

double dot(std::span<const double> x, std::span<const double> y) {
  require_same(x.size(), y.size(), "dot");
  return active().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same(x.size(), y.size(), "axpy");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void mul(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  require_same(x.size(), y.size(), "mul");
  require_same(x.size(), out.size(), "mul");
  active().mul(x.data(), y.data(), out.data(), x.size());
}

void mul_acc(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  require_same(x.size(), y.size(), "mul_acc");
  require_same(x.size(), out.size(), "mul_acc");
  active().mul_acc(x.data(), y.data(), out.data(), x.size());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

void gemm_nn(const KernelTable& t, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      if (arow[p] != 0.0) t.axpy(arow[p], b + p * n, crow, n);
    }
  }
}

void gemm_nt(const KernelTable& t, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += t.dot(arow, b + j * k, k);
  }
}

void gemm_tn(const KernelTable& t, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = a + p * m;
    const double* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      if (arow[i] != 0.0) t.axpy(arow[i], brow, c + i * n, n);
    }
  }
}

}  // namespace vidmem::kernels
