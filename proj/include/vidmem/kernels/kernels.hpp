#pragma once

// Dense double-precision inner loops used by the tensor engine.
//
// Each primitive has a scalar reference implementation and, on x86-64, an
// AVX2+FMA implementation. The active backend is chosen once at first use
// from CPUID (overridable with VIDMEM_KERNELS=reference|avx2) and can be
// switched explicitly for equivalence testing. The two backends agree to
// rounding, not bitwise: the AVX2 reductions sum in four lanes.

#include <cstddef>
#include <span>
#include <string_view>

namespace vidmem::kernels {

enum class Backend { Reference, Avx2 };

std::string_view backend_name(Backend backend);

struct KernelTable {
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = x[i] * y[i]
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);
  // out[i] += x[i] * y[i]
  void (*mul_acc)(const double* x, const double* y, double* out, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
};

const KernelTable& reference_table();
#if defined(VIDMEM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

// True when the AVX2 variant was compiled in and the host CPU supports
// AVX2 and FMA.
bool avx2_available();

Backend active_backend();
// Throws ParameterError if the requested backend is unavailable on this host.
void select_backend(Backend backend);
const KernelTable& table(Backend backend);
const KernelTable& active();

// Convenience wrappers over the active table. Sizes must agree; checked.
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void mul(std::span<const double> x, std::span<const double> y, std::span<double> out);
void mul_acc(std::span<const double> x, std::span<const double> y, std::span<double> out);
double sum(std::span<const double> x);

// Row-major matrix products built on the primitives above. All accumulate
// into c (c += ...); callers zero c first when they want a plain product.
//   gemm_nn: c[m,n] += a[m,k] * b[k,n]
//   gemm_nt: c[m,n] += a[m,k] * b[n,k]^T
//   gemm_tn: c[m,n] += a[k,m]^T * b[k,n]
void gemm_nn(const KernelTable& t, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c);
void gemm_nt(const KernelTable& t, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c);
void gemm_tn(const KernelTable& t, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c);

}  // namespace vidmem::kernels
