#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Dense vector and CSR kernels used by the linear solvers. Every kernel has a
// portable scalar reference implementation; SIMD variants (AVX2+FMA on x86-64,
// NEON on aarch64) are picked once at startup from CPU features and can be
// pinned with HMMFV_SIMD=scalar|avx2|neon.

namespace hmmfv::kernels {

using SparseIndex = std::int32_t;

struct CsrView {
    std::size_t rows = 0;
    const SparseIndex* offsets = nullptr; // rows + 1 entries
    const SparseIndex* columns = nullptr;
    const double* values = nullptr;
};

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* x, const double* y, std::size_t n);
    void (*axpy)(double a, const double* x, double* y, std::size_t n); // y += a x
    void (*xpay)(const double* x, double a, double* y, std::size_t n); // y = x + a y
    void (*spmv)(const CsrView& A, const double* x, double* y);        // y = A x
};

const KernelTable& scalar_table();
/// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// Table in use by the free functions below.
const KernelTable& active();
/// Re-selects the active table by name; returns false if unavailable.
bool select(std::string_view name);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void xpay(std::span<const double> x, double a, std::span<double> y);
void spmv(const CsrView& A, std::span<const double> x, std::span<double> y);

} // namespace hmmfv::kernels
