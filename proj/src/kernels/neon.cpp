#include "hmmfv/kernels/kernels.hpp"

#include <arm_neon.h>

namespace hmmfv::kernels {

namespace {

double dot_neon(const double* x, const double* y, std::size_t n)
{
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n)
{
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void xpay_neon(const double* x, double a, double* y, std::size_t n)
{
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(x + i), va, vld1q_f64(y + i)));
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

// No gather on NEON; pairs of loads still halve the dependency chain.
void spmv_neon(const CsrView& A, const double* x, double* y)
{
    for (std::size_t r = 0; r < A.rows; ++r) {
        SparseIndex k = A.offsets[r];
        const SparseIndex end = A.offsets[r + 1];
        float64x2_t acc = vdupq_n_f64(0.0);
        for (; k + 2 <= end; k += 2) {
            const double xs[2] = {x[A.columns[k]], x[A.columns[k + 1]]};
            acc = vfmaq_f64(acc, vld1q_f64(A.values + k), vld1q_f64(xs));
        }
        double s = vaddvq_f64(acc);
        for (; k < end; ++k) s += A.values[k] * x[A.columns[k]];
        y[r] = s;
    }
}

} // namespace

const KernelTable* neon_table()
{
    static const KernelTable table{"neon", dot_neon, axpy_neon, xpay_neon, spmv_neon};
    return &table;
}

} // namespace hmmfv::kernels
