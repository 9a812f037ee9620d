#include "hmmfv/kernels/kernels.hpp"

namespace hmmfv::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay_scalar(const double* x, double a, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void spmv_scalar(const CsrView& A, const double* x, double* y)
{
    for (std::size_t r = 0; r < A.rows; ++r) {
        double s = 0.0;
        for (SparseIndex k = A.offsets[r]; k < A.offsets[r + 1]; ++k) s += A.values[k] * x[A.columns[k]];
        y[r] = s;
    }
}

} // namespace

const KernelTable& scalar_table()
{
    static const KernelTable table{"scalar", dot_scalar, axpy_scalar, xpay_scalar, spmv_scalar};
    return table;
}

} // namespace hmmfv::kernels
