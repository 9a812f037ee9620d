#include "hmmfv/kernels/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdlib>

namespace hmmfv::kernels {

#if !(defined(__x86_64__) || defined(_M_X64))
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !(defined(__aarch64__) || defined(_M_ARM64))
const KernelTable* neon_table() { return nullptr; }
#endif

namespace {

const KernelTable* by_name(std::string_view name)
{
    if (name == "scalar") return &scalar_table();
    if (name == "avx2") return avx2_table();
    if (name == "neon") return neon_table();
    return nullptr;
}

const KernelTable* detect()
{
    if (const char* env = std::getenv("HMMFV_SIMD")) {
        if (const KernelTable* t = by_name(env)) return t;
    }
    if (const KernelTable* t = avx2_table()) return t;
    if (const KernelTable* t = neon_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot()
{
    static std::atomic<const KernelTable*> current{detect()};
    return current;
}

} // namespace

const KernelTable& active()
{
    return *slot().load(std::memory_order_acquire);
}

bool select(std::string_view name)
{
    const KernelTable* t = by_name(name);
    if (!t) return false;
    slot().store(t, std::memory_order_release);
    return true;
}

double dot(std::span<const double> x, std::span<const double> y)
{
    assert(x.size() == y.size());
    return active().dot(x.data(), y.data(), x.size());
}

double norm2(std::span<const double> x)
{
    return std::sqrt(dot(x, x));
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
    assert(x.size() == y.size());
    active().axpy(a, x.data(), y.data(), x.size());
}

void xpay(std::span<const double> x, double a, std::span<double> y)
{
    assert(x.size() == y.size());
    active().xpay(x.data(), a, y.data(), x.size());
}

void spmv(const CsrView& A, std::span<const double> x, std::span<double> y)
{
    assert(y.size() == A.rows);
    (void)x;
    active().spmv(A, x.data(), y.data());
}

} // namespace hmmfv::kernels
