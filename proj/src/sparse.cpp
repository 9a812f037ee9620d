#include "hmmfv/sparse.hpp"

#include "hmmfv/error.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace hmmfv {

namespace kn = kernels;

double SparseSystem::at(std::size_t row, std::size_t col) const
{
    const auto begin = columns.begin() + offsets[row];
    const auto end = columns.begin() + offsets[row + 1];
    const auto it = std::lower_bound(begin, end, static_cast<SparseIndex>(col));
    if (it == end || *it != static_cast<SparseIndex>(col)) return 0.0;
    return values[static_cast<std::size_t>(it - columns.begin())];
}

SparseBuilder::SparseBuilder(std::size_t dimension)
    : dimension_(dimension), rhs_(dimension, 0.0), dirichlet_(dimension, 0)
{
    HMMFV_REQUIRE(dimension < static_cast<std::size_t>(std::numeric_limits<SparseIndex>::max()),
                  "sparse dimension exceeds the index type");
}

SparseBuilder assemble_begin(std::size_t dimension)
{
    return SparseBuilder(dimension);
}

void SparseBuilder::check_open() const
{
    if (finalized_) throw InvalidArgument("sparse builder already finalized");
}

void SparseBuilder::check_index(std::size_t i) const
{
    if (i >= dimension_)
        throw InvalidArgument("sparse index " + std::to_string(i) + " out of range for dimension " +
                              std::to_string(dimension_));
}

void SparseBuilder::add_entry(std::size_t row, std::size_t col, double value)
{
    check_open();
    check_index(row);
    check_index(col);
    entries_.push_back({static_cast<SparseIndex>(row), static_cast<SparseIndex>(col), value});
}

void SparseBuilder::add_rhs(std::size_t row, double value)
{
    check_open();
    check_index(row);
    rhs_[row] += value;
}

void SparseBuilder::set_rhs(std::size_t row, double value)
{
    check_open();
    check_index(row);
    rhs_[row] = value;
}

void SparseBuilder::set_dirichlet_row(std::size_t row, double value)
{
    check_open();
    check_index(row);
    dirichlet_[row] = 1;
    rhs_[row] = value;
}

void SparseBuilder::merge(const SparseBuilder& other)
{
    check_open();
    HMMFV_REQUIRE(other.dimension_ == dimension_, "cannot merge builders of different dimension");
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
    for (std::size_t i = 0; i < dimension_; ++i) {
        if (other.dirichlet_[i]) {
            dirichlet_[i] = 1;
            rhs_[i] = other.rhs_[i];
        } else if (!dirichlet_[i]) {
            rhs_[i] += other.rhs_[i];
        }
    }
}

SparseSystem SparseBuilder::finalize()
{
    check_open();
    finalized_ = true;

    for (std::size_t r = 0; r < dimension_; ++r)
        if (dirichlet_[r]) entries_.push_back({static_cast<SparseIndex>(r), static_cast<SparseIndex>(r), 0.0});
    std::erase_if(entries_, [&](const Entry& e) { return dirichlet_[e.row] && e.col != e.row; });
    // Stable sort keeps the summation order of duplicates equal to insertion order.
    std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseSystem sys;
    sys.dimension = dimension_;
    sys.offsets.assign(dimension_ + 1, 0);
    sys.rhs = std::move(rhs_);
    for (std::size_t i = 0; i < entries_.size();) {
        const Entry& e = entries_[i];
        double sum = 0.0;
        std::size_t j = i;
        for (; j < entries_.size() && entries_[j].row == e.row && entries_[j].col == e.col; ++j)
            sum += entries_[j].value;
        if (dirichlet_[e.row]) sum = 1.0;
        sys.columns.push_back(e.col);
        sys.values.push_back(sum);
        ++sys.offsets[static_cast<std::size_t>(e.row) + 1];
        i = j;
    }
    for (std::size_t r = 0; r < dimension_; ++r) sys.offsets[r + 1] += sys.offsets[r];
    entries_.clear();
    entries_.shrink_to_fit();
    return sys;
}

std::vector<double> multiply(const SparseSystem& system, const std::vector<double>& x)
{
    HMMFV_REQUIRE(x.size() == system.dimension, "vector size does not match the system");
    std::vector<double> y(system.dimension);
    kn::spmv(system.view(), x, y);
    return y;
}

double relative_residual(const SparseSystem& system, const std::vector<double>& x)
{
    std::vector<double> r = multiply(system, x);
    kn::xpay(system.rhs, -1.0, r); // r = b - Ax
    const double bnorm = kn::norm2(system.rhs);
    const double rnorm = kn::norm2(r);
    return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const SparseSystem& s)
{
    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(s.nonzeros());
    for (std::size_t r = 0; r < s.dimension; ++r)
        for (SparseIndex k = s.offsets[r]; k < s.offsets[r + 1]; ++k)
            trip.emplace_back(static_cast<int>(r), s.columns[k], s.values[k]);
    const auto n = static_cast<Eigen::Index>(s.dimension);
    EigenSparse m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

bool all_finite(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

std::vector<double> direct_solve(const SparseSystem& s, bool symmetric)
{
    const EigenSparse A = to_eigen(s);
    const Eigen::Map<const Eigen::VectorXd> b(s.rhs.data(), static_cast<Eigen::Index>(s.dimension));
    Eigen::VectorXd x;
    if (symmetric) {
        Eigen::SimplicialLDLT<EigenSparse> ldlt(A);
        if (ldlt.info() == Eigen::Success) {
            const Eigen::VectorXd d = ldlt.vectorD();
            if ((d.array() != 0.0).all() && d.allFinite()) x = ldlt.solve(b);
        }
    }
    if (x.size() == 0) {
        Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(A);
        lu.factorize(A);
        if (lu.info() != Eigen::Success)
            throw SolverError(SolverError::Kind::Singular, "sparse LU failed: " + lu.lastErrorMessage());
        x = lu.solve(b);
    }
    std::vector<double> out(x.data(), x.data() + x.size());
    if (!all_finite(out)) throw SolverError(SolverError::Kind::Singular, "direct solve produced non-finite values");
    return out;
}

/// ILU(0) on the CSR pattern; factors stored in place of the values.
struct Ilu0 {
    const SparseSystem* sys;
    std::vector<double> lu;
    std::vector<SparseIndex> diag;

    explicit Ilu0(const SparseSystem& s) : sys(&s), lu(s.values), diag(s.dimension, -1)
    {
        const std::size_t n = s.dimension;
        for (std::size_t r = 0; r < n; ++r) {
            for (SparseIndex k = s.offsets[r]; k < s.offsets[r + 1]; ++k)
                if (s.columns[k] == static_cast<SparseIndex>(r)) diag[r] = k;
            if (diag[r] < 0) throw SolverError(SolverError::Kind::Singular, "ILU(0): missing diagonal entry");
        }
        for (std::size_t i = 1; i < n; ++i) {
            for (SparseIndex kk = s.offsets[i]; kk < s.offsets[i + 1] && s.columns[kk] < static_cast<SparseIndex>(i); ++kk) {
                const auto k = static_cast<std::size_t>(s.columns[kk]);
                const double pivot = lu[diag[k]];
                if (pivot == 0.0) throw SolverError(SolverError::Kind::Singular, "ILU(0): zero pivot");
                lu[kk] /= pivot;
                const double lik = lu[kk];
                // Row i -= l_ik * row k over the shared pattern, columns > k.
                SparseIndex jj = kk + 1;
                for (SparseIndex kj = diag[k] + 1; kj < s.offsets[k + 1]; ++kj) {
                    while (jj < s.offsets[i + 1] && s.columns[jj] < s.columns[kj]) ++jj;
                    if (jj < s.offsets[i + 1] && s.columns[jj] == s.columns[kj]) lu[jj] -= lik * lu[kj];
                }
            }
        }
        for (std::size_t r = 0; r < n; ++r)
            if (lu[diag[r]] == 0.0) throw SolverError(SolverError::Kind::Singular, "ILU(0): zero pivot");
    }

    void apply(std::vector<double>& v) const
    {
        const auto& s = *sys;
        const std::size_t n = s.dimension;
        for (std::size_t i = 0; i < n; ++i) {
            double t = v[i];
            for (SparseIndex k = s.offsets[i]; k < diag[i]; ++k) t -= lu[k] * v[s.columns[k]];
            v[i] = t;
        }
        for (std::size_t i = n; i-- > 0;) {
            double t = v[i];
            for (SparseIndex k = diag[i] + 1; k < s.offsets[i + 1]; ++k) t -= lu[k] * v[s.columns[k]];
            v[i] = t / lu[diag[i]];
        }
    }
};

/// Restarted GMRES, right-preconditioned with ILU(0).
std::size_t gmres(const SparseSystem& s, std::vector<double>& x, double tol, std::size_t restart,
                  std::size_t max_iter)
{
    const std::size_t n = s.dimension;
    const Ilu0 M(s);
    const double bnorm = kn::norm2(s.rhs);
    const double target = tol * (bnorm > 0.0 ? bnorm : 1.0);
    const std::size_t m = std::max<std::size_t>(1, std::min(restart, n));

    std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
    Eigen::MatrixXd Hm = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m));
    std::vector<double> cs(m), sn(m), g(m + 1);
    std::vector<double> w(n), z(n);

    std::size_t iter = 0;
    while (iter < max_iter) {
        std::vector<double> r = multiply(s, x);
        kn::xpay(s.rhs, -1.0, r);
        double beta = kn::norm2(r);
        if (beta <= target) return iter;

        for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        std::size_t j = 0;
        for (; j < m && iter < max_iter; ++j, ++iter) {
            z = V[j];
            M.apply(z);
            kn::spmv(s.view(), z, w);
            // Modified Gram-Schmidt.
            for (std::size_t i = 0; i <= j; ++i) {
                const double h = kn::dot(w, V[i]);
                Hm(i, j) = h;
                kn::axpy(-h, V[i], w);
            }
            const double hnext = kn::norm2(w);
            Hm(j + 1, j) = hnext;
            if (hnext > 0.0)
                for (std::size_t i = 0; i < n; ++i) V[j + 1][i] = w[i] / hnext;

            for (std::size_t i = 0; i < j; ++i) {
                const double a = Hm(i, j);
                const double b = Hm(i + 1, j);
                Hm(i, j) = cs[i] * a + sn[i] * b;
                Hm(i + 1, j) = -sn[i] * a + cs[i] * b;
            }
            const double a = Hm(j, j);
            const double b = Hm(j + 1, j);
            const double rho = std::hypot(a, b);
            cs[j] = rho > 0.0 ? a / rho : 1.0;
            sn[j] = rho > 0.0 ? b / rho : 0.0;
            Hm(j, j) = rho;
            Hm(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            if (std::abs(g[j + 1]) <= target || hnext == 0.0) {
                ++j;
                ++iter;
                break;
            }
        }

        // Back substitution for the Krylov coefficients, then x += M^{-1} V y.
        std::vector<double> y(j);
        for (std::size_t i = j; i-- > 0;) {
            double t = g[i];
            for (std::size_t k = i + 1; k < j; ++k) t -= Hm(i, k) * y[k];
            if (Hm(i, i) == 0.0) throw SolverError(SolverError::Kind::Singular, "GMRES breakdown");
            y[i] = t / Hm(i, i);
        }
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t i = 0; i < j; ++i) kn::axpy(y[i], V[i], z);
        M.apply(z);
        kn::axpy(1.0, z, x);
    }
    return iter;
}

/// Jacobi-preconditioned conjugate gradients.
std::size_t conjugate_gradient(const SparseSystem& s, std::vector<double>& x, double tol,
                               std::size_t max_iter)
{
    const std::size_t n = s.dimension;
    std::vector<double> inv_diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = s.at(i, i);
        if (d <= 0.0) throw SolverError(SolverError::Kind::Singular, "CG: non-positive diagonal");
        inv_diag[i] = 1.0 / d;
    }
    const double bnorm = kn::norm2(s.rhs);
    const double target = tol * (bnorm > 0.0 ? bnorm : 1.0);

    std::vector<double> r = multiply(s, x);
    kn::xpay(s.rhs, -1.0, r);
    std::vector<double> z(n), p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = kn::dot(r, z);
    std::size_t iter = 0;
    while (kn::norm2(r) > target) {
        if (iter >= max_iter) return iter;
        kn::spmv(s.view(), p, q);
        const double pq = kn::dot(p, q);
        if (pq <= 0.0) throw SolverError(SolverError::Kind::Singular, "CG: matrix is not positive definite");
        const double alpha = rz / pq;
        kn::axpy(alpha, p, x);
        kn::axpy(-alpha, q, r);
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_next = kn::dot(r, z);
        kn::xpay(z, rz_next / rz, p);
        rz = rz_next;
        ++iter;
    }
    return iter;
}

} // namespace

SolveReport solve(const SparseSystem& system, const SolveOptions& options)
{
    HMMFV_REQUIRE(options.rel_tol > 0.0, "rel_tol must be positive");
    HMMFV_REQUIRE(system.offsets.size() == system.dimension + 1 && system.rhs.size() == system.dimension,
                  "system is not finalized");

    SolveReport report;
    const std::size_t n = system.dimension;
    if (n == 0) {
        report.method = "empty";
        return report;
    }
    report.solution.assign(n, 0.0);
    if (kn::norm2(system.rhs) == 0.0) {
        // Still reject structurally singular systems: every row needs an entry.
        for (std::size_t r = 0; r < n; ++r)
            if (system.offsets[r] == system.offsets[r + 1])
                throw SolverError(SolverError::Kind::Singular, "empty matrix row " + std::to_string(r));
        report.method = "zero-rhs";
        return report;
    }

    const std::size_t cap = 10 * n;
    const bool use_direct = options.strategy == SolverStrategy::Direct ||
                            (options.strategy == SolverStrategy::Automatic && n <= options.direct_limit);
    if (use_direct) {
        report.solution = direct_solve(system, options.symmetric_hint);
        report.method = options.symmetric_hint ? "direct-ldlt" : "direct-lu";
        if (relative_residual(system, report.solution) > options.rel_tol &&
            options.strategy == SolverStrategy::Automatic) {
            report.iterations = gmres(system, report.solution, options.rel_tol, options.restart, cap);
            report.method += "+gmres";
        }
    } else if (options.symmetric_hint) {
        report.iterations = conjugate_gradient(system, report.solution, options.rel_tol, cap);
        report.method = "pcg-jacobi";
    } else {
        report.iterations = gmres(system, report.solution, options.rel_tol, options.restart, cap);
        report.method = "gmres-ilu0";
    }

    if (!all_finite(report.solution))
        throw SolverError(SolverError::Kind::Singular, "solver produced non-finite values");
    report.relative_residual = relative_residual(system, report.solution);
    if (report.relative_residual > options.rel_tol) {
        const auto kind = report.iterations >= cap ? SolverError::Kind::NotConverged
                                                   : SolverError::Kind::ResidualCheck;
        throw SolverError(kind, report.method + ": relative residual " +
                                    std::to_string(report.relative_residual) + " above tolerance");
    }
    return report;
}

SolveReport solve(const SparseSystem& system, bool symmetric_hint, double rel_tol)
{
    SolveOptions opts;
    opts.symmetric_hint = symmetric_hint;
    opts.rel_tol = rel_tol;
    return solve(system, opts);
}

Eigen::MatrixXd dense_form(const SparseSystem& system)
{
    HMMFV_REQUIRE(system.dimension <= 4000, "dense_form refuses dimensions above 4000");
    const auto n = static_cast<Eigen::Index>(system.dimension);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < system.dimension; ++r)
        for (SparseIndex k = system.offsets[r]; k < system.offsets[r + 1]; ++k)
            d(static_cast<Eigen::Index>(r), system.columns[k]) = system.values[k];
    return d;
}

void write_matrix(std::ostream& os, const SparseSystem& system)
{
    const auto old_prec = os.precision(17);
    for (std::size_t r = 0; r < system.dimension; ++r)
        for (SparseIndex k = system.offsets[r]; k < system.offsets[r + 1]; ++k)
            os << r << ' ' << system.columns[k] << ' ' << system.values[k] << '\n';
    os.precision(old_prec);
}

} // namespace hmmfv
