#include "hmmfv/error.hpp"
#include "hmmfv/sparse.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>
#include <sstream>

namespace hmmfv {
namespace {

SparseSystem from_dense(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
    SparseBuilder B = assemble_begin(static_cast<std::size_t>(A.rows()));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (A(i, j) != 0.0) B.add_entry(i, j, A(i, j));
        B.add_rhs(i, b(i));
    }
    return B.finalize();
}

TEST(SparseBuilder, AccumulatesDuplicates)
{
    SparseBuilder B(3);
    B.add_entry(0, 0, 1.0);
    B.add_entry(0, 0, 2.5);
    B.add_entry(2, 1, -1.0);
    B.add_entry(0, 2, 4.0);
    B.add_rhs(1, 1.0);
    B.add_rhs(1, 2.0);
    const SparseSystem S = B.finalize();
    EXPECT_EQ(S.at(0, 0), 3.5);
    EXPECT_EQ(S.at(2, 1), -1.0);
    EXPECT_EQ(S.at(1, 1), 0.0);
    EXPECT_EQ(S.nonzeros(), 3u);
    EXPECT_EQ(S.rhs[1], 3.0);
    for (std::size_t r = 0; r < S.dimension; ++r)
        for (auto k = S.offsets[r] + 1; k < S.offsets[r + 1]; ++k) EXPECT_LT(S.columns[k - 1], S.columns[k]);
}

TEST(SparseBuilder, DirichletRowReplacesEntries)
{
    SparseBuilder B(2);
    B.add_entry(0, 0, 5.0);
    B.add_entry(0, 1, 3.0);
    B.add_rhs(0, 9.0);
    B.set_dirichlet_row(0, 0.25);
    B.add_entry(1, 1, 1.0);
    const SparseSystem S = B.finalize();
    EXPECT_EQ(S.at(0, 0), 1.0);
    EXPECT_EQ(S.at(0, 1), 0.0);
    EXPECT_EQ(S.rhs[0], 0.25);
}

TEST(SparseBuilder, Errors)
{
    SparseBuilder B(2);
    EXPECT_THROW(B.add_entry(2, 0, 1.0), InvalidArgument);
    EXPECT_THROW(B.add_rhs(5, 1.0), InvalidArgument);
    B.add_entry(0, 0, 1.0);
    B.add_entry(1, 1, 1.0);
    (void)B.finalize();
    EXPECT_THROW(B.add_entry(0, 0, 1.0), InvalidArgument);
    EXPECT_THROW((void)B.finalize(), InvalidArgument);
}

TEST(SparseBuilder, MergeMatchesSerial)
{
    SparseBuilder a(3), b(3), all(3);
    a.add_entry(0, 1, 1.0);
    b.add_entry(0, 1, 2.0);
    b.add_entry(2, 2, 3.0);
    all.add_entry(0, 1, 3.0);
    all.add_entry(2, 2, 3.0);
    a.merge(b);
    const SparseSystem s1 = a.finalize(), s2 = all.finalize();
    EXPECT_EQ(s1.values, s2.values);
    EXPECT_EQ(s1.columns, s2.columns);
}

TEST(Solve, HandSystems)
{
    {
        Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
        Eigen::VectorXd b(4);
        b << 1, -2, 3, 0.5;
        const auto r = solve(from_dense(I, b), true);
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.solution[i], b(i), 1e-15);
    }
    {
        Eigen::MatrixXd A(2, 2);
        A << 2, 1, 1, 2;
        Eigen::VectorXd b(2);
        b << 3, 3;
        const auto r = solve(from_dense(A, b), true);
        EXPECT_NEAR(r.solution[0], 1.0, 1e-14);
        EXPECT_NEAR(r.solution[1], 1.0, 1e-14);
    }
    {
        Eigen::MatrixXd A(3, 3);
        A << 2, -1, 0, -1, 2, -1, 0, -1, 2;
        Eigen::VectorXd b = Eigen::VectorXd::Ones(3);
        for (bool sym : {true, false}) {
            const auto r = solve(from_dense(A, b), sym);
            EXPECT_NEAR(r.solution[0], 1.5, 1e-14);
            EXPECT_NEAR(r.solution[1], 2.0, 1e-14);
            EXPECT_NEAR(r.solution[2], 1.5, 1e-14);
            EXPECT_LE(r.relative_residual, 1e-10);
        }
    }
}

TEST(Solve, SingularMatrixReported)
{
    Eigen::MatrixXd A(2, 2);
    A << 1, 1, 1, 1;
    Eigen::VectorXd b(2);
    b << 1, 2;
    try {
        (void)solve(from_dense(A, b), false);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_TRUE(e.kind() == SolverError::Kind::Singular || e.kind() == SolverError::Kind::ResidualCheck ||
                    e.kind() == SolverError::Kind::NotConverged);
    }
}

TEST(Solve, EmptyRowRejected)
{
    SparseBuilder B(2);
    B.add_entry(0, 0, 1.0);
    B.add_rhs(1, 1.0);
    EXPECT_THROW((void)solve(B.finalize(), false), SolverError);
}

TEST(Solve, KrylovPathMatchesDirect)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const int n = 200;
    SparseBuilder B(n);
    for (int i = 0; i < n; ++i) {
        B.add_entry(i, i, 4.0);
        if (i > 0) B.add_entry(i, i - 1, -1.0 + 0.3 * d(rng));
        if (i + 1 < n) B.add_entry(i, i + 1, -1.0 + 0.3 * d(rng));
        B.add_rhs(i, d(rng));
    }
    const SparseSystem S = B.finalize();
    SolveOptions direct, krylov;
    direct.strategy = SolverStrategy::Direct;
    krylov.strategy = SolverStrategy::Krylov;
    const auto a = solve(S, direct), b = solve(S, krylov);
    EXPECT_GT(b.iterations, 0u);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(a.solution[i], b.solution[i], 1e-8);
}

TEST(Solve, SymmetricKrylovPath)
{
    const int n = 100;
    SparseBuilder B(n);
    for (int i = 0; i < n; ++i) {
        B.add_entry(i, i, 2.0);
        if (i > 0) B.add_entry(i, i - 1, -1.0);
        if (i + 1 < n) B.add_entry(i, i + 1, -1.0);
        B.add_rhs(i, 1.0);
    }
    SolveOptions o;
    o.symmetric_hint = true;
    o.strategy = SolverStrategy::Krylov;
    const auto r = solve(B.finalize(), o);
    // Exact: x_i = (i+1)(n-i)/2.
    for (int i = 0; i < n; ++i) EXPECT_NEAR(r.solution[i], 0.5 * (i + 1) * (n - i), 1e-6 * n * n);
}

TEST(Solve, RandomDenseProperty)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial * 49 / 29;
        Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return d(rng); });
        A.diagonal().array() += n;
        const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(n, [&] { return d(rng); });
        const SparseSystem S = from_dense(A, b);
        EXPECT_TRUE(dense_form(S).isApprox(A, 1e-15));
        const auto r = solve(S, false);
        const Eigen::VectorXd ref = A.partialPivLu().solve(b);
        for (int i = 0; i < n; ++i) EXPECT_NEAR(r.solution[i], ref(i), 1e-10);
        const Eigen::Map<const Eigen::VectorXd> x(r.solution.data(), n);
        const double rr = (A * x - b).norm() / b.norm();
        EXPECT_NEAR(relative_residual(S, r.solution), rr, 1e-12);
    }
}

TEST(Solve, ZeroRightHandSide)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3) * 2.0;
    const auto r = solve(from_dense(A, Eigen::VectorXd::Zero(3)), true);
    for (double v : r.solution) EXPECT_EQ(v, 0.0);
}

TEST(WriteMatrix, CoordinateLines)
{
    Eigen::MatrixXd A(2, 2);
    A << 1, 0, 0, 2;
    std::ostringstream os;
    write_matrix(os, from_dense(A, Eigen::VectorXd::Zero(2)));
    std::istringstream is(os.str());
    int r, c;
    double v;
    is >> r >> c >> v;
    EXPECT_EQ(r, 0);
    EXPECT_EQ(v, 1.0);
    is >> r >> c >> v;
    EXPECT_EQ(c, 1);
    EXPECT_EQ(v, 2.0);
}

} // namespace
} // namespace hmmfv
