#include "hmmfv/coefficients.hpp"
#include "hmmfv/error.hpp"
#include "hmmfv/homogenization.hpp"
#include "hmmfv/micro.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace hmmfv {
namespace {

constexpr double pi = std::numbers::pi;

TEST(PeriodicCorrector, ConstantCoefficientHasNoCorrector)
{
    const CorrectorField f = periodic_corrector(catalog_get("constant"), Point(0.5, 0.5), 8);
    for (int j = 0; j < 2; ++j)
        for (double v : f.chi[j]) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(PeriodicCorrector, LaminateSawtooth)
{
    // In 1D, (1 + chi')alpha = a* gives chi' = a*/alpha - 1: slope 0.6 on
    // [0, 1/2) and -0.6 on [1/2, 1), a tent with mean zero.
    const CorrectorField f = periodic_corrector(catalog_get("laminate"), Point(0.5, 0.5), 16);
    for (std::size_t i = 0; i < f.mesh.num_nodes(); ++i) {
        const double t = f.mesh.nodes[i].x();
        const double tent = 0.6 * std::min(t, 1.0 - t) - 0.15;
        EXPECT_NEAR(f.chi[0][i], tent, 1e-10);
        EXPECT_NEAR(f.chi[1][i], 0.0, 1e-10);
    }
}

TEST(PeriodicCorrector, PairedFacesAgree)
{
    const CorrectorField f = periodic_corrector(catalog_get("modulated"), Point(0.3, 0.8), 8);
    const std::size_t n = 9;
    for (std::size_t k = 0; k < n; ++k)
        for (int j = 0; j < 2; ++j) {
            EXPECT_EQ(f.chi[j][k * n], f.chi[j][k * n + n - 1]);
            EXPECT_EQ(f.chi[j][k], f.chi[j][(n - 1) * n + k]);
        }
}

TEST(PeriodicCorrector, RejectsCoarseCell)
{
    EXPECT_THROW(periodic_corrector(catalog_get("constant"), Point(0, 0), 4), InvalidArgument);
}

TEST(HomogenizedCoefficients, LaminateMeans)
{
    const auto h = homogenized_coefficients(catalog_get("laminate"), Point(0.5, 0.5), 16);
    EXPECT_NEAR(h.a0(0, 0), 1.6, 1e-10);
    EXPECT_NEAR(h.a0(1, 1), 2.5, 1e-10);
    EXPECT_NEAR(h.a0(0, 1), 0.0, 1e-12);
    EXPECT_NEAR(h.b0.norm(), 0.0, 1e-15);
    EXPECT_NEAR(h.c0, 0.0, 1e-15);
}

TEST(HomogenizedCoefficients, VoigtReussBounds)
{
    const ProblemSpec s = catalog_get("smooth-periodic");
    const auto h = homogenized_coefficients(s, Point(0.5, 0.5), 32);
    // Harmonic mean of 2 + sin(2 pi t) is sqrt 3; arithmetic mean is 2.
    const double harmonic = std::sqrt(3.0), arithmetic = 2.0;
    for (int i = 0; i < 2; ++i) {
        EXPECT_GE(h.a0(i, i), harmonic - 2e-3);
        EXPECT_LE(h.a0(i, i), arithmetic + 1e-12);
    }
    EXPECT_NEAR(h.a0(0, 0), harmonic, 2e-3);
    EXPECT_NEAR(h.a0(1, 1), arithmetic, 1e-12);
    EXPECT_NEAR(h.b0.x(), 1.0, 1e-10);
    EXPECT_NEAR(h.b0.y(), 0.0, 1e-12);
    EXPECT_NEAR(h.c0, 2.0, 1e-12);
}

TEST(HomogenizedCoefficients, AgreesWithMatchedMicroCell)
{
    const ProblemSpec s = catalog_get("modulated");
    for (const Point x : {Point(0.2, 0.3), Point(0.75, 0.6)}) {
        const auto h = homogenized_coefficients(s, x, 16);
        const EffectiveData d = effective_data(s, x, {s.epsilon, s.epsilon, 16, BoundaryMode::Periodic});
        EXPECT_LE((h.a0 - d.A_H).cwiseAbs().maxCoeff(), 1e-3);
        EXPECT_LE((h.b0 - d.b_H).cwiseAbs().maxCoeff(), 1e-3);
        EXPECT_NEAR(h.c0, average_reaction(s, x, {2 * s.epsilon, s.epsilon, 16, BoundaryMode::Periodic}), 1e-6);
    }
}

TEST(HomogenizedProvider, SingleCellSolveForXIndependent)
{
    const TriMesh m = build_unit_square_mesh(4);
    const CoefficientProvider p = homogenized_provider(m, catalog_get("smooth-periodic"), 16);
    ASSERT_EQ(p.size(), m.num_elements());
    EXPECT_EQ(p.provenance, Provenance::Homogenized);
    for (const auto& e : p.elements) EXPECT_EQ(e.A, p.elements[0].A);
    EXPECT_NEAR((p[0].A - p[0].A.transpose()).norm(), 0.0, 0.0);
}

TEST(HomogenizedProvider, VariesForXDependent)
{
    const TriMesh m = build_unit_square_mesh(2);
    const CoefficientProvider p = homogenized_provider(m, catalog_get("modulated"), 8, 2);
    EXPECT_NE(p[0].A(0, 0), p[7].A(0, 0));
}

TEST(ErrorNorms, ZeroAgainstManufactured)
{
    const AnalyticSolution u = *catalog_entry("manufactured").solution;
    const TriMesh m = build_unit_square_mesh(8);
    const ErrorNorms e = h1_error(CoarseSolution{m, std::vector<double>(m.num_nodes(), 0.0)}, u);
    EXPECT_NEAR(e.l2, 0.5, 1e-6);
    EXPECT_NEAR(e.h1_semi, pi / std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(e.h1, std::sqrt(0.25 + pi * pi / 2.0), 1e-6);
}

TEST(ErrorNorms, DifferenceIsSymmetricAndExactOnNestedMeshes)
{
    const TriMesh coarse = build_unit_square_mesh(4), fine = build_unit_square_mesh(16);
    const auto g = [](const Point& p) { return std::sin(2 * p.x()) * p.y(); };
    const auto a = interpolate(coarse, g), b = interpolate(fine, g);
    const ErrorNorms ab = h1_difference(coarse, a, fine, b), ba = h1_difference(fine, b, coarse, a);
    EXPECT_DOUBLE_EQ(ab.h1, ba.h1);
    EXPECT_GT(ab.h1, 0.0);

    // Interpolant of a linear function is the same P1 function on both meshes.
    const auto lin = [](const Point& p) { return 2 * p.x() - p.y(); };
    EXPECT_NEAR(h1_difference(coarse, interpolate(coarse, lin), fine, interpolate(fine, lin)).h1, 0.0, 1e-13);
    // Difference of u and 0 reproduces the norms of u.
    const std::vector<double> zeros(fine.num_nodes(), 0.0);
    const ErrorNorms z = h1_difference(fine, b, fine, zeros);
    EXPECT_NEAR(z.h1_semi, h1_seminorm(fine, b), 1e-12);
}

TEST(ErrorNorms, RejectsNonNestedMeshes)
{
    const TriMesh a = build_unit_square_mesh(3), b = build_unit_square_mesh(4);
    EXPECT_THROW(h1_difference(a, std::vector<double>(a.num_nodes()), b, std::vector<double>(b.num_nodes())),
                 InvalidArgument);
}

TEST(ReferenceSolution, SelfConvergence)
{
    const ProblemSpec s = catalog_get("smooth-periodic");
    const auto r16 = reference_solution(s, 16, 16), r32 = reference_solution(s, 32, 16),
               r64 = reference_solution(s, 64, 16);
    EXPECT_LE(r64.relative_residual, 1e-10);
    const double e1 = h1_difference(r16.mesh, r16.values, r64.mesh, r64.values).h1;
    const double e2 = h1_difference(r32.mesh, r32.values, r64.mesh, r64.values).h1;
    // With the finest as proxy the ratio sits near 3 (2^1 corrected by 1/(1 - 1/2)).
    EXPECT_GT(e1 / e2, 2.0);
}

} // namespace
} // namespace hmmfv
