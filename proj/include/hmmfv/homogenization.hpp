#pragma once

#include "hmmfv/coefficients.hpp"
#include "hmmfv/macro.hpp"
#include "hmmfv/mesh.hpp"
#include "hmmfv/provider.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace hmmfv {

/// Periodic correctors chi_1, chi_2 on the unit cell Y at a frozen macro point.
/// Values are stored per node of the (n+1)^2 cell mesh; paired nodes on
/// opposite faces carry identical values and each chi_j has zero mean.
struct CorrectorField {
    TriMesh mesh;
    std::array<std::vector<double>, 2> chi;
    Point x = Point::Zero();
};

struct HomogenizedCoefficients {
    Mat2 a0 = Mat2::Zero();
    Vec2 b0 = Vec2::Zero();
    double c0 = 0.0;
    Point x = Point::Zero();
};

/// Solves int_Y a(x, y)(e_j + grad chi_j) . grad phi dy = 0 for periodic phi.
CorrectorField periodic_corrector(const ProblemSpec& spec, const Point& x, std::size_t n_cell);

/// a0_ij = <(a (e_j + grad chi_j))_i>, b0_j = <b . (e_j + grad chi_j)>, c0 = <c>.
HomogenizedCoefficients homogenized_coefficients(const ProblemSpec& spec, const Point& x, std::size_t n_cell);
HomogenizedCoefficients homogenized_coefficients(const ProblemSpec& spec, const CorrectorField& corrector);

/// Homogenized data at every element barycenter. x-independent problems solve
/// the cell problem once.
CoefficientProvider homogenized_provider(const TriMesh& mesh, const ProblemSpec& spec, std::size_t n_cell,
                                         std::size_t threads = 1);

struct ReferenceSolution {
    TriMesh mesh;
    std::vector<double> values;
    CoefficientProvider coefficients;
    double relative_residual = 0.0;
};

/// P1 FEM (exact mode) solution of the homogenized problem on an n_fine mesh.
ReferenceSolution reference_solution(const ProblemSpec& spec, std::size_t n_fine, std::size_t n_cell,
                                     std::size_t threads = 1);
ReferenceSolution reference_solution(const TriMesh& fine, const CoefficientProvider& coefficients,
                                     const ScalarField& f);

struct ErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double h1 = 0.0;
};

/// Norms of the difference of two P1 functions on nested structured meshes of
/// the unit square, integrated by the centroid rule on the finer mesh.
/// Throws unless one resolution divides the other.
ErrorNorms h1_difference(const TriMesh& mesh_a, std::span<const double> a, const TriMesh& mesh_b,
                         std::span<const double> b);
ErrorNorms h1_error(const CoarseSolution& coarse, const ReferenceSolution& ref);

/// Error against a closed-form solution, seven-point rule per element.
ErrorNorms h1_error(const CoarseSolution& coarse, const AnalyticSolution& exact);

} // namespace hmmfv
