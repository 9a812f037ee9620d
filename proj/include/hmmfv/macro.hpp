#pragma once

#include "hmmfv/coefficients.hpp"
#include "hmmfv/mesh.hpp"
#include "hmmfv/provider.hpp"
#include "hmmfv/sparse.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace hmmfv {

using ScalarField = std::function<double(const Point&)>;

/// P1 nodal values on a coarse mesh; zero on the boundary when produced by
/// solve_macro.
struct CoarseSolution {
    TriMesh mesh;
    std::vector<double> values;
};

enum class Scheme { Fvm, FemExact, FemQuadrature };
enum class FemQuadrature { Exact, Barycenter };

std::string_view to_string(Scheme s);

struct AssembledForm {
    SparseSystem system;
    Scheme scheme = Scheme::Fvm;
    CoefficientProvider provider;
};

struct AssemblyOptions {
    /// Replace boundary rows by identity rows with zero right-hand side.
    bool impose_dirichlet = true;
};

/// Provider from closed-form coefficients evaluated at element barycenters.
CoefficientProvider analytic_provider(const TriMesh& mesh, const AnalyticHomogenized& coeffs,
                                      Provenance provenance);

/// Nodal interpolant of a scalar field.
std::vector<double> interpolate(const TriMesh& mesh, const ScalarField& g);

/// (Pi* v)(x) = v(P) for x in the dual region of P; points on dual-region
/// boundaries resolve to the lowest node index among the tied vertices.
double pi_star_apply(const TriMesh& mesh, std::span<const double> v, const Point& x);

/// ||v - Pi* v||_0, integrated exactly over each element/dual-region piece.
double pi_star_deficit(const TriMesh& mesh, std::span<const double> v);

/// |v|_1 and ||v||_0 of a P1 function (exact integration).
double h1_seminorm(const TriMesh& mesh, std::span<const double> v);
double l2_norm(const TriMesh& mesh, std::span<const double> v);

/// Barycenter-quadrature finite volume form with (|K|/3) f(Q) per vertex.
AssembledForm assemble_fvm(const TriMesh& mesh, const CoefficientProvider& provider, const ScalarField& f,
                           const AssemblyOptions& options = {});

/// P1 Galerkin form. Exact mode integrates the trial/test products exactly with
/// the per-element constants; barycenter mode evaluates them at Q.
AssembledForm assemble_fem(const TriMesh& mesh, const CoefficientProvider& provider, const ScalarField& f,
                           FemQuadrature quadrature, const AssemblyOptions& options = {});

/// H1 Gram matrix (P1 mass + stiffness), no boundary treatment.
SparseSystem h1_gram(const TriMesh& mesh);

CoarseSolution solve_macro(const TriMesh& mesh, const AssembledForm& form);

/// Per-element E_K(g) = int_K g - |K| g(Q), reference integral from the
/// degree-5 seven-point rule.
std::vector<double> barycenter_quadrature_error(const TriMesh& mesh, const ScalarField& g);

/// Operator gaps sup |(M1 - M2)(u, v)| / (||u||_1 ||v||_1) over interior nodal
/// functions, between the forms
///   B (FEM exact, homogenized), B~ (FEM barycenter, homogenized),
///   A~ (FEM barycenter, HMM) and A_FVM (HMM).
struct ConsistencyGaps {
    double eps1 = 0.0;  // B - B~
    double eps2 = 0.0;  // B~ - A~
    double eps3 = 0.0;  // A~ - A_FVM
    double total = 0.0; // B - A_FVM
    /// Gap between int_K (b.grad u + c u) v and int_K (b.grad u + c u) Pi* v
    /// with the HMM constants, i.e. the transfer term before quadrature.
    double eps3_transfer = 0.0;
};

ConsistencyGaps consistency_gaps(const TriMesh& mesh, const CoefficientProvider& hmm,
                                  const CoefficientProvider& homogenized);

/// Largest generalized singular value of D with respect to the SPD matrix G.
double operator_gap(const Eigen::MatrixXd& D, const Eigen::MatrixXd& G);

/// "node_index x y value" per node.
void write_solution(std::ostream& os, const CoarseSolution& u);

} // namespace hmmfv
