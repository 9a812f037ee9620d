#include "hmmfv/homogenization.hpp"

#include "hmmfv/error.hpp"
#include "hmmfv/parallel.hpp"
#include "hmmfv/quadrature.hpp"
#include "hmmfv/sparse.hpp"

#include <cmath>

namespace hmmfv {

CorrectorField periodic_corrector(const ProblemSpec& spec, const Point& x, std::size_t n_cell)
{
    HMMFV_REQUIRE(n_cell >= 8, "periodic corrector needs n_cell >= 8");

    CorrectorField field;
    field.x = x;
    field.mesh = build_unit_square_mesh(n_cell);
    const TriMesh& mesh = field.mesh;
    const std::size_t np = n_cell + 1;
    const std::size_t nper = n_cell * n_cell;

    // Full non-periodic stiffness and load vectors first, folded onto the
    // periodic unknowns afterwards.
    const std::size_t nn = mesh.num_nodes();
    SparseBuilder full(nn);
    std::array<std::vector<double>, 2> load{std::vector<double>(nn, 0.0), std::vector<double>(nn, 0.0)};
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& t = mesh.triangles[k];
        const auto g = basis_gradients(mesh, k);
        const ElementGeometry geo = element_geometry(mesh, k);
        const Mat2 a = spec.eval_a(x, geo.barycenter);
        for (int r = 0; r < 3; ++r) {
            for (int s = 0; s < 3; ++s) full.add_entry(t[r], t[s], geo.area * g[r].dot(a * g[s]));
            for (int j = 0; j < 2; ++j) load[j][t[r]] -= geo.area * g[r].dot(a.col(j));
        }
    }
    const SparseSystem K = full.finalize();

    auto fold = [&](std::size_t node) { return (node / np % n_cell) * n_cell + (node % np) % n_cell; };
    SparseBuilder per(nper);
    for (std::size_t r = 0; r < nn; ++r) {
        const std::size_t pr = fold(r);
        if (pr == 0) continue;
        for (SparseIndex e = K.offsets[r]; e < K.offsets[r + 1]; ++e) {
            const std::size_t pc = fold(static_cast<std::size_t>(K.columns[e]));
            if (pc != 0) per.add_entry(pr, pc, K.values[e]);
        }
    }
    per.set_dirichlet_row(0, 0.0);
    SparseSystem sys = per.finalize();

    for (int j = 0; j < 2; ++j) {
        std::vector<double> rhs(nper, 0.0);
        for (std::size_t r = 0; r < nn; ++r)
            if (fold(r) != 0) rhs[fold(r)] += load[j][r];
        sys.rhs = rhs;
        std::vector<double> chi(nper, 0.0);
        if (kernels::norm2(rhs) > 0.0) chi = solve(sys, true, 1e-10).solution;
        double mean = 0.0;
        for (double v : chi) mean += v;
        mean /= static_cast<double>(nper);
        field.chi[j].resize(nn);
        for (std::size_t i = 0; i < nn; ++i) field.chi[j][i] = chi[fold(i)] - mean;
    }
    return field;
}

HomogenizedCoefficients homogenized_coefficients(const ProblemSpec& spec, const CorrectorField& corrector)
{
    const TriMesh& mesh = corrector.mesh;
    const Point& x = corrector.x;
    HomogenizedCoefficients h;
    h.x = x;
    double area = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& t = mesh.triangles[k];
        const auto g = basis_gradients(mesh, k);
        const ElementGeometry geo = element_geometry(mesh, k);
        const Mat2 a = spec.eval_a(x, geo.barycenter);
        const Vec2 b = spec.eval_b(x, geo.barycenter);
        for (int j = 0; j < 2; ++j) {
            const auto& chi = corrector.chi[j];
            Vec2 grad = Vec2::Unit(j);
            for (int r = 0; r < 3; ++r) grad += chi[t[r]] * g[r];
            h.a0.col(j) += geo.area * (a * grad);
            h.b0[j] += geo.area * b.dot(grad);
        }
        h.c0 += integrate_triangle(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]],
                                   [&](const Point& y) { return spec.eval_c(x, y); });
        area += geo.area;
    }
    h.a0 /= area;
    h.b0 /= area;
    h.c0 /= area;
    return h;
}

HomogenizedCoefficients homogenized_coefficients(const ProblemSpec& spec, const Point& x, std::size_t n_cell)
{
    return homogenized_coefficients(spec, periodic_corrector(spec, x, n_cell));
}

CoefficientProvider homogenized_provider(const TriMesh& mesh, const ProblemSpec& spec, std::size_t n_cell,
                                         std::size_t threads)
{
    CoefficientProvider p;
    p.provenance = Provenance::Homogenized;
    p.elements.resize(mesh.num_elements());
    auto record = [&](const Point& q) {
        const HomogenizedCoefficients h = homogenized_coefficients(spec, q, n_cell);
        // Symmetrize away solver roundoff; a0 is symmetric for symmetric a.
        return ElementCoefficients{0.5 * (h.a0 + h.a0.transpose()), h.b0, h.c0};
    };
    if (!spec.x_dependent && mesh.num_elements() > 0) {
        const ElementCoefficients shared = record(element_geometry(mesh, 0).barycenter);
        std::fill(p.elements.begin(), p.elements.end(), shared);
    } else {
        parallel_for(mesh.num_elements(), threads,
                     [&](std::size_t k) { p.elements[k] = record(element_geometry(mesh, k).barycenter); });
    }
    return p;
}

ReferenceSolution reference_solution(const TriMesh& fine, const CoefficientProvider& coefficients,
                                     const ScalarField& f)
{
    const AssembledForm form = assemble_fem(fine, coefficients, f, FemQuadrature::Exact);
    const SolveReport rep = solve(form.system, false, 1e-10);
    ReferenceSolution ref;
    ref.mesh = fine;
    ref.values = rep.solution;
    for (std::size_t i = 0; i < fine.num_nodes(); ++i)
        if (fine.boundary[i]) ref.values[i] = 0.0;
    ref.coefficients = coefficients;
    ref.relative_residual = rep.relative_residual;
    return ref;
}

ReferenceSolution reference_solution(const ProblemSpec& spec, std::size_t n_fine, std::size_t n_cell,
                                     std::size_t threads)
{
    const TriMesh fine = build_unit_square_mesh(n_fine);
    return reference_solution(fine, homogenized_provider(fine, spec, n_cell, threads), spec.f);
}

namespace {

bool is_unit_square(const TriMesh& m)
{
    return m.structured() && m.origin.isZero() && m.side == 1.0;
}

} // namespace

ErrorNorms h1_difference(const TriMesh& mesh_a, std::span<const double> a, const TriMesh& mesh_b,
                         std::span<const double> b)
{
    HMMFV_REQUIRE(is_unit_square(mesh_a) && is_unit_square(mesh_b), "h1_difference needs structured unit-square meshes");
    HMMFV_REQUIRE(a.size() == mesh_a.num_nodes() && b.size() == mesh_b.num_nodes(), "nodal vectors do not match meshes");
    const bool a_finer = mesh_a.cells_per_side >= mesh_b.cells_per_side;
    const TriMesh& fine = a_finer ? mesh_a : mesh_b;
    const TriMesh& coarse = a_finer ? mesh_b : mesh_a;
    const auto fv = a_finer ? a : b;
    const auto cv = a_finer ? b : a;
    HMMFV_REQUIRE(fine.cells_per_side % coarse.cells_per_side == 0, "meshes are not nested");

    double l2 = 0.0;
    double semi = 0.0;
    for (std::size_t k = 0; k < fine.num_elements(); ++k) {
        const auto& tf = fine.triangles[k];
        const auto gf = basis_gradients(fine, k);
        const ElementGeometry geo = element_geometry(fine, k);
        const double f_val = (fv[tf[0]] + fv[tf[1]] + fv[tf[2]]) / 3.0;
        const Vec2 f_grad = fv[tf[0]] * gf[0] + fv[tf[1]] * gf[1] + fv[tf[2]] * gf[2];

        const Index kc = locate_element(coarse, geo.barycenter);
        const auto& tc = coarse.triangles[kc];
        const auto gc = basis_gradients(coarse, kc);
        const auto lc = barycentric_coordinates(coarse, kc, geo.barycenter);
        const double c_val = lc[0] * cv[tc[0]] + lc[1] * cv[tc[1]] + lc[2] * cv[tc[2]];
        const Vec2 c_grad = cv[tc[0]] * gc[0] + cv[tc[1]] * gc[1] + cv[tc[2]] * gc[2];

        l2 += geo.area * (f_val - c_val) * (f_val - c_val);
        semi += geo.area * (f_grad - c_grad).squaredNorm();
    }
    return {std::sqrt(l2), std::sqrt(semi), std::sqrt(l2 + semi)};
}

ErrorNorms h1_error(const CoarseSolution& coarse, const ReferenceSolution& ref)
{
    return h1_difference(coarse.mesh, coarse.values, ref.mesh, ref.values);
}

ErrorNorms h1_error(const CoarseSolution& coarse, const AnalyticSolution& exact)
{
    const TriMesh& mesh = coarse.mesh;
    double l2 = 0.0;
    double semi = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& t = mesh.triangles[k];
        const auto g = basis_gradients(mesh, k);
        const Vec2 grad = coarse.values[t[0]] * g[0] + coarse.values[t[1]] * g[1] + coarse.values[t[2]] * g[2];
        const Point& p0 = mesh.nodes[t[0]];
        const Point& p1 = mesh.nodes[t[1]];
        const Point& p2 = mesh.nodes[t[2]];
        l2 += integrate_triangle(p0, p1, p2, [&](const Point& x) {
            const auto l = barycentric_coordinates(mesh, k, x);
            const double uh = l[0] * coarse.values[t[0]] + l[1] * coarse.values[t[1]] + l[2] * coarse.values[t[2]];
            const double d = exact.u(x) - uh;
            return d * d;
        });
        semi += integrate_triangle(p0, p1, p2, [&](const Point& x) { return (exact.grad(x) - grad).squaredNorm(); });
    }
    return {std::sqrt(l2), std::sqrt(semi), std::sqrt(l2 + semi)};
}

} // namespace hmmfv
