#include "hmmfv/macro.hpp"

#include "hmmfv/error.hpp"
#include "hmmfv/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace hmmfv {

std::string_view to_string(Provenance p)
{
    switch (p) {
    case Provenance::Hmm: return "hmm";
    case Provenance::Homogenized: return "homogenized";
    case Provenance::Direct: return "direct";
    }
    return "?";
}

std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::Fvm: return "fvm";
    case Scheme::FemExact: return "fem_exact";
    case Scheme::FemQuadrature: return "fem_quadrature";
    }
    return "?";
}

namespace {

void check_provider(const TriMesh& mesh, const CoefficientProvider& provider)
{
    if (provider.size() != mesh.num_elements())
        throw InvalidArgument("coefficient provider has " + std::to_string(provider.size()) +
                              " records for a mesh with " + std::to_string(mesh.num_elements()) + " elements");
}

void impose_boundary(const TriMesh& mesh, SparseBuilder& builder)
{
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
        if (mesh.boundary[i]) builder.set_dirichlet_row(i, 0.0);
}

void add_source(const TriMesh& mesh, std::size_t k, const ScalarField& f, SparseBuilder& builder)
{
    const ElementGeometry g = element_geometry(mesh, k);
    const double share = g.area / 3.0 * f(g.barycenter);
    for (Index v : mesh.triangles[k]) builder.add_rhs(v, share);
}

// Exact integral of lambda_j over the dual piece of vertex i inside K.
double dual_piece_moment(const ElementGeometry& g, const std::array<Point, 3>& p, int i, int j,
                         const TriMesh& mesh, std::size_t k)
{
    const Point& mid_a = g.edge_midpoints[(i + 2) % 3];
    const Point& mid_b = g.edge_midpoints[(i + 1) % 3];
    const std::array<std::array<Point, 3>, 2> pieces = {{{p[i], mid_a, g.barycenter}, {p[i], g.barycenter, mid_b}}};
    double sum = 0.0;
    for (const auto& tri : pieces) {
        const double area = 0.5 * std::abs((tri[1] - tri[0]).x() * (tri[2] - tri[0]).y() -
                                           (tri[1] - tri[0]).y() * (tri[2] - tri[0]).x());
        const Point c = (tri[0] + tri[1] + tri[2]) / 3.0;
        sum += area * barycentric_coordinates(mesh, k, c)[j];
    }
    return sum;
}

Eigen::MatrixXd interior_block(const Eigen::MatrixXd& M, const std::vector<Eigen::Index>& interior)
{
    const auto n = static_cast<Eigen::Index>(interior.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) out(r, c) = M(interior[r], interior[c]);
    return out;
}

} // namespace

CoefficientProvider analytic_provider(const TriMesh& mesh, const AnalyticHomogenized& coeffs, Provenance provenance)
{
    CoefficientProvider p;
    p.provenance = provenance;
    p.elements.reserve(mesh.num_elements());
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const Point q = element_geometry(mesh, k).barycenter;
        p.elements.push_back({coeffs.a0(q), coeffs.b0(q), coeffs.c0(q)});
    }
    return p;
}

std::vector<double> interpolate(const TriMesh& mesh, const ScalarField& g)
{
    std::vector<double> v(mesh.num_nodes());
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) v[i] = g(mesh.nodes[i]);
    return v;
}

double pi_star_apply(const TriMesh& mesh, std::span<const double> v, const Point& x)
{
    HMMFV_REQUIRE(v.size() == mesh.num_nodes(), "nodal vector does not match the mesh");
    const Index k = locate_element(mesh, x);
    const auto l = barycentric_coordinates(mesh, k, x);
    const auto& t = mesh.triangles[k];
    const double lmax = std::max({l[0], l[1], l[2]});
    Index best = std::numeric_limits<Index>::max();
    for (int i = 0; i < 3; ++i)
        if (lmax - l[i] <= 1e-12) best = std::min(best, t[i]);
    return v[best];
}

double pi_star_deficit(const TriMesh& mesh, std::span<const double> v)
{
    HMMFV_REQUIRE(v.size() == mesh.num_nodes(), "nodal vector does not match the mesh");
    double sum = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const ElementGeometry g = element_geometry(mesh, k);
        const auto& t = mesh.triangles[k];
        const std::array<Point, 3> p = {mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]};
        auto value = [&](const Point& x) {
            const auto l = barycentric_coordinates(mesh, k, x);
            return l[0] * v[t[0]] + l[1] * v[t[1]] + l[2] * v[t[2]];
        };
        for (int i = 0; i < 3; ++i) {
            const double vp = v[t[i]];
            const std::array<std::array<Point, 3>, 2> pieces = {
                {{p[i], g.edge_midpoints[(i + 2) % 3], g.barycenter}, {p[i], g.barycenter, g.edge_midpoints[(i + 1) % 3]}}};
            for (const auto& tri : pieces) {
                // Edge-midpoint rule: exact for the quadratic (v - v(P))^2.
                const double area = 0.5 * std::abs((tri[1] - tri[0]).x() * (tri[2] - tri[0]).y() -
                                                   (tri[1] - tri[0]).y() * (tri[2] - tri[0]).x());
                double s = 0.0;
                for (int e = 0; e < 3; ++e) {
                    const double d = value(0.5 * (tri[e] + tri[(e + 1) % 3])) - vp;
                    s += d * d;
                }
                sum += area * s / 3.0;
            }
        }
    }
    return std::sqrt(sum);
}

double h1_seminorm(const TriMesh& mesh, std::span<const double> v)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto gr = basis_gradients(mesh, k);
        const auto& t = mesh.triangles[k];
        const Vec2 grad = v[t[0]] * gr[0] + v[t[1]] * gr[1] + v[t[2]] * gr[2];
        sum += std::abs(signed_area(mesh, k)) * grad.squaredNorm();
    }
    return std::sqrt(sum);
}

double l2_norm(const TriMesh& mesh, std::span<const double> v)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& t = mesh.triangles[k];
        const double a = v[t[0]], b = v[t[1]], c = v[t[2]];
        // Exact P1 mass: |K|/12 (sum v_i^2 + (sum v_i)^2).
        sum += std::abs(signed_area(mesh, k)) / 12.0 * (a * a + b * b + c * c + (a + b + c) * (a + b + c));
    }
    return std::sqrt(sum);
}

AssembledForm assemble_fvm(const TriMesh& mesh, const CoefficientProvider& provider, const ScalarField& f,
                           const AssemblyOptions& options)
{
    check_provider(mesh, provider);
    SparseBuilder builder(mesh.num_nodes());
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& co = provider[k];
        const auto& t = mesh.triangles[k];
        const auto grads = basis_gradients(mesh, k);
        const DualGeometry dual = dual_geometry(mesh, k);
        for (int i = 0; i < 3; ++i) {
            const DualRegion& region = dual.regions[i];
            for (int j = 0; j < 3; ++j) {
                const Vec2 flux = co.A * grads[j];
                double v = 0.0;
                for (const auto& seg : region.segments) v -= seg.length * seg.normal.dot(flux);
                // u_H(Q) is the vertex mean for P1.
                v += region.sub_area * (co.b.dot(grads[j]) + co.c / 3.0);
                builder.add_entry(t[i], t[j], v);
            }
        }
        add_source(mesh, k, f, builder);
    }
    if (options.impose_dirichlet) impose_boundary(mesh, builder);
    return {builder.finalize(), Scheme::Fvm, provider};
}

AssembledForm assemble_fem(const TriMesh& mesh, const CoefficientProvider& provider, const ScalarField& f,
                           FemQuadrature quadrature, const AssemblyOptions& options)
{
    check_provider(mesh, provider);
    SparseBuilder builder(mesh.num_nodes());
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& co = provider[k];
        const auto& t = mesh.triangles[k];
        const auto grads = basis_gradients(mesh, k);
        const double area = std::abs(signed_area(mesh, k));
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double v = area * grads[i].dot(co.A * grads[j]);
                // (b . grad u) v: grad u is constant, so both modes integrate v exactly.
                v += area / 3.0 * co.b.dot(grads[j]);
                if (quadrature == FemQuadrature::Exact)
                    v += co.c * area / 12.0 * (i == j ? 2.0 : 1.0);
                else
                    v += co.c * area / 9.0;
                builder.add_entry(t[i], t[j], v);
            }
        }
        add_source(mesh, k, f, builder);
    }
    if (options.impose_dirichlet) impose_boundary(mesh, builder);
    return {builder.finalize(), quadrature == FemQuadrature::Exact ? Scheme::FemExact : Scheme::FemQuadrature,
            provider};
}

SparseSystem h1_gram(const TriMesh& mesh)
{
    SparseBuilder builder(mesh.num_nodes());
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& t = mesh.triangles[k];
        const auto grads = basis_gradients(mesh, k);
        const double area = std::abs(signed_area(mesh, k));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                builder.add_entry(t[i], t[j], area * grads[i].dot(grads[j]) + area / 12.0 * (i == j ? 2.0 : 1.0));
    }
    return builder.finalize();
}

CoarseSolution solve_macro(const TriMesh& mesh, const AssembledForm& form)
{
    HMMFV_REQUIRE(form.system.dimension == mesh.num_nodes(), "assembled form does not match the mesh");
    const SolveReport rep = solve(form.system, false, 1e-10);
    CoarseSolution u{mesh, rep.solution};
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
        if (mesh.boundary[i]) u.values[i] = 0.0; // identity rows already give 0; drop roundoff
    return u;
}

std::vector<double> barycenter_quadrature_error(const TriMesh& mesh, const ScalarField& g)
{
    std::vector<double> out(mesh.num_elements());
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& t = mesh.triangles[k];
        const ElementGeometry geo = element_geometry(mesh, k);
        const double exact = integrate_triangle(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]], g);
        out[k] = exact - geo.area * g(geo.barycenter);
    }
    return out;
}

double operator_gap(const Eigen::MatrixXd& D, const Eigen::MatrixXd& G)
{
    if (D.size() == 0) return 0.0;
    const Eigen::LLT<Eigen::MatrixXd> llt(G);
    HMMFV_REQUIRE(llt.info() == Eigen::Success, "Gram matrix is not positive definite");
    const auto L = llt.matrixL();
    const Eigen::MatrixXd X = L.solve(D);                          // L^{-1} D
    const Eigen::MatrixXd M = L.solve(X.transpose()).transpose(); // L^{-1} D L^{-T}
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(0);
}

ConsistencyGaps consistency_gaps(const TriMesh& mesh, const CoefficientProvider& hmm,
                                  const CoefficientProvider& homogenized)
{
    HMMFV_REQUIRE(mesh.num_nodes() <= 4000, "consistency_gaps needs at most 4000 nodes");
    check_provider(mesh, hmm);
    check_provider(mesh, homogenized);

    const ScalarField zero = [](const Point&) { return 0.0; };
    const AssemblyOptions raw{false};
    const Eigen::MatrixXd B = dense_form(assemble_fem(mesh, homogenized, zero, FemQuadrature::Exact, raw).system);
    const Eigen::MatrixXd Bq = dense_form(assemble_fem(mesh, homogenized, zero, FemQuadrature::Barycenter, raw).system);
    const Eigen::MatrixXd Aq = dense_form(assemble_fem(mesh, hmm, zero, FemQuadrature::Barycenter, raw).system);
    const Eigen::MatrixXd Af = dense_form(assemble_fvm(mesh, hmm, zero, raw).system);
    const Eigen::MatrixXd G = dense_form(h1_gram(mesh));

    // Transfer term: int_K (b.grad phi_j + c phi_j)(phi_i - Pi* phi_i).
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& co = hmm[k];
        const auto& t = mesh.triangles[k];
        const ElementGeometry g = element_geometry(mesh, k);
        const std::array<Point, 3> p = {mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double mass = g.area / 12.0 * (i == j ? 2.0 : 1.0);
                const double lumped = dual_piece_moment(g, p, i, j, mesh, k);
                // int_K (phi_i - Pi* phi_i) = |K|/3 - |K|/3 = 0 for the convection part.
                T(t[i], t[j]) += co.c * (mass - lumped);
            }
        }
    }

    std::vector<Eigen::Index> interior;
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
        if (!mesh.boundary[i]) interior.push_back(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd Gi = interior_block(G, interior);
    auto gap = [&](const Eigen::MatrixXd& D) { return operator_gap(interior_block(D, interior), Gi); };

    ConsistencyGaps r;
    r.eps1 = gap(B - Bq);
    r.eps2 = gap(Bq - Aq);
    r.eps3 = gap(Aq - Af);
    r.total = gap(B - Af);
    r.eps3_transfer = gap(T);
    return r;
}

void write_solution(std::ostream& os, const CoarseSolution& u)
{
    const auto old_prec = os.precision(17);
    for (std::size_t i = 0; i < u.mesh.num_nodes(); ++i)
        os << i << ' ' << u.mesh.nodes[i].x() << ' ' << u.mesh.nodes[i].y() << ' ' << u.values[i] << '\n';
    os.precision(old_prec);
}

} // namespace hmmfv
