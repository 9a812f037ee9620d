#include "hmmfv/micro.hpp"

#include "hmmfv/error.hpp"
#include "hmmfv/parallel.hpp"
#include "hmmfv/sparse.hpp"

#include <cmath>
#include <string>

namespace hmmfv {

std::string_view to_string(BoundaryMode m)
{
    return m == BoundaryMode::Dirichlet ? "dirichlet" : "periodic";
}

BoundaryMode parse_boundary_mode(std::string_view s)
{
    if (s == "dirichlet") return BoundaryMode::Dirichlet;
    if (s == "periodic") return BoundaryMode::Periodic;
    throw InvalidArgument("unknown bc_mode '" + std::string(s) + "'");
}

namespace {

bool is_positive_integer(double r)
{
    return r >= 1.0 - 1e-9 && std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

struct CellCoefficients {
    std::vector<Mat2> a;
    std::vector<double> area;
    std::vector<std::array<Vec2, 3>> grads;
};

CellCoefficients sample_cell(const ProblemSpec& spec, const Point& Q, const TriMesh& mesh)
{
    CellCoefficients cc;
    const std::size_t ne = mesh.num_elements();
    cc.a.reserve(ne);
    cc.area.reserve(ne);
    cc.grads.reserve(ne);
    for (std::size_t k = 0; k < ne; ++k) {
        const ElementGeometry g = element_geometry(mesh, k);
        cc.a.push_back(spec.eval_a(Q, g.barycenter));
        cc.area.push_back(g.area);
        cc.grads.push_back(basis_gradients(mesh, k));
    }
    return cc;
}

MicroSolution solve_dirichlet(const TriMesh& mesh, const CellCoefficients& cc, const Vec2& slope)
{
    const std::size_t nn = mesh.num_nodes();
    // Unknowns are the interior nodes only, which keeps the system SPD.
    std::vector<std::ptrdiff_t> dof(nn, -1);
    std::size_t ndof = 0;
    for (std::size_t i = 0; i < nn; ++i)
        if (!mesh.boundary[i]) dof[i] = static_cast<std::ptrdiff_t>(ndof++);

    std::vector<double> R(nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i)
        if (mesh.boundary[i]) R[i] = slope.dot(mesh.nodes[i]);

    MicroSolution sol;
    sol.slope = slope;
    sol.bc_mode = BoundaryMode::Dirichlet;
    if (ndof > 0) {
        SparseBuilder builder(ndof);
        for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
            const auto& t = mesh.triangles[k];
            const auto& g = cc.grads[k];
            for (int r = 0; r < 3; ++r) {
                if (dof[t[r]] < 0) continue;
                const Vec2 ag = cc.a[k] * g[r];
                for (int s = 0; s < 3; ++s) {
                    const double v = cc.area[k] * g[s].dot(ag);
                    if (dof[t[s]] >= 0)
                        builder.add_entry(dof[t[r]], dof[t[s]], v);
                    else
                        builder.add_rhs(dof[t[r]], -v * R[t[s]]);
                }
            }
        }
        const SparseSystem sys = builder.finalize();
        const SolveReport rep = solve(sys, true, 1e-10);
        for (std::size_t i = 0; i < nn; ++i)
            if (dof[i] >= 0) R[i] = rep.solution[dof[i]];
        sol.relative_residual = rep.relative_residual;
    }
    sol.mesh = mesh;
    sol.values = std::move(R);
    return sol;
}

MicroSolution solve_periodic(const TriMesh& mesh, const CellCoefficients& cc, const Vec2& slope)
{
    const std::size_t m = mesh.cells_per_side;
    const std::size_t np = m + 1;
    const std::size_t nper = m * m;
    auto periodic_dof = [&](std::size_t node) { return (node / np % m) * m + node % np % m; };

    // chi solves K chi = -int a slope . grad phi; dof 0 is pinned to remove
    // the constant null space, then the mean is subtracted.
    SparseBuilder builder(nper);
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto& t = mesh.triangles[k];
        const auto& g = cc.grads[k];
        const Vec2 a_slope = cc.a[k] * slope;
        for (int r = 0; r < 3; ++r) {
            const std::size_t pr = periodic_dof(t[r]);
            if (pr == 0) continue;
            const Vec2 ag = cc.a[k] * g[r];
            for (int s = 0; s < 3; ++s) {
                const std::size_t ps = periodic_dof(t[s]);
                if (ps == 0) continue;
                builder.add_entry(pr, ps, cc.area[k] * g[s].dot(ag));
            }
            builder.add_rhs(pr, -cc.area[k] * g[r].dot(a_slope));
        }
    }
    builder.set_dirichlet_row(0, 0.0);
    const SparseSystem sys = builder.finalize();

    MicroSolution sol;
    sol.slope = slope;
    sol.bc_mode = BoundaryMode::Periodic;
    std::vector<double> chi(nper, 0.0);
    if (kernels::norm2(sys.rhs) > 0.0) {
        const SolveReport rep = solve(sys, true, 1e-10);
        chi = rep.solution;
        sol.relative_residual = rep.relative_residual;
    }
    double mean = 0.0;
    for (double v : chi) mean += v;
    mean /= static_cast<double>(nper);

    sol.values.resize(mesh.num_nodes());
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
        sol.values[i] = slope.dot(mesh.nodes[i]) + chi[periodic_dof(i)] - mean;
    sol.mesh = mesh;
    return sol;
}

TriMesh window_mesh(const MicroWindow& w)
{
    return build_square_mesh(w.cells, w.origin, w.side);
}

} // namespace

void validate(const MicroConfig& cfg)
{
    HMMFV_REQUIRE(cfg.delta > 0.0, "micro config: delta must be positive");
    HMMFV_REQUIRE(cfg.epsilon > 0.0, "micro config: epsilon must be positive");
    HMMFV_REQUIRE(cfg.cells_per_period >= 4, "micro config: cells_per_period must be at least 4");
    if (cfg.bc_mode == BoundaryMode::Periodic)
        HMMFV_REQUIRE(is_positive_integer(cfg.ratio()),
                      "micro config: periodic mode needs an integer delta/epsilon");
}

MicroWindow micro_window(const Point& Q, const MicroConfig& cfg)
{
    validate(cfg);
    const double cpp = static_cast<double>(cfg.cells_per_period);
    MicroWindow w;
    w.side = cfg.bc_mode == BoundaryMode::Periodic ? std::round(cfg.ratio()) : cfg.ratio();
    w.cells = static_cast<std::size_t>(std::max(1.0, std::round(w.side * cpp)));
    for (int d = 0; d < 2; ++d) {
        const double corner = Q[d] / cfg.epsilon - 0.5 * w.side;
        const double snapped = std::round(corner * cpp);
        const double reduced = snapped - cpp * std::floor(snapped / cpp);
        w.origin[d] = reduced / cpp;
    }
    return w;
}

Vec2 MicroSolution::gradient(std::size_t k) const
{
    const auto g = basis_gradients(mesh, k);
    const auto& t = mesh.triangles[k];
    return values[t[0]] * g[0] + values[t[1]] * g[1] + values[t[2]] * g[2];
}

MicroSolution solve_cell(const ProblemSpec& spec, const Point& Q, const MicroConfig& cfg, const Vec2& slope)
{
    const MicroWindow w = micro_window(Q, cfg);
    const TriMesh mesh = window_mesh(w);
    const CellCoefficients cc = sample_cell(spec, Q, mesh);
    return cfg.bc_mode == BoundaryMode::Dirichlet ? solve_dirichlet(mesh, cc, slope)
                                                  : solve_periodic(mesh, cc, slope);
}

MicroSolution solve_corrector(const ProblemSpec& spec, const Point& Q, const MicroConfig& cfg, int j)
{
    HMMFV_REQUIRE(j == 1 || j == 2, "corrector direction must be 1 or 2");
    return solve_cell(spec, Q, cfg, j == 1 ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0));
}

Vec2 flux_average(const ProblemSpec& spec, const Point& Q, const MicroSolution& sol)
{
    Vec2 sum = Vec2::Zero();
    double area = 0.0;
    for (std::size_t k = 0; k < sol.mesh.num_elements(); ++k) {
        const ElementGeometry g = element_geometry(sol.mesh, k);
        sum += g.area * (spec.eval_a(Q, g.barycenter) * sol.gradient(k));
        area += g.area;
    }
    return sum / area;
}

double convection_average(const ProblemSpec& spec, const Point& Q, const MicroSolution& sol)
{
    double sum = 0.0;
    double area = 0.0;
    for (std::size_t k = 0; k < sol.mesh.num_elements(); ++k) {
        const ElementGeometry g = element_geometry(sol.mesh, k);
        sum += g.area * spec.eval_b(Q, g.barycenter).dot(sol.gradient(k));
        area += g.area;
    }
    return sum / area;
}

double window_average(const std::function<double(const Point&)>& phi, const Point& origin, double side,
                      std::size_t cells)
{
    HMMFV_REQUIRE(cells >= 1 && side > 0.0, "window_average needs a non-empty window");
    const TriMesh mesh = build_square_mesh(cells, origin, side);
    double sum = 0.0;
    double area = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const ElementGeometry g = element_geometry(mesh, k);
        sum += g.area * phi(g.barycenter);
        area += g.area;
    }
    return sum / area;
}

double average_reaction(const ProblemSpec& spec, const Point& Q, const MicroConfig& cfg)
{
    const MicroWindow w = micro_window(Q, cfg);
    return window_average([&](const Point& y) { return spec.eval_c(Q, y); }, w.origin, w.side, w.cells);
}

EffectiveData effective_data(const ProblemSpec& spec, const Point& Q, const MicroConfig& cfg)
{
    EffectiveData out;
    out.Q = Q;
    for (int j = 1; j <= 2; ++j) {
        const MicroSolution sol = solve_corrector(spec, Q, cfg, j);
        out.A_H.col(j - 1) = flux_average(spec, Q, sol);
        out.b_H[j - 1] = convection_average(spec, Q, sol);
        ++out.micro_solves;
    }
    out.c_H = average_reaction(spec, Q, cfg);
    return out;
}

HmmProviderResult hmm_provider(const TriMesh& mesh, const ProblemSpec& spec, const MicroConfig& cfg,
                               const HmmProviderOptions& options)
{
    validate(cfg);
    const std::size_t ne = mesh.num_elements();
    HmmProviderResult res;
    res.data.resize(ne);
    res.provider.provenance = Provenance::Hmm;
    res.provider.elements.resize(ne);

    auto barycenter = [&](std::size_t k) { return element_geometry(mesh, k).barycenter; };
    if (options.cache_effective && !spec.x_dependent && ne > 0) {
        const EffectiveData shared = effective_data(spec, barycenter(0), cfg);
        for (std::size_t k = 0; k < ne; ++k) {
            res.data[k] = shared;
            res.data[k].Q = barycenter(k);
            res.data[k].micro_solves = 0;
        }
        res.data[0].micro_solves = shared.micro_solves;
    } else {
        parallel_for(ne, options.threads, [&](std::size_t k) { res.data[k] = effective_data(spec, barycenter(k), cfg); });
    }
    for (std::size_t k = 0; k < ne; ++k) {
        res.provider.elements[k] = {res.data[k].A_H, res.data[k].b_H, res.data[k].c_H};
        res.micro_solves += res.data[k].micro_solves;
    }
    return res;
}

} // namespace hmmfv
