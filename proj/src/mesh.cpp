#include "hmmfv/mesh.hpp"

#include "hmmfv/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace hmmfv {

namespace {

void check_element(const TriMesh& mesh, Index k)
{
    if (k >= mesh.num_elements())
        throw InvalidArgument("element index " + std::to_string(k) + " out of range (" +
                              std::to_string(mesh.num_elements()) + " elements)");
}

double max_edge_length(const std::vector<Point>& nodes, const std::vector<Triangle>& tris)
{
    double h = 0.0;
    for (const auto& t : tris)
        for (int e = 0; e < 3; ++e)
            h = std::max(h, (nodes[t[(e + 1) % 3]] - nodes[t[e]]).norm());
    return h;
}

} // namespace

TriMesh build_square_mesh(Index n, const Point& origin, double side)
{
    HMMFV_REQUIRE(n >= 1, "mesh needs at least one subdivision per side");
    HMMFV_REQUIRE(side > 0.0, "mesh side length must be positive");

    TriMesh mesh;
    mesh.cells_per_side = n;
    mesh.origin = origin;
    mesh.side = side;

    const Index np = n + 1;
    const double h = side / static_cast<double>(n);
    mesh.nodes.reserve(np * np);
    mesh.boundary.reserve(np * np);
    for (Index j = 0; j < np; ++j) {
        for (Index i = 0; i < np; ++i) {
            // Pin the last row/column to the exact far edge.
            const double x = (i == n) ? origin.x() + side : origin.x() + static_cast<double>(i) * h;
            const double y = (j == n) ? origin.y() + side : origin.y() + static_cast<double>(j) * h;
            mesh.nodes.emplace_back(x, y);
            mesh.boundary.push_back(i == 0 || j == 0 || i == n || j == n);
        }
    }

    mesh.triangles.reserve(2 * n * n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const Index v00 = j * np + i;
            const Index v10 = v00 + 1;
            const Index v01 = v00 + np;
            const Index v11 = v01 + 1;
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }
    mesh.H = max_edge_length(mesh.nodes, mesh.triangles);
    return mesh;
}

TriMesh build_unit_square_mesh(Index n)
{
    return build_square_mesh(n, Point(0.0, 0.0), 1.0);
}

TriMesh make_mesh(std::vector<Point> nodes, std::vector<Triangle> triangles)
{
    HMMFV_REQUIRE(!nodes.empty() && !triangles.empty(), "mesh needs nodes and triangles");
    TriMesh mesh;
    mesh.nodes = std::move(nodes);
    mesh.triangles = std::move(triangles);

    Point lo = mesh.nodes.front();
    Point hi = lo;
    for (const auto& p : mesh.nodes) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    for (const auto& p : mesh.nodes)
        mesh.boundary.push_back(p.x() == lo.x() || p.x() == hi.x() || p.y() == lo.y() ||
                                p.y() == hi.y());

    for (Index k = 0; k < mesh.num_elements(); ++k) {
        auto& t = mesh.triangles[k];
        for (Index v : t)
            HMMFV_REQUIRE(v < mesh.num_nodes(), "triangle references a missing node");
        const double a = signed_area(mesh, k);
        HMMFV_REQUIRE(a != 0.0, "degenerate triangle");
        if (a < 0.0) std::swap(t[1], t[2]);
    }
    mesh.origin = lo;
    mesh.side = std::max(hi.x() - lo.x(), hi.y() - lo.y());
    mesh.H = max_edge_length(mesh.nodes, mesh.triangles);
    return mesh;
}

double signed_area(const TriMesh& mesh, Index k)
{
    const auto& t = mesh.triangles[k];
    const Vec2 e1 = mesh.nodes[t[1]] - mesh.nodes[t[0]];
    const Vec2 e2 = mesh.nodes[t[2]] - mesh.nodes[t[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

ElementGeometry element_geometry(const TriMesh& mesh, Index k)
{
    check_element(mesh, k);
    const auto& t = mesh.triangles[k];
    const Point& a = mesh.nodes[t[0]];
    const Point& b = mesh.nodes[t[1]];
    const Point& c = mesh.nodes[t[2]];

    ElementGeometry g;
    g.area = std::abs(signed_area(mesh, k));
    g.barycenter = (a + b + c) / 3.0;
    g.edge_midpoints = {0.5 * (b + c), 0.5 * (c + a), 0.5 * (a + b)};
    return g;
}

DualGeometry dual_geometry(const TriMesh& mesh, Index k)
{
    const ElementGeometry g = element_geometry(mesh, k);
    const auto& t = mesh.triangles[k];

    DualGeometry d;
    for (int i = 0; i < 3; ++i) {
        const Point& p = mesh.nodes[t[i]];
        auto& region = d.regions[i];
        region.sub_area = g.area / 3.0;
        // The two edges at vertex i are opposite vertices i+2 and i+1.
        const std::array<Point, 2> mids = {g.edge_midpoints[(i + 2) % 3],
                                           g.edge_midpoints[(i + 1) % 3]};
        for (int s = 0; s < 2; ++s) {
            auto& seg = region.segments[s];
            seg.from = mids[s];
            seg.to = g.barycenter;
            const Vec2 dir = seg.to - seg.from;
            seg.length = dir.norm();
            Vec2 n(dir.y(), -dir.x());
            n /= seg.length;
            if (n.dot(p - seg.from) > 0.0) n = -n;
            seg.normal = n;
        }
    }
    return d;
}

double mesh_size(const TriMesh& mesh)
{
    HMMFV_REQUIRE(!mesh.triangles.empty(), "mesh_size of an empty mesh");
    return max_edge_length(mesh.nodes, mesh.triangles);
}

std::array<Vec2, 3> basis_gradients(const TriMesh& mesh, Index k)
{
    const auto& t = mesh.triangles[k];
    const double two_area = 2.0 * signed_area(mesh, k);
    std::array<Vec2, 3> grads;
    for (int i = 0; i < 3; ++i) {
        const Point& b = mesh.nodes[t[(i + 1) % 3]];
        const Point& c = mesh.nodes[t[(i + 2) % 3]];
        // Inward normal of the opposite edge, scaled by 1/(2|K|).
        grads[i] = Vec2(b.y() - c.y(), c.x() - b.x()) / two_area;
    }
    return grads;
}

std::array<double, 3> barycentric_coordinates(const TriMesh& mesh, Index k, const Point& x)
{
    const auto& t = mesh.triangles[k];
    const auto grads = basis_gradients(mesh, k);
    std::array<double, 3> lambda{};
    for (int i = 0; i < 3; ++i) {
        // lambda_i is affine, equal to 1 at vertex i and 0 at the others.
        const Point& ref = mesh.nodes[t[(i + 1) % 3]];
        lambda[i] = grads[i].dot(x - ref);
    }
    return lambda;
}

Index locate_element(const TriMesh& mesh, const Point& x)
{
    const double tol = 1e-12 * mesh.side;
    if (mesh.structured()) {
        const Vec2 s = (x - mesh.origin) / mesh.side;
        if (s.x() < -tol || s.y() < -tol || s.x() > 1.0 + tol || s.y() > 1.0 + tol)
            throw InvalidArgument("point lies outside the mesh domain");
        const auto n = static_cast<double>(mesh.cells_per_side);
        const double gx = std::clamp(s.x(), 0.0, 1.0) * n;
        const double gy = std::clamp(s.y(), 0.0, 1.0) * n;
        const auto last = static_cast<double>(mesh.cells_per_side - 1);
        const double ci = std::min(std::floor(gx), last);
        const double cj = std::min(std::floor(gy), last);
        const double xi = gx - ci;
        const double eta = gy - cj;
        const auto cell = static_cast<Index>(cj) * mesh.cells_per_side + static_cast<Index>(ci);
        return 2 * cell + (xi >= eta ? 0 : 1);
    }

    for (Index k = 0; k < mesh.num_elements(); ++k) {
        const auto l = barycentric_coordinates(mesh, k, x);
        if (l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12) return k;
    }
    throw InvalidArgument("point lies outside the mesh domain");
}

void write_mesh(std::ostream& os, const TriMesh& mesh)
{
    const auto old_prec = os.precision(17);
    for (Index i = 0; i < mesh.num_nodes(); ++i)
        os << mesh.nodes[i].x() << ' ' << mesh.nodes[i].y() << ' ' << (mesh.boundary[i] ? 1 : 0)
           << '\n';
    for (const auto& t : mesh.triangles)
        os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os.precision(old_prec);
}

} // namespace hmmfv
