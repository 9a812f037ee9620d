#pragma once

#include "hmmfv/types.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace hmmfv {

/// Conforming triangulation of an axis-aligned square.
///
/// Meshes produced by build_square_mesh are structured: cell (i, j) of the
/// n x n grid holds triangles 2*(j*n + i) (below the lower-left to upper-right
/// diagonal) and 2*(j*n + i) + 1 (above it). That layout is what makes point
/// location closed-form; meshes built with make_mesh fall back to a scan.
struct TriMesh {
    std::vector<Point> nodes;
    std::vector<Triangle> triangles; // counterclockwise
    std::vector<bool> boundary;      // node lies on the bounding square
    double H = 0.0;                  // largest edge length

    Index cells_per_side = 0; // 0 for unstructured meshes
    Point origin = Point::Zero();
    double side = 1.0;

    [[nodiscard]] Index num_nodes() const { return nodes.size(); }
    [[nodiscard]] Index num_elements() const { return triangles.size(); }
    [[nodiscard]] bool structured() const { return cells_per_side > 0; }
};

struct ElementGeometry {
    double area = 0.0;
    Point barycenter;
    /// edge_midpoints[e] is the midpoint of the edge opposite local vertex e.
    std::array<Point, 3> edge_midpoints;
};

/// Straight piece of the dual-region boundary inside an element, running from
/// an edge midpoint to the barycenter.
struct DualSegment {
    Point from;
    Point to;
    double length = 0.0;
    Vec2 normal; // unit, outward from the owning dual region
};

struct DualRegion {
    double sub_area = 0.0; // |K ∩ K*_P|
    std::array<DualSegment, 2> segments;
};

/// Barycentric-dual pieces of one element, indexed by local vertex.
struct DualGeometry {
    std::array<DualRegion, 3> regions;
};

TriMesh build_square_mesh(Index n, const Point& origin, double side);
TriMesh build_unit_square_mesh(Index n);

/// Wraps arbitrary nodes/triangles; triangles are reoriented counterclockwise
/// and boundary flags mark nodes on the bounding box.
TriMesh make_mesh(std::vector<Point> nodes, std::vector<Triangle> triangles);

ElementGeometry element_geometry(const TriMesh& mesh, Index k);
DualGeometry dual_geometry(const TriMesh& mesh, Index k);
double mesh_size(const TriMesh& mesh);

/// Signed area of the element; positive for counterclockwise ordering.
double signed_area(const TriMesh& mesh, Index k);

/// Gradients of the three P1 basis functions on element k.
std::array<Vec2, 3> basis_gradients(const TriMesh& mesh, Index k);

std::array<double, 3> barycentric_coordinates(const TriMesh& mesh, Index k, const Point& x);

/// Element containing x (closed-form on structured meshes). Points on shared
/// edges resolve to one of the incident elements. Throws for points outside.
Index locate_element(const TriMesh& mesh, const Point& x);

/// Plain-text dump: "x y boundary_flag" per node, then "i j k" per triangle.
void write_mesh(std::ostream& os, const TriMesh& mesh);

} // namespace hmmfv
