#pragma once

#include "hmmfv/coefficients.hpp"
#include "hmmfv/mesh.hpp"
#include "hmmfv/provider.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace hmmfv {

enum class BoundaryMode { Dirichlet, Periodic };

std::string_view to_string(BoundaryMode m);
BoundaryMode parse_boundary_mode(std::string_view s);

struct MicroConfig {
    double delta = 1e-2;
    double epsilon = 1e-2;
    std::size_t cells_per_period = 16;
    BoundaryMode bc_mode = BoundaryMode::Dirichlet;

    [[nodiscard]] double ratio() const { return delta / epsilon; }
};

/// Throws InvalidArgument unless delta, epsilon > 0, cells_per_period >= 4 and,
/// in periodic mode, delta/epsilon is a positive integer.
void validate(const MicroConfig& cfg);

/// Sampling cube K_delta(Q) in rescaled coordinates y = x/epsilon.
///
/// The lower-left corner is snapped to the micro grid (multiples of
/// 1/cells_per_period) and reduced modulo the unit cell, so every micro
/// element sees whole grid cells of the periodic structure.
struct MicroWindow {
    Point origin;
    double side = 1.0;     // delta / epsilon
    std::size_t cells = 1; // micro cells per side
};

MicroWindow micro_window(const Point& Q, const MicroConfig& cfg);

/// Lifted cell solution R for linear boundary data y -> slope . y.
struct MicroSolution {
    TriMesh mesh; // rescaled coordinates
    std::vector<double> values;
    Vec2 slope = Vec2::Zero();
    BoundaryMode bc_mode = BoundaryMode::Dirichlet;
    double relative_residual = 0.0;

    /// Constant gradient of R on micro element k.
    [[nodiscard]] Vec2 gradient(std::size_t k) const;
};

struct EffectiveData {
    Mat2 A_H = Mat2::Zero();
    Vec2 b_H = Vec2::Zero();
    double c_H = 0.0;
    Point Q = Point::Zero();
    std::size_t micro_solves = 0;
};

/// Cell problem -div(a(Q, y) grad R) = 0 on the window with R = slope . y on
/// the boundary (Dirichlet) or R - slope . y periodic with zero mean.
MicroSolution solve_cell(const ProblemSpec& spec, const Point& Q, const MicroConfig& cfg, const Vec2& slope);

/// solve_cell for the coordinate data y_j, j in {1, 2}.
MicroSolution solve_corrector(const ProblemSpec& spec, const Point& Q, const MicroConfig& cfg, int j);

/// Window averages of a(Q, y) grad R and b(Q, y) . grad R.
Vec2 flux_average(const ProblemSpec& spec, const Point& Q, const MicroSolution& sol);
double convection_average(const ProblemSpec& spec, const Point& Q, const MicroSolution& sol);

EffectiveData effective_data(const ProblemSpec& spec, const Point& Q, const MicroConfig& cfg);

/// Centroid-rule average of c(Q, y) over the window; no cell problem.
double average_reaction(const ProblemSpec& spec, const Point& Q, const MicroConfig& cfg);

/// Centroid-rule average of phi over the square [origin, origin + side]^2
/// resolved with `cells` micro cells per side.
double window_average(const std::function<double(const Point&)>& phi, const Point& origin, double side,
                      std::size_t cells);

struct HmmProviderOptions {
    std::size_t threads = 1;
    /// Reuse the data of the first element for all elements; only honoured
    /// for x-independent problems.
    bool cache_effective = false;
};

struct HmmProviderResult {
    CoefficientProvider provider;
    std::vector<EffectiveData> data; // per element
    std::size_t micro_solves = 0;
};

HmmProviderResult hmm_provider(const TriMesh& mesh, const ProblemSpec& spec, const MicroConfig& cfg,
                               const HmmProviderOptions& options = {});

} // namespace hmmfv
