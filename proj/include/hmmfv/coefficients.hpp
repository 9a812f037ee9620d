#pragma once

#include "hmmfv/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hmmfv {

/// Locally periodic coefficients a(x, y), b(x, y), c(x, y) with y = x/eps,
/// 1-periodic in each component of y, plus a macro source f(x).
///
/// Evaluators must be pure and safe to call concurrently.
struct ProblemSpec {
    std::string name;
    std::function<Mat2(const Point& x, const Point& y)> a;
    std::function<Vec2(const Point& x, const Point& y)> b;
    std::function<double(const Point& x, const Point& y)> c;
    std::function<double(const Point& x)> f;
    double epsilon = 1e-2;
    double lambda = 1.0; // ellipticity lower bound
    double Lambda = 1.0; // ellipticity upper bound
    bool x_dependent = false;

    [[nodiscard]] Mat2 eval_a(const Point& x, const Point& y) const { return a(x, y); }
    [[nodiscard]] Vec2 eval_b(const Point& x, const Point& y) const { return b(x, y); }
    [[nodiscard]] double eval_c(const Point& x, const Point& y) const { return c(x, y); }
    [[nodiscard]] double eval_f(const Point& x) const { return f(x); }
};

/// Closed-form homogenized data, where it is known.
struct AnalyticHomogenized {
    std::function<Mat2(const Point& x)> a0;
    std::function<Vec2(const Point& x)> b0;
    std::function<double(const Point& x)> c0;
};

/// Exact macro solution u(x) together with its gradient.
struct AnalyticSolution {
    std::function<double(const Point& x)> u;
    std::function<Vec2(const Point& x)> grad;
};

struct CatalogEntry {
    ProblemSpec spec;
    std::optional<AnalyticHomogenized> homogenized;
    std::optional<AnalyticSolution> solution;
};

/// Names accepted by catalog_get.
std::vector<std::string> catalog_names();

/// Built-in problem by name ("constant", "smooth-periodic", "laminate",
/// "manufactured", "modulated"). Throws InvalidArgument for unknown names.
CatalogEntry catalog_entry(const std::string& name);
ProblemSpec catalog_get(const std::string& name);

struct PeriodicityReport {
    bool passed = true;
    std::size_t samples = 0;
    double max_deviation = 0.0;
};

/// Samples random (x, y) pairs from a fixed seed and compares a, b, c against
/// their unit shifts in y, with absolute tolerance 1e-12.
PeriodicityReport periodicity_check(const ProblemSpec& spec, std::size_t samples);

} // namespace hmmfv
