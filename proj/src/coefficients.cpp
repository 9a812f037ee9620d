#include "hmmfv/coefficients.hpp"

#include "hmmfv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hmmfv {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;

double unit_source(const Point&) { return 1.0; }

CatalogEntry make_constant()
{
    CatalogEntry e;
    auto& s = e.spec;
    s.name = "constant";
    s.a = [](const Point&, const Point&) { return Mat2::Identity().eval(); };
    s.b = [](const Point&, const Point&) { return Vec2(1.0, 0.0); };
    s.c = [](const Point&, const Point&) { return 1.0; };
    s.f = unit_source;
    s.lambda = 1.0;
    s.Lambda = 1.0;
    e.homogenized = AnalyticHomogenized{
        [](const Point&) { return Mat2::Identity().eval(); },
        [](const Point&) { return Vec2(1.0, 0.0); },
        [](const Point&) { return 1.0; },
    };
    return e;
}

CatalogEntry make_smooth_periodic()
{
    CatalogEntry e;
    auto& s = e.spec;
    s.name = "smooth-periodic";
    s.a = [](const Point&, const Point& y) {
        return ((2.0 + std::sin(two_pi * y.x())) * Mat2::Identity()).eval();
    };
    s.b = [](const Point&, const Point& y) {
        return Vec2(1.0 + 0.5 * std::cos(two_pi * y.y()), 0.0);
    };
    s.c = [](const Point&, const Point& y) { return 2.0 + std::cos(two_pi * y.x()); };
    s.f = unit_source;
    s.lambda = 1.0;
    s.Lambda = 3.0;
    // Harmonic mean of 2 + sin across the layers, arithmetic mean along them.
    e.homogenized = AnalyticHomogenized{
        [](const Point&) {
            Mat2 m = Mat2::Zero();
            m(0, 0) = std::sqrt(3.0);
            m(1, 1) = 2.0;
            return m;
        },
        [](const Point&) { return Vec2(1.0, 0.0); },
        [](const Point&) { return 2.0; },
    };
    return e;
}

double laminate_alpha(double y1)
{
    const double t = y1 - std::floor(y1);
    return t < 0.5 ? 1.0 : 4.0;
}

CatalogEntry make_laminate()
{
    CatalogEntry e;
    auto& s = e.spec;
    s.name = "laminate";
    s.a = [](const Point&, const Point& y) { return (laminate_alpha(y.x()) * Mat2::Identity()).eval(); };
    s.b = [](const Point&, const Point&) { return Vec2(0.0, 0.0); };
    s.c = [](const Point&, const Point&) { return 0.0; };
    s.f = unit_source;
    s.lambda = 1.0;
    s.Lambda = 4.0;
    e.homogenized = AnalyticHomogenized{
        [](const Point&) {
            Mat2 m = Mat2::Zero();
            m(0, 0) = 1.6;
            m(1, 1) = 2.5;
            return m;
        },
        [](const Point&) { return Vec2(0.0, 0.0); },
        [](const Point&) { return 0.0; },
    };
    return e;
}

CatalogEntry make_manufactured()
{
    CatalogEntry e;
    auto& s = e.spec;
    s.name = "manufactured";
    s.a = [](const Point&, const Point&) { return Mat2::Identity().eval(); };
    s.b = [](const Point&, const Point&) { return Vec2(0.0, 0.0); };
    s.c = [](const Point&, const Point&) { return 0.0; };
    s.f = [](const Point& x) {
        return 2.0 * pi * pi * std::sin(pi * x.x()) * std::sin(pi * x.y());
    };
    s.lambda = 1.0;
    s.Lambda = 1.0;
    e.homogenized = AnalyticHomogenized{
        [](const Point&) { return Mat2::Identity().eval(); },
        [](const Point&) { return Vec2(0.0, 0.0); },
        [](const Point&) { return 0.0; },
    };
    e.solution = AnalyticSolution{
        [](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); },
        [](const Point& x) {
            return Vec2(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()),
                        pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
        },
    };
    return e;
}

// smooth-periodic with a macro modulation (1 + x1) of the diffusion and a
// macro-varying reaction; the only catalog entry with x-dependent a0.
CatalogEntry make_modulated()
{
    CatalogEntry e;
    auto& s = e.spec;
    s.name = "modulated";
    s.a = [](const Point& x, const Point& y) {
        return ((1.0 + x.x()) * (2.0 + std::sin(two_pi * y.x())) * Mat2::Identity()).eval();
    };
    s.b = [](const Point& x, const Point& y) {
        return Vec2(1.0 + 0.5 * std::cos(two_pi * y.y()), x.y());
    };
    s.c = [](const Point& x, const Point& y) { return 1.0 + x.y() + 0.5 * std::cos(two_pi * y.x()); };
    s.f = unit_source;
    s.lambda = 1.0;
    s.Lambda = 6.0;
    s.x_dependent = true;
    e.homogenized = AnalyticHomogenized{
        [](const Point& x) {
            Mat2 m = Mat2::Zero();
            m(0, 0) = (1.0 + x.x()) * std::sqrt(3.0);
            m(1, 1) = (1.0 + x.x()) * 2.0;
            return m;
        },
        [](const Point& x) { return Vec2(1.0, x.y()); },
        [](const Point& x) { return 1.0 + x.y(); },
    };
    return e;
}

} // namespace

std::vector<std::string> catalog_names()
{
    return {"constant", "smooth-periodic", "laminate", "manufactured", "modulated"};
}

CatalogEntry catalog_entry(const std::string& name)
{
    if (name == "constant") return make_constant();
    if (name == "smooth-periodic") return make_smooth_periodic();
    if (name == "laminate") return make_laminate();
    if (name == "manufactured") return make_manufactured();
    if (name == "modulated") return make_modulated();
    throw InvalidArgument("unknown problem '" + name + "'");
}

ProblemSpec catalog_get(const std::string& name)
{
    return catalog_entry(name).spec;
}

PeriodicityReport periodicity_check(const ProblemSpec& spec, std::size_t samples)
{
    HMMFV_REQUIRE(samples >= 1, "periodicity_check needs at least one sample");
    constexpr double tol = 1e-12;

    std::mt19937_64 rng(0x5eed1234ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> cell(-3.0, 3.0);
    std::uniform_int_distribution<int> shift(-2, 2);

    PeriodicityReport report;
    report.samples = samples;
    for (std::size_t s = 0; s < samples; ++s) {
        const Point x(unit(rng), unit(rng));
        const Point y(cell(rng), cell(rng));
        const Vec2 e(shift(rng), shift(rng));
        const Point ys = y + (e.isZero() ? Vec2(1.0, 0.0) : e);

        const double da = (spec.eval_a(x, y) - spec.eval_a(x, ys)).cwiseAbs().maxCoeff();
        const double db = (spec.eval_b(x, y) - spec.eval_b(x, ys)).cwiseAbs().maxCoeff();
        const double dc = std::abs(spec.eval_c(x, y) - spec.eval_c(x, ys));
        report.max_deviation = std::max({report.max_deviation, da, db, dc});
    }
    report.passed = report.max_deviation <= tol;
    return report;
}

} // namespace hmmfv
