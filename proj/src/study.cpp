#include "hmmfv/study.hpp"

#include "hmmfv/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace hmmfv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string fmt(const std::optional<double>& v)
{
    return v ? fmt(*v) : std::string();
}

std::string fixed(double v, int prec = 4)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
}

std::string opt_fixed(const std::optional<double>& v)
{
    return v ? fixed(*v, 3) : std::string("-");
}

struct ErrorReference {
    std::optional<AnalyticSolution> analytic;
    std::optional<ReferenceSolution> fine;
    std::string label;

    [[nodiscard]] ErrorNorms error(const CoarseSolution& u) const
    {
        return analytic ? h1_error(u, *analytic) : h1_error(u, *fine);
    }
};

ErrorReference make_reference(const StudyConfig& cfg, const CatalogEntry& entry, std::size_t finest_coarse)
{
    ErrorReference ref;
    if (entry.solution) {
        ref.analytic = entry.solution;
        ref.label = "analytic";
        return ref;
    }
    HMMFV_REQUIRE(cfg.n_fine >= 4 * finest_coarse, "config: n_fine must be at least 4x the finest coarse resolution");
    ref.fine = reference_solution(entry.spec, cfg.n_fine, cfg.cell_resolution(), cfg.threads);
    ref.label = "fine-fem(n_fine=" + std::to_string(cfg.n_fine) + ")";
    return ref;
}

} // namespace

double ehmm(const CoefficientProvider& hmm, const CoefficientProvider& homogenized)
{
    HMMFV_REQUIRE(hmm.size() == homogenized.size(), "e(HMM) needs providers on the same mesh");
    double e = 0.0;
    for (std::size_t k = 0; k < hmm.size(); ++k) {
        e = std::max(e, (hmm[k].A - homogenized[k].A).cwiseAbs().maxCoeff());
        e = std::max(e, (hmm[k].b - homogenized[k].b).cwiseAbs().maxCoeff());
        e = std::max(e, std::abs(hmm[k].c - homogenized[k].c));
    }
    return e;
}

std::optional<double> incremental_rate(double e_prev, double e, double p_prev, double p)
{
    if (!(e_prev > 0.0) || !(e > 0.0) || p_prev == p) return std::nullopt;
    return std::log(e_prev / e) / std::log(p / p_prev);
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) return std::nullopt;
    const auto n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

CatalogEntry configured_problem(const StudyConfig& cfg)
{
    CatalogEntry entry = catalog_entry(cfg.problem);
    entry.spec.epsilon = cfg.epsilon;
    if (cfg.source == "zero") {
        entry.spec.f = [](const Point&) { return 0.0; };
        entry.solution = AnalyticSolution{[](const Point&) { return 0.0; }, [](const Point&) { return Vec2(0.0, 0.0); }};
    }
    return entry;
}

SweepResult run_h_sweep(const StudyConfig& cfg)
{
    validate(cfg);
    const CatalogEntry entry = configured_problem(cfg);
    const ProblemSpec& spec = entry.spec;
    const MicroConfig micro = cfg.micro(cfg.delta_over_eps.front());
    validate(micro);

    SweepResult res;
    res.kind = StudyKind::HSweep;
    auto t0 = Clock::now();
    const ErrorReference ref = make_reference(cfg, entry, cfg.resolutions.back());
    res.reference_seconds = seconds_since(t0);
    res.error_reference = ref.label;

    std::vector<double> hs, errs;
    for (std::size_t n : cfg.resolutions) {
        const TriMesh mesh = build_unit_square_mesh(n);
        RateRow row;
        row.n = n;
        row.H = mesh.H;
        row.delta_over_eps = micro.ratio();

        t0 = Clock::now();
        const HmmProviderResult hmm = hmm_provider(mesh, spec, micro, {cfg.threads, cfg.cache_effective});
        row.micro_seconds = seconds_since(t0);
        row.micro_solves = hmm.micro_solves;

        t0 = Clock::now();
        const AssembledForm form = assemble_fvm(mesh, hmm.provider, spec.f);
        const CoarseSolution u = solve_macro(mesh, form);
        row.macro_seconds = seconds_since(t0);

        const ErrorNorms e = ref.error(u);
        row.l2 = e.l2;
        row.h1 = e.h1;
        row.ehmm = ehmm(hmm.provider, homogenized_provider(mesh, spec, cfg.cell_resolution(), cfg.threads));
        if (!res.rows.empty() && res.rows.back().h1)
            row.rate_h1 = incremental_rate(*res.rows.back().h1, e.h1, static_cast<double>(res.rows.back().n),
                                           static_cast<double>(n));
        hs.push_back(row.H);
        errs.push_back(e.h1);
        res.rows.push_back(row);
    }
    res.h1_slope = loglog_slope(hs, errs);
    return res;
}

SweepResult run_delta_sweep(const StudyConfig& cfg)
{
    validate(cfg);
    const CatalogEntry entry = configured_problem(cfg);
    const ProblemSpec& spec = entry.spec;
    const std::size_t n = cfg.resolutions.front();
    const TriMesh mesh = build_unit_square_mesh(n);
    const bool with_solves = cfg.study != StudyKind::EhmmTable;

    SweepResult res;
    res.kind = with_solves ? StudyKind::DeltaSweep : StudyKind::EhmmTable;
    auto t0 = Clock::now();
    std::optional<ErrorReference> ref;
    if (with_solves) {
        ref = make_reference(cfg, entry, n);
        res.error_reference = ref->label;
    }
    const CoefficientProvider hom = homogenized_provider(mesh, spec, cfg.cell_resolution(), cfg.threads);
    res.reference_seconds = seconds_since(t0);

    std::vector<double> ratios, ehmms, errs;
    for (double ratio : cfg.delta_over_eps) {
        const MicroConfig micro = cfg.micro(ratio);
        RateRow row;
        row.n = n;
        row.H = mesh.H;
        row.delta_over_eps = ratio;

        t0 = Clock::now();
        const HmmProviderResult hmm = hmm_provider(mesh, spec, micro, {cfg.threads, cfg.cache_effective});
        row.micro_seconds = seconds_since(t0);
        row.micro_solves = hmm.micro_solves;
        row.ehmm = ehmm(hmm.provider, hom);

        if (with_solves) {
            t0 = Clock::now();
            const CoarseSolution u = solve_macro(mesh, assemble_fvm(mesh, hmm.provider, spec.f));
            row.macro_seconds = seconds_since(t0);
            const ErrorNorms e = ref->error(u);
            row.l2 = e.l2;
            row.h1 = e.h1;
            if (!res.rows.empty() && res.rows.back().h1)
                row.rate_h1 = incremental_rate(*res.rows.back().h1, e.h1, res.rows.back().delta_over_eps, ratio);
            errs.push_back(e.h1);
        }
        ratios.push_back(ratio);
        ehmms.push_back(row.ehmm);
        res.rows.push_back(row);
    }
    res.ehmm_slope = loglog_slope(ratios, ehmms);
    if (with_solves) res.h1_slope = loglog_slope(ratios, errs);
    return res;
}

LemmaReport run_lemma_checks(const StudyConfig& cfg)
{
    validate(cfg);
    const CatalogEntry entry = configured_problem(cfg);
    const ProblemSpec& spec = entry.spec;
    const MicroConfig micro = cfg.micro(cfg.delta_over_eps.front());

    LemmaReport rep;
    std::vector<double> hs, e1, e3, e3t, tot;
    for (std::size_t n : cfg.resolutions) {
        if (n > 16) continue;
        const TriMesh mesh = build_unit_square_mesh(n);
        const HmmProviderResult hmm = hmm_provider(mesh, spec, micro, {cfg.threads, cfg.cache_effective});
        const CoefficientProvider hom = homogenized_provider(mesh, spec, cfg.cell_resolution(), cfg.threads);
        LemmaGapRow row{n, mesh.H, consistency_gaps(mesh, hmm.provider, hom)};
        hs.push_back(row.H);
        e1.push_back(row.gaps.eps1);
        e3.push_back(row.gaps.eps3);
        e3t.push_back(row.gaps.eps3_transfer);
        tot.push_back(row.gaps.total);
        rep.gaps.push_back(row);
    }
    HMMFV_REQUIRE(!rep.gaps.empty(), "lemma checks need at least one coarse resolution <= 16");
    rep.eps1_slope = loglog_slope(hs, e1);
    rep.eps3_slope = loglog_slope(hs, e3);
    rep.eps3_transfer_slope = loglog_slope(hs, e3t);
    rep.total_slope = loglog_slope(hs, tot);

    // Averaging error of sin(2 pi y1) over windows anchored at the origin.
    const auto phi = [](const Point& y) { return std::sin(2.0 * std::numbers::pi * y.x()); };
    std::vector<double> nonint_r, nonint_e;
    for (double r : {1.0, 1.5, 2.0, 2.5, 4.0, 4.5, 8.0, 8.5}) {
        const auto cells = static_cast<std::size_t>(std::round(r * static_cast<double>(cfg.cells_per_period)));
        const double err = std::abs(window_average(phi, Point(0.0, 0.0), r, cells));
        rep.averaging.push_back({r, err});
        if (r != std::floor(r)) {
            nonint_r.push_back(r);
            nonint_e.push_back(err);
        }
    }
    rep.averaging_slope = loglog_slope(nonint_r, nonint_e);

    for (std::size_t n : {4, 8, 16, 32}) {
        const TriMesh mesh = build_unit_square_mesh(n);
        const auto v = interpolate(mesh, [](const Point& x) { return x.x(); });
        const double deficit = pi_star_deficit(mesh, v);
        rep.deficits.push_back({n, mesh.H, deficit, deficit / (mesh.H * h1_seminorm(mesh, v))});
    }

    const TriMesh ref_tri = make_mesh({Point(0, 0), Point(1, 0), Point(0, 1)}, {{0, 1, 2}});
    const std::vector<std::pair<std::string, ScalarField>> battery = {
        {"1", [](const Point&) { return 1.0; }},
        {"x1", [](const Point& x) { return x.x(); }},
        {"x2", [](const Point& x) { return x.y(); }},
        {"x1+2x2-3", [](const Point& x) { return x.x() + 2.0 * x.y() - 3.0; }},
        {"x1^2", [](const Point& x) { return x.x() * x.x(); }},
        {"x1*x2", [](const Point& x) { return x.x() * x.y(); }},
        {"x2^2", [](const Point& x) { return x.y() * x.y(); }},
    };
    const TriMesh grid = build_unit_square_mesh(4);
    for (std::size_t i = 0; i < battery.size(); ++i) {
        rep.quadrature.push_back({battery[i].first, barycenter_quadrature_error(ref_tri, battery[i].second)[0]});
        if (i < 4)
            for (double e : barycenter_quadrature_error(grid, battery[i].second))
                rep.max_linear_quadrature_error = std::max(rep.max_linear_quadrature_error, std::abs(e));
    }
    return rep;
}

HmmProviderResult run_effective(const StudyConfig& cfg)
{
    validate(cfg);
    const CatalogEntry entry = configured_problem(cfg);
    const TriMesh mesh = build_unit_square_mesh(cfg.resolutions.front());
    return hmm_provider(mesh, entry.spec, cfg.micro(cfg.delta_over_eps.front()), {cfg.threads, cfg.cache_effective});
}

SingleSolveResult run_single_solve(const StudyConfig& cfg)
{
    validate(cfg);
    const CatalogEntry entry = configured_problem(cfg);
    const TriMesh mesh = build_unit_square_mesh(cfg.resolutions.front());

    SingleSolveResult res;
    auto t0 = Clock::now();
    res.effective =
        hmm_provider(mesh, entry.spec, cfg.micro(cfg.delta_over_eps.front()), {cfg.threads, cfg.cache_effective});
    res.micro_seconds = seconds_since(t0);

    t0 = Clock::now();
    const AssembledForm form = assemble_fvm(mesh, res.effective.provider, entry.spec.f);
    res.solution = solve_macro(mesh, form);
    res.relative_residual = relative_residual(form.system, res.solution.values);
    res.macro_seconds = seconds_since(t0);
    if (entry.solution) {
        res.error = h1_error(res.solution, *entry.solution);
        res.has_error = true;
    }
    return res;
}

void write_results_csv(std::ostream& os, const StudyConfig& cfg, const SweepResult& res)
{
    os << "study,problem,n,H,eps,delta_over_eps,bc_mode,l2,h1,rate_h1,ehmm\n";
    for (const auto& r : res.rows) {
        os << to_string(res.kind) << ',' << cfg.problem << ',' << r.n << ',' << fmt(r.H) << ',' << fmt(cfg.epsilon)
           << ',' << fmt(r.delta_over_eps) << ',' << to_string(cfg.bc_mode) << ',' << fmt(r.l2) << ','
           << fmt(r.h1) << ',' << fmt(r.rate_h1) << ',' << fmt(r.ehmm) << '\n';
    }
}

void write_timings_csv(std::ostream& os, const StudyConfig& cfg, const SweepResult& res)
{
    os << "study,problem,n,delta_over_eps,micro_solves,micro_seconds,macro_seconds,reference_seconds\n";
    for (const auto& r : res.rows)
        os << to_string(res.kind) << ',' << cfg.problem << ',' << r.n << ',' << fmt(r.delta_over_eps) << ','
           << r.micro_solves << ',' << fixed(r.micro_seconds, 6) << ',' << fixed(r.macro_seconds, 6) << ','
           << fixed(res.reference_seconds, 6) << '\n';
}

void write_rate_table(std::ostream& os, const StudyConfig& cfg, const SweepResult& res)
{
    os << to_string(res.kind) << "  problem=" << cfg.problem << "  eps=" << cfg.epsilon
       << "  bc_mode=" << to_string(cfg.bc_mode) << "  cells_per_period=" << cfg.cells_per_period << '\n';
    if (!res.error_reference.empty()) os << "error reference: " << res.error_reference << '\n';
    os << "     n            H   delta/eps          L2          H1   rate(H1)      e(HMM)\n";
    for (const auto& r : res.rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%6zu  %11.5e  %10.4g  %10s  %10s  %9s  %10s\n", r.n, r.H, r.delta_over_eps,
                      r.l2 ? sci(*r.l2).c_str() : "-", r.h1 ? sci(*r.h1).c_str() : "-",
                      opt_fixed(r.rate_h1).c_str(), sci(r.ehmm).c_str());
        os << line;
    }
    if (res.h1_slope) os << "least-squares H1 slope: " << fixed(*res.h1_slope, 3) << '\n';
    if (res.ehmm_slope) os << "least-squares e(HMM) slope vs delta/eps: " << fixed(*res.ehmm_slope, 3) << '\n';
}

void write_effective_csv(std::ostream& os, const HmmProviderResult& eff)
{
    os << "element,Qx,Qy,A11,A12,A21,A22,b1,b2,c\n";
    for (std::size_t k = 0; k < eff.data.size(); ++k) {
        const auto& d = eff.data[k];
        os << k << ',' << fmt(d.Q.x()) << ',' << fmt(d.Q.y()) << ',' << fmt(d.A_H(0, 0)) << ',' << fmt(d.A_H(0, 1))
           << ',' << fmt(d.A_H(1, 0)) << ',' << fmt(d.A_H(1, 1)) << ',' << fmt(d.b_H.x()) << ',' << fmt(d.b_H.y())
           << ',' << fmt(d.c_H) << '\n';
    }
}

void write_lemma_report(std::ostream& os, const LemmaReport& rep)
{
    os << "Operator gaps sup|(M1-M2)(u,v)|/(|u|_1 |v|_1), interior nodes\n";
    os << "     n            H        eps1        eps2        eps3  eps3(transfer)       total\n";
    for (const auto& r : rep.gaps) {
        char line[160];
        std::snprintf(line, sizeof line, "%6zu  %11.5e  %10.4e  %10.4e  %10.4e  %14.4e  %10.4e\n", r.n, r.H,
                      r.gaps.eps1, r.gaps.eps2, r.gaps.eps3, r.gaps.eps3_transfer, r.gaps.total);
        os << line;
    }
    os << "slopes vs H: eps1 " << opt_fixed(rep.eps1_slope) << ", eps3 " << opt_fixed(rep.eps3_slope)
       << ", eps3(transfer) " << opt_fixed(rep.eps3_transfer_slope) << ", total " << opt_fixed(rep.total_slope)
       << "\n\n";

    os << "Cell averaging error of sin(2 pi y1), window anchored at y = 0\n";
    for (const auto& a : rep.averaging) os << "  delta/eps = " << fixed(a.delta_over_eps, 1) << "  error = " << sci(a.error) << '\n';
    os << "slope over non-integer delta/eps: " << opt_fixed(rep.averaging_slope) << "\n\n";

    os << "Pi* deficit for v = I_H x1\n";
    for (const auto& d : rep.deficits)
        os << "  n = " << d.n << "  deficit = " << sci(d.deficit) << "  ratio = " << fixed(d.ratio, 6) << '\n';
    os << '\n';

    os << "Barycenter quadrature error E_K on the reference triangle\n";
    for (const auto& q : rep.quadrature) os << "  " << q.integrand << ": " << sci(q.value) << '\n';
    os << "max |E_K| for constants/linears on n=4 mesh: " << sci(rep.max_linear_quadrature_error) << '\n';
}

void write_lemma_csv(std::ostream& os, const LemmaReport& rep)
{
    os << "quantity,parameter,value\n";
    for (const auto& r : rep.gaps) {
        os << "eps1," << r.n << ',' << fmt(r.gaps.eps1) << '\n';
        os << "eps2," << r.n << ',' << fmt(r.gaps.eps2) << '\n';
        os << "eps3," << r.n << ',' << fmt(r.gaps.eps3) << '\n';
        os << "eps3_transfer," << r.n << ',' << fmt(r.gaps.eps3_transfer) << '\n';
        os << "total," << r.n << ',' << fmt(r.gaps.total) << '\n';
    }
    for (const auto& a : rep.averaging) os << "averaging_error," << fmt(a.delta_over_eps) << ',' << fmt(a.error) << '\n';
    for (const auto& d : rep.deficits) os << "pi_star_ratio," << d.n << ',' << fmt(d.ratio) << '\n';
    for (const auto& q : rep.quadrature) os << "E_K," << q.integrand << ',' << fmt(q.value) << '\n';
}

std::string run_study(const StudyConfig& cfg, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    auto open = [&](const std::string& name) {
        std::ofstream f(out_dir / name);
        if (!f) throw InvalidArgument("cannot write " + (out_dir / name).string());
        return f;
    };
    std::ostringstream summary;

    switch (cfg.study) {
    case StudyKind::HSweep:
    case StudyKind::DeltaSweep:
    case StudyKind::EhmmTable: {
        const SweepResult res = cfg.study == StudyKind::HSweep ? run_h_sweep(cfg) : run_delta_sweep(cfg);
        auto results = open("results.csv");
        write_results_csv(results, cfg, res);
        auto timings = open("timings.csv");
        write_timings_csv(timings, cfg, res);
        write_rate_table(summary, cfg, res);
        auto table = open("rates.txt");
        table << summary.str();
        break;
    }
    case StudyKind::LemmaChecks: {
        const LemmaReport rep = run_lemma_checks(cfg);
        write_lemma_report(summary, rep);
        auto txt = open("lemmas.txt");
        txt << summary.str();
        auto csv = open("lemmas.csv");
        write_lemma_csv(csv, rep);
        break;
    }
    case StudyKind::SingleSolve: {
        const SingleSolveResult res = run_single_solve(cfg);
        const std::size_t n = cfg.resolutions.front();
        auto sol = open("solution_n" + std::to_string(n) + ".txt");
        write_solution(sol, res.solution);
        auto eff = open("effective.csv");
        write_effective_csv(eff, res.effective);
        auto timings = open("timings.csv");
        timings << "study,problem,n,micro_solves,micro_seconds,macro_seconds\n"
                << "single_solve," << cfg.problem << ',' << n << ',' << res.effective.micro_solves << ','
                << fixed(res.micro_seconds, 6) << ',' << fixed(res.macro_seconds, 6) << '\n';

        double boundary_max = 0.0;
        for (std::size_t i = 0; i < res.solution.mesh.num_nodes(); ++i)
            if (res.solution.mesh.boundary[i]) boundary_max = std::max(boundary_max, std::abs(res.solution.values[i]));
        summary << "single_solve  problem=" << cfg.problem << "  n=" << n << "  elements="
                << res.solution.mesh.num_elements() << '\n'
                << "micro solves: " << res.effective.micro_solves << '\n'
                << "relative residual: " << sci(res.relative_residual) << '\n'
                << "max |u| on boundary: " << sci(boundary_max) << '\n';
        if (res.has_error)
            summary << "error vs analytic: L2 " << sci(res.error.l2) << "  H1 " << sci(res.error.h1) << '\n';
        summary << "time: micro " << fixed(res.micro_seconds, 3) << " s, macro " << fixed(res.macro_seconds, 3)
                << " s\n";
        auto txt = open("summary.txt");
        txt << summary.str();
        break;
    }
    }
    return summary.str();
}

} // namespace hmmfv
