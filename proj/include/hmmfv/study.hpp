#pragma once

#include "hmmfv/config.hpp"
#include "hmmfv/homogenization.hpp"
#include "hmmfv/macro.hpp"
#include "hmmfv/micro.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hmmfv {

/// One line of a convergence table. `parameter` is n (h sweeps) or
/// delta/epsilon (delta sweeps); rates compare with the previous row.
struct RateRow {
    std::size_t n = 0;
    double H = 0.0;
    double delta_over_eps = 0.0;
    std::optional<double> l2;
    std::optional<double> h1;
    std::optional<double> rate_h1;
    double ehmm = 0.0;
    std::size_t micro_solves = 0;
    double micro_seconds = 0.0;
    double macro_seconds = 0.0;
};

struct SweepResult {
    StudyKind kind = StudyKind::HSweep;
    std::vector<RateRow> rows;
    std::optional<double> h1_slope;   // least-squares slope of log h1 vs log parameter
    std::optional<double> ehmm_slope; // least-squares slope of log e(HMM) vs log(delta/eps)
    double reference_seconds = 0.0;
    std::string error_reference; // "analytic" or "fine-fem(n_fine=...)"
};

/// e(HMM): largest deviation over elements and components between HMM and
/// homogenized data.
double ehmm(const CoefficientProvider& hmm, const CoefficientProvider& homogenized);

/// Incremental rate log(e_prev / e) / log(p / p_prev); empty when either error is 0.
std::optional<double> incremental_rate(double e_prev, double e, double p_prev, double p);

/// Least-squares slope of log(y) against log(x); empty with fewer than two
/// positive points.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Catalog problem with the config's epsilon and source applied.
CatalogEntry configured_problem(const StudyConfig& cfg);

SweepResult run_h_sweep(const StudyConfig& cfg);
SweepResult run_delta_sweep(const StudyConfig& cfg);

struct LemmaGapRow {
    std::size_t n = 0;
    double H = 0.0;
    ConsistencyGaps gaps;
};

struct AveragingRow {
    double delta_over_eps = 0.0;
    double error = 0.0;
};

struct DeficitRow {
    std::size_t n = 0;
    double H = 0.0;
    double deficit = 0.0;
    double ratio = 0.0; // deficit / (H |v|_1)
};

struct QuadratureRow {
    std::string integrand;
    double value = 0.0; // E_K on the reference triangle
};

struct LemmaReport {
    std::vector<LemmaGapRow> gaps;
    std::optional<double> eps1_slope, eps3_slope, eps3_transfer_slope, total_slope;
    std::vector<AveragingRow> averaging;
    std::optional<double> averaging_slope; // over the non-integer delta/eps rows
    std::vector<DeficitRow> deficits;
    std::vector<QuadratureRow> quadrature;
    double max_linear_quadrature_error = 0.0; // over mesh elements, constants and linears
};

LemmaReport run_lemma_checks(const StudyConfig& cfg);

struct SingleSolveResult {
    CoarseSolution solution;
    HmmProviderResult effective;
    double relative_residual = 0.0;
    ErrorNorms error; // against the analytic solution when the catalog has one, else zero
    bool has_error = false;
    double micro_seconds = 0.0;
    double macro_seconds = 0.0;
};

/// Uses the first resolution and the first delta/eps value of the config.
SingleSolveResult run_single_solve(const StudyConfig& cfg);
HmmProviderResult run_effective(const StudyConfig& cfg);

// Writers. CSV layouts are fixed; doubles use %.12e.
void write_results_csv(std::ostream& os, const StudyConfig& cfg, const SweepResult& res);
void write_timings_csv(std::ostream& os, const StudyConfig& cfg, const SweepResult& res);
void write_rate_table(std::ostream& os, const StudyConfig& cfg, const SweepResult& res);
void write_effective_csv(std::ostream& os, const HmmProviderResult& eff);
void write_lemma_report(std::ostream& os, const LemmaReport& rep);
void write_lemma_csv(std::ostream& os, const LemmaReport& rep);

/// Runs the config's study and writes every artifact into `out_dir`; returns
/// a human-readable summary.
std::string run_study(const StudyConfig& cfg, const std::filesystem::path& out_dir);

} // namespace hmmfv
