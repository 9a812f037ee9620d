#pragma once

#include "hmmfv/micro.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace hmmfv {

enum class StudyKind { HSweep, DeltaSweep, EhmmTable, LemmaChecks, SingleSolve };

std::string_view to_string(StudyKind k);
StudyKind parse_study_kind(std::string_view s);

/// Flat `key = value` experiment description; lists are comma-separated and
/// `#` starts a comment.
///
///   problem          catalog name                      (smooth-periodic)
///   epsilon          scale ratio                        (0.01)
///   delta_over_eps   list of delta/epsilon values       (1)
///   cells_per_period micro resolution per period        (16)
///   bc_mode          dirichlet | periodic               (periodic)
///   resolutions      strictly increasing coarse n list  (4, 8, 16, 32)
///   n_fine           reference resolution               (128)
///   n_cell           unit-cell resolution for a0        (cells_per_period)
///   source           default | zero                     (default)
///   study            h_sweep | delta_sweep | ehmm_table | lemma_checks | single_solve
///   output           output directory                   (out)
///   threads          worker count                       (1)
///   cache_effective  true | false                       (false)
struct StudyConfig {
    std::string problem = "smooth-periodic";
    double epsilon = 0.01;
    std::vector<double> delta_over_eps{1.0};
    std::size_t cells_per_period = 16;
    BoundaryMode bc_mode = BoundaryMode::Periodic;
    std::vector<std::size_t> resolutions{4, 8, 16, 32};
    std::size_t n_fine = 128;
    std::size_t n_cell = 0; // 0: follow cells_per_period
    std::string source = "default";
    StudyKind study = StudyKind::HSweep;
    std::string output = "out";
    std::size_t threads = 1;
    bool cache_effective = false;

    [[nodiscard]] std::size_t cell_resolution() const { return n_cell ? n_cell : cells_per_period; }
    [[nodiscard]] MicroConfig micro(double ratio) const;
};

StudyConfig parse_config(std::istream& in);
StudyConfig load_config(const std::string& path);

/// Throws InvalidArgument when an invariant is broken: resolutions strictly
/// increasing, n_fine a multiple of every resolution, delta/eps positive.
void validate(const StudyConfig& cfg);

} // namespace hmmfv
