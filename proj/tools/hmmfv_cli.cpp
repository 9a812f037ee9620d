// Command-line driver for the HMM finite volume studies.
//
//   hmmfv_cli <solve|h-sweep|delta-sweep|lemmas|effective> [--config FILE]
//             [--out DIR] [--threads N] [--cache-effective]

#include "hmmfv/config.hpp"
#include "hmmfv/error.hpp"
#include "hmmfv/kernels/kernels.hpp"
#include "hmmfv/study.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

hmmfv::StudyConfig load(const std::string& path)
{
    if (path.empty()) {
        hmmfv::StudyConfig cfg;
        hmmfv::validate(cfg);
        return cfg;
    }
    return hmmfv::load_config(path);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Heterogeneous multiscale finite volume solver laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::size_t threads = 0;
    bool cache_effective = false;
    std::string simd;
    app.add_option("--config", config_path, "key = value study configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides the config's output key)");
    app.add_option("--threads", threads, "worker threads for micro solves")->check(CLI::PositiveNumber);
    app.add_flag("--cache-effective", cache_effective, "share one effective-data record for x-independent problems");
    app.add_option("--simd", simd, "kernel variant: scalar, avx2 or neon");

    auto* solve = app.add_subcommand("solve", "single HMM-FVM solve at the first resolution");
    bool dump_mesh = false;
    bool dump_matrix = false;
    solve->add_flag("--dump-mesh", dump_mesh, "also write mesh.txt");
    solve->add_flag("--dump-matrix", dump_matrix, "also write the assembled matrix to matrix.txt");
    auto* h_sweep = app.add_subcommand("h-sweep", "convergence in the coarse mesh size H");
    auto* delta_sweep = app.add_subcommand("delta-sweep", "e(HMM) and H1 error versus delta/epsilon");
    bool ehmm_only = false;
    delta_sweep->add_flag("--ehmm-only", ehmm_only, "skip macro solves and report the e(HMM) table only");
    auto* lemmas = app.add_subcommand("lemmas", "operator-gap, averaging, Pi* and quadrature diagnostics");
    auto* effective = app.add_subcommand("effective", "print the per-element effective coefficient table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!simd.empty() && !hmmfv::kernels::select(simd)) {
            std::cerr << "kernel variant '" << simd << "' is not available on this machine\n";
            return 2;
        }
        hmmfv::StudyConfig cfg = load(config_path);
        if (threads) cfg.threads = threads;
        if (cache_effective) cfg.cache_effective = true;
        const std::filesystem::path out = out_dir.empty() ? std::filesystem::path(cfg.output) : std::filesystem::path(out_dir);

        if (*effective) {
            const auto eff = hmmfv::run_effective(cfg);
            std::filesystem::create_directories(out);
            std::ofstream f(out / "effective.csv");
            hmmfv::write_effective_csv(f, eff);
            hmmfv::write_effective_csv(std::cout, eff);
            std::cerr << "micro solves: " << eff.micro_solves << '\n';
            return 0;
        }
        if (*solve) cfg.study = hmmfv::StudyKind::SingleSolve;
        if (*h_sweep) cfg.study = hmmfv::StudyKind::HSweep;
        if (*delta_sweep) cfg.study = ehmm_only ? hmmfv::StudyKind::EhmmTable : hmmfv::StudyKind::DeltaSweep;
        if (*lemmas) cfg.study = hmmfv::StudyKind::LemmaChecks;

        std::cout << hmmfv::run_study(cfg, out);

        if (*solve && (dump_mesh || dump_matrix)) {
            const auto entry = hmmfv::configured_problem(cfg);
            const auto mesh = hmmfv::build_unit_square_mesh(cfg.resolutions.front());
            if (dump_mesh) {
                std::ofstream f(out / "mesh.txt");
                hmmfv::write_mesh(f, mesh);
            }
            if (dump_matrix) {
                const auto eff = hmmfv::run_effective(cfg);
                std::ofstream f(out / "matrix.txt");
                hmmfv::write_matrix(f, hmmfv::assemble_fvm(mesh, eff.provider, entry.spec.f).system);
            }
        }
    } catch (const hmmfv::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
