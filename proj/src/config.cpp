#include "hmmfv/config.hpp"

#include "hmmfv/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace hmmfv {

std::string_view to_string(StudyKind k)
{
    switch (k) {
    case StudyKind::HSweep: return "h_sweep";
    case StudyKind::DeltaSweep: return "delta_sweep";
    case StudyKind::EhmmTable: return "ehmm_table";
    case StudyKind::LemmaChecks: return "lemma_checks";
    case StudyKind::SingleSolve: return "single_solve";
    }
    return "?";
}

StudyKind parse_study_kind(std::string_view s)
{
    for (auto k : {StudyKind::HSweep, StudyKind::DeltaSweep, StudyKind::EhmmTable, StudyKind::LemmaChecks,
                   StudyKind::SingleSolve})
        if (s == to_string(k)) return k;
    throw InvalidArgument("unknown study kind '" + std::string(s) + "'");
}

MicroConfig StudyConfig::micro(double ratio) const
{
    MicroConfig m;
    m.epsilon = epsilon;
    m.delta = ratio * epsilon;
    m.cells_per_period = cells_per_period;
    m.bc_mode = bc_mode;
    return m;
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v)
{
    double d = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw InvalidArgument("config: '" + key + "' expects a number, got '" + v + "'");
    return d;
}

std::size_t to_count(const std::string& key, const std::string& v)
{
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw InvalidArgument("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
    return n;
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidArgument("config: '" + key + "' expects true/false, got '" + v + "'");
}

} // namespace

StudyConfig parse_config(std::istream& in)
{
    StudyConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));

        if (key == "problem") {
            cfg.problem = value;
        } else if (key == "epsilon") {
            cfg.epsilon = to_double(key, value);
        } else if (key == "delta_over_eps") {
            cfg.delta_over_eps.clear();
            for (const auto& s : split_list(value)) cfg.delta_over_eps.push_back(to_double(key, s));
        } else if (key == "cells_per_period") {
            cfg.cells_per_period = to_count(key, value);
        } else if (key == "bc_mode") {
            cfg.bc_mode = parse_boundary_mode(value);
        } else if (key == "resolutions") {
            cfg.resolutions.clear();
            for (const auto& s : split_list(value)) cfg.resolutions.push_back(to_count(key, s));
        } else if (key == "n_fine") {
            cfg.n_fine = to_count(key, value);
        } else if (key == "n_cell") {
            cfg.n_cell = to_count(key, value);
        } else if (key == "source") {
            cfg.source = value;
        } else if (key == "study") {
            cfg.study = parse_study_kind(value);
        } else if (key == "output") {
            cfg.output = value;
        } else if (key == "threads") {
            cfg.threads = to_count(key, value);
        } else if (key == "cache_effective") {
            cfg.cache_effective = to_bool(key, value);
        } else {
            throw InvalidArgument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    validate(cfg);
    return cfg;
}

StudyConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
    return parse_config(in);
}

void validate(const StudyConfig& cfg)
{
    HMMFV_REQUIRE(cfg.epsilon > 0.0, "config: epsilon must be positive");
    HMMFV_REQUIRE(!cfg.resolutions.empty(), "config: resolutions must not be empty");
    HMMFV_REQUIRE(cfg.resolutions.front() >= 1, "config: resolutions must be positive");
    for (std::size_t i = 1; i < cfg.resolutions.size(); ++i)
        HMMFV_REQUIRE(cfg.resolutions[i] > cfg.resolutions[i - 1], "config: resolutions must be strictly increasing");
    HMMFV_REQUIRE(cfg.n_fine >= 1, "config: n_fine must be positive");
    for (std::size_t n : cfg.resolutions)
        HMMFV_REQUIRE(cfg.n_fine % n == 0, "config: n_fine must be a multiple of every resolution");
    HMMFV_REQUIRE(!cfg.delta_over_eps.empty(), "config: delta_over_eps must not be empty");
    for (double r : cfg.delta_over_eps) HMMFV_REQUIRE(r > 0.0, "config: delta_over_eps values must be positive");
    HMMFV_REQUIRE(cfg.cells_per_period >= 4, "config: cells_per_period must be at least 4");
    HMMFV_REQUIRE(cfg.source == "default" || cfg.source == "zero", "config: source must be 'default' or 'zero'");
    HMMFV_REQUIRE(cfg.threads >= 1, "config: threads must be at least 1");
}

} // namespace hmmfv
