#pragma once

#include "hmmfv/kernels/kernels.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace hmmfv {

using SparseIndex = kernels::SparseIndex;

/// Finalized square system in compressed-row layout. Column indices are
/// strictly increasing within each row.
struct SparseSystem {
    std::size_t dimension = 0;
    std::vector<SparseIndex> offsets; // dimension + 1
    std::vector<SparseIndex> columns;
    std::vector<double> values;
    std::vector<double> rhs;

    [[nodiscard]] kernels::CsrView view() const
    {
        return {dimension, offsets.data(), columns.data(), values.data()};
    }
    [[nodiscard]] std::size_t nonzeros() const { return values.size(); }
    /// Stored value at (row, col), 0 if the entry is structurally absent.
    [[nodiscard]] double at(std::size_t row, std::size_t col) const;
};

/// Accumulates (row, col, value) triplets; duplicates are summed on finalize.
class SparseBuilder {
public:
    explicit SparseBuilder(std::size_t dimension);

    void add_entry(std::size_t row, std::size_t col, double value);
    void add_rhs(std::size_t row, double value);
    void set_rhs(std::size_t row, double value);

    /// Replaces a row by the identity row with the given right-hand side.
    /// Entries already added to the row are discarded at finalize.
    void set_dirichlet_row(std::size_t row, double value);

    /// Merges another builder's contributions (parallel assembly).
    void merge(const SparseBuilder& other);

    [[nodiscard]] std::size_t dimension() const { return dimension_; }
    [[nodiscard]] bool finalized() const { return finalized_; }

    SparseSystem finalize();

private:
    struct Entry {
        SparseIndex row;
        SparseIndex col;
        double value;
    };

    void check_open() const;
    void check_index(std::size_t i) const;

    std::size_t dimension_;
    std::vector<Entry> entries_;
    std::vector<double> rhs_;
    std::vector<char> dirichlet_;
    bool finalized_ = false;
};

SparseBuilder assemble_begin(std::size_t dimension);

struct SolveReport {
    std::vector<double> solution;
    double relative_residual = 0.0;
    std::size_t iterations = 0; // 0 for direct solves
    std::string method;
};

enum class SolverStrategy { Automatic, Direct, Krylov };

struct SolveOptions {
    bool symmetric_hint = false;
    double rel_tol = 1e-10;
    SolverStrategy strategy = SolverStrategy::Automatic;
    std::size_t direct_limit = 100000;
    std::size_t restart = 60;
};

/// Solves A x = rhs and verifies ||A x - rhs|| / ||rhs|| <= rel_tol after the
/// fact. Throws SolverError on singular matrices, on exceeding the iteration
/// cap (10 * dimension) or on a failed residual check.
SolveReport solve(const SparseSystem& system, const SolveOptions& options);
SolveReport solve(const SparseSystem& system, bool symmetric_hint, double rel_tol = 1e-10);

double relative_residual(const SparseSystem& system, const std::vector<double>& x);

/// y = A x using the active kernel table.
std::vector<double> multiply(const SparseSystem& system, const std::vector<double>& x);

/// Dense copy; refuses dimensions above 4000.
Eigen::MatrixXd dense_form(const SparseSystem& system);

/// Coordinate text dump, one "row col value" line per stored entry.
void write_matrix(std::ostream& os, const SparseSystem& system);

} // namespace hmmfv
