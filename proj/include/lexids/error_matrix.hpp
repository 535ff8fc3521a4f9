#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lexids {

// Immutable population of N individuals evaluated on T training cases.
// Cell (i, c) holds individual i's non-negative error on case c; a case is
// solved when the error is <= the solve threshold (0 by default).
//
// Alongside the raw errors the matrix keeps packed solve bits per row and
// per column, and assigns every row a class id shared by rows with equal
// error vectors. restrict_rows() shares the underlying storage with its
// source, so selecting rows out of a large population is cheap.
//
// Instances are immutable after construction and safe to share across
// threads.
class ErrorMatrix {
public:
    ErrorMatrix(int n_individuals, int n_cases, std::vector<double> errors_row_major,
                double solve_threshold = 0.0, std::string label = {});

    int individuals() const { return static_cast<int>(row_map_.size()); }
    int cases() const;

    double error(int row, int col) const { return row_data(row)[col]; }
    bool solved(int row, int col) const;
    double solve_threshold() const;
    const std::string& label() const { return label_; }

    // Raw error vector of one row (cases() values).
    const double* row_data(int row) const;

    // Packed solve bits of one row, cases() bits in little-endian word order.
    std::span<const std::uint64_t> row_solve_words(int row) const;
    // Packed solve bits of one column, individuals() bits.
    std::span<const std::uint64_t> column_solve_words(int col) const;
    int words_per_row() const;
    int words_per_column() const { return words_per_column_; }

    // Rows with equal error vectors share a class id. Ids are stable across
    // matrices derived from the same base population via restrict_rows.
    std::int32_t row_class(int row) const;

    friend ErrorMatrix restrict_rows(const ErrorMatrix& pop, std::span<const int> rows);

private:
    struct Storage;
    ErrorMatrix(std::shared_ptr<const Storage> storage, std::vector<std::int32_t> row_map,
                std::string label);
    void build_column_bits();

    std::shared_ptr<const Storage> storage_;
    std::vector<std::int32_t> row_map_;        // matrix row -> storage row
    std::vector<std::uint64_t> column_bits_;   // cases() blocks of words_per_column_ words
    int words_per_column_ = 0;
    std::string label_;
};

// Number of cases solved by at least one individual.
int test_coverage(const ErrorMatrix& pop);

struct CoverageReport {
    int coverage_before = 0;
    int coverage_after = 0;
    int loss = 0;  // coverage_before - coverage_after
};

// Coverage drop from `before` to the row multiset `selected_rows` (indices
// into `before`; duplicates allowed).
CoverageReport coverage_loss(const ErrorMatrix& before, std::span<const int> selected_rows);

// New matrix whose row i is pop's row rows[i]; duplicates are copied.
// The result shares error storage with pop.
ErrorMatrix restrict_rows(const ErrorMatrix& pop, std::span<const int> rows);

}  // namespace lexids
