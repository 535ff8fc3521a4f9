#include "lexids/error_matrix.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

namespace lexids {

namespace {

constexpr int kWordBits = 64;

int word_count(int bits) { return (bits + kWordBits - 1) / kWordBits; }

// FNV-1a over a row's raw bytes; rows are canonicalized (-0.0 -> +0.0) so
// bytewise equality matches value equality for finite non-negative errors.
std::uint64_t hash_row(const double* data, int n) {
    std::uint64_t h = 1469598103934665603ull;
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

struct ErrorMatrix::Storage {
    int n_rows = 0;
    int n_cases = 0;
    double solve_threshold = 0.0;
    std::vector<double> errors;            // n_rows x n_cases, row major
    std::vector<std::uint64_t> row_bits;   // n_rows blocks of words_per_row words
    std::vector<std::int32_t> row_class;   // dense ids over equal error vectors
    int words_per_row = 0;
};

ErrorMatrix::ErrorMatrix(int n_individuals, int n_cases, std::vector<double> errors_row_major,
                         double solve_threshold, std::string label)
    : label_(std::move(label)) {
    if (n_individuals < 1 || n_cases < 1) {
        throw std::invalid_argument("error matrix: need at least one individual and one case");
    }
    if (errors_row_major.size() !=
        static_cast<std::size_t>(n_individuals) * static_cast<std::size_t>(n_cases)) {
        throw std::invalid_argument("error matrix: value count does not match dimensions");
    }
    if (!std::isfinite(solve_threshold) || solve_threshold < 0.0) {
        throw std::invalid_argument("error matrix: solve threshold must be finite and >= 0");
    }
    for (double& v : errors_row_major) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("error matrix: errors must be finite and >= 0");
        }
        if (v == 0.0) v = 0.0;  // canonicalize -0.0
    }

    auto storage = std::make_shared<Storage>();
    storage->n_rows = n_individuals;
    storage->n_cases = n_cases;
    storage->solve_threshold = solve_threshold;
    storage->errors = std::move(errors_row_major);
    storage->words_per_row = word_count(n_cases);
    storage->row_bits.assign(
        static_cast<std::size_t>(n_individuals) * static_cast<std::size_t>(storage->words_per_row), 0);
    storage->row_class.resize(static_cast<std::size_t>(n_individuals));

    std::unordered_map<std::uint64_t, std::vector<std::int32_t>> classes_by_hash;
    std::int32_t next_class = 0;
    std::vector<const double*> class_rep;
    for (int i = 0; i < n_individuals; ++i) {
        const double* row = storage->errors.data() + static_cast<std::size_t>(i) * n_cases;
        auto* bits = storage->row_bits.data() + static_cast<std::size_t>(i) * storage->words_per_row;
        for (int c = 0; c < n_cases; ++c) {
            if (row[c] <= solve_threshold) bits[c / kWordBits] |= 1ull << (c % kWordBits);
        }
        auto& bucket = classes_by_hash[hash_row(row, n_cases)];
        std::int32_t cls = -1;
        for (std::int32_t candidate : bucket) {
            if (std::memcmp(class_rep[static_cast<std::size_t>(candidate)], row,
                            sizeof(double) * static_cast<std::size_t>(n_cases)) == 0) {
                cls = candidate;
                break;
            }
        }
        if (cls < 0) {
            cls = next_class++;
            bucket.push_back(cls);
            class_rep.push_back(row);
        }
        storage->row_class[static_cast<std::size_t>(i)] = cls;
    }

    storage_ = std::move(storage);
    row_map_.resize(static_cast<std::size_t>(n_individuals));
    for (int i = 0; i < n_individuals; ++i) row_map_[static_cast<std::size_t>(i)] = i;
    build_column_bits();
}

ErrorMatrix::ErrorMatrix(std::shared_ptr<const Storage> storage, std::vector<std::int32_t> row_map,
                         std::string label)
    : storage_(std::move(storage)), row_map_(std::move(row_map)), label_(std::move(label)) {
    build_column_bits();
}

void ErrorMatrix::build_column_bits() {
    const int n = individuals();
    const int t = storage_->n_cases;
    words_per_column_ = word_count(n);
    column_bits_.assign(static_cast<std::size_t>(t) * static_cast<std::size_t>(words_per_column_), 0);
    for (int i = 0; i < n; ++i) {
        const auto* bits =
            storage_->row_bits.data() +
            static_cast<std::size_t>(row_map_[static_cast<std::size_t>(i)]) * storage_->words_per_row;
        for (int w = 0; w < storage_->words_per_row; ++w) {
            std::uint64_t word = bits[w];
            while (word != 0) {
                const int c = w * kWordBits + std::countr_zero(word);
                word &= word - 1;
                column_bits_[static_cast<std::size_t>(c) * words_per_column_ + i / kWordBits] |=
                    1ull << (i % kWordBits);
            }
        }
    }
}

int ErrorMatrix::cases() const { return storage_->n_cases; }

double ErrorMatrix::solve_threshold() const { return storage_->solve_threshold; }

bool ErrorMatrix::solved(int row, int col) const {
    return error(row, col) <= storage_->solve_threshold;
}

const double* ErrorMatrix::row_data(int row) const {
    return storage_->errors.data() +
           static_cast<std::size_t>(row_map_[static_cast<std::size_t>(row)]) * storage_->n_cases;
}

std::span<const std::uint64_t> ErrorMatrix::row_solve_words(int row) const {
    return {storage_->row_bits.data() +
                static_cast<std::size_t>(row_map_[static_cast<std::size_t>(row)]) *
                    storage_->words_per_row,
            static_cast<std::size_t>(storage_->words_per_row)};
}

std::span<const std::uint64_t> ErrorMatrix::column_solve_words(int col) const {
    return {column_bits_.data() + static_cast<std::size_t>(col) * words_per_column_,
            static_cast<std::size_t>(words_per_column_)};
}

int ErrorMatrix::words_per_row() const { return storage_->words_per_row; }

std::int32_t ErrorMatrix::row_class(int row) const {
    return storage_->row_class[static_cast<std::size_t>(row_map_[static_cast<std::size_t>(row)])];
}

int test_coverage(const ErrorMatrix& pop) {
    int covered = 0;
    for (int c = 0; c < pop.cases(); ++c) {
        for (std::uint64_t word : pop.column_solve_words(c)) {
            if (word != 0) {
                ++covered;
                break;
            }
        }
    }
    return covered;
}

CoverageReport coverage_loss(const ErrorMatrix& before, std::span<const int> selected_rows) {
    const int n = before.individuals();
    std::vector<std::uint64_t> covered(static_cast<std::size_t>(before.words_per_row()), 0);
    for (int row : selected_rows) {
        if (row < 0 || row >= n) {
            throw std::out_of_range("coverage_loss: row index out of range");
        }
        auto words = before.row_solve_words(row);
        for (std::size_t w = 0; w < covered.size(); ++w) covered[w] |= words[w];
    }
    CoverageReport report;
    report.coverage_before = test_coverage(before);
    for (std::uint64_t word : covered) report.coverage_after += std::popcount(word);
    report.loss = report.coverage_before - report.coverage_after;
    return report;
}

ErrorMatrix restrict_rows(const ErrorMatrix& pop, std::span<const int> rows) {
    if (rows.empty()) {
        throw std::invalid_argument("restrict_rows: row list must not be empty");
    }
    std::vector<std::int32_t> row_map;
    row_map.reserve(rows.size());
    for (int row : rows) {
        if (row < 0 || row >= pop.individuals()) {
            throw std::out_of_range("restrict_rows: row index out of range");
        }
        row_map.push_back(pop.row_map_[static_cast<std::size_t>(row)]);
    }
    return ErrorMatrix(pop.storage_, std::move(row_map), pop.label_);
}

}  // namespace lexids
