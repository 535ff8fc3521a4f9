#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexids/error_matrix.hpp"
#include "lexids/harness.hpp"

namespace lexids {

// Raised for any malformed input file; the message starts with "path:line:".
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PopulationData {
    ErrorMatrix matrix;
    std::vector<int> individual_niche;  // empty when the file carries no niche map
    std::vector<int> case_niche;
};

// Population file format (see docs/population-format.md):
//   errmat,v1,N,T,threshold[,label]
//   N lines of T comma-separated error values
//   individual-niches,<N ints>   (optional)
//   case-niches,<T ints>         (optional)
PopulationData read_population(const std::string& path);
void write_population(const PopulationData& pop, const std::string& path);

// Records CSV with a fixed header and rows sorted by (population_id, method
// name, rate, replicate, rep_or_round); repeated runs of the same experiment
// produce byte-identical files.
void write_records(std::span<const ResultRecord> records, const std::string& path);
std::vector<ResultRecord> read_records(const std::string& path);

// Shortest decimal string that round-trips the value.
std::string format_double(double v);

}  // namespace lexids
