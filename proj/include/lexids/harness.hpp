#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lexids/error_matrix.hpp"
#include "lexids/method.hpp"

namespace lexids {

struct ExperimentConfig {
    std::vector<Method> methods{Method::lex, Method::rand, Method::ids, Method::full_ids};
    std::vector<double> rates{0.05, 0.1, 0.2};  // ignored by lex
    int repetitions = 10;    // static protocol
    int n_replicates = 20;   // rounds protocol
    int n_rounds = 300;      // rounds protocol
    int n_parents = 1000;
    double rho = 0.01;
    std::uint64_t base_seed = 1;
    int n_threads = 1;
    std::string population_id;  // defaults to the population label when empty
};

struct ResultRecord {
    std::string population_id;
    Method method = Method::lex;
    double rate = 1.0;      // 1 for lex
    int replicate = 1;      // 1-based; equals rep_or_round in the static protocol
    int rep_or_round = 1;   // 1-based repetition (static) or round (rounds)
    std::uint64_t seed = 0;
    int coverage_before = 0;
    int coverage_after = 0;
    int loss = 0;
};

// Deterministic per-job seed: FNV-1a over base seed, method tag, the rate in
// micro-units, replicate, and round. Documented so runs can be reproduced at
// the protocol level from the five inputs alone.
std::uint64_t derive_seed(std::uint64_t base_seed, Method method, double rate, int replicate,
                          int round);

// Single-generation protocol: for each (method, rate, repetition) build a
// fresh down-sample, select cfg.n_parents parents from the untouched
// population, record the coverage loss. lex runs once per repetition with
// rate pinned to 1.
std::vector<ResultRecord> static_analysis(const ErrorMatrix& pop, const ExperimentConfig& cfg);

// Drift protocol: per (method, rate, replicate), cfg.n_rounds selection
// rounds with no variation; each round's parents become the next round's
// population. Loss is reported against the ORIGINAL population's coverage,
// so the per-replicate series is non-decreasing.
std::vector<ResultRecord> rounds_analysis(const ErrorMatrix& pop, const ExperimentConfig& cfg);

struct SummaryRow {
    Method method = Method::lex;
    double rate = 1.0;
    int rep_or_round = 1;
    int n = 0;
    double mean_loss = 0.0;
    double median_loss = 0.0;
    double sd_loss = 0.0;
    double ci_low = 0.0;   // mean - 1.96 * sd / sqrt(n)
    double ci_high = 0.0;
};

// Aggregates loss grouped by (method, rate, rep_or_round), sorted by the
// same key.
std::vector<SummaryRow> summarize(std::span<const ResultRecord> records);

}  // namespace lexids
