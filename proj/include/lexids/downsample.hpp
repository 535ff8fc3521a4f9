#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lexids/error_matrix.hpp"
#include "lexids/method.hpp"
#include "lexids/rng.hpp"

namespace lexids {

struct DownSampleConfig {
    Method method = Method::lex;     // lex means "no down-sampling"
    double rate_r = 1.0;             // in (0, 1]
    double parent_sample_rho = 0.01; // fraction of the population used as distance representatives

    // k = round-half-up(r * T), clamped to [1, T].
    int sample_size(int n_cases) const;
    // m = max(1, round(rho * N)); the whole population for full-ids.
    int representative_count(int n_individuals) const;
};

// Pairwise case distances: Hamming distance between the two cases' solve
// bit vectors over the representative rows.
struct CaseDistanceMatrix {
    int n_cases = 0;
    std::vector<int> distances;       // n_cases * n_cases, symmetric, zero diagonal
    std::vector<int> representatives; // the rows the distances were computed from

    int dist(int i, int j) const {
        return distances[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_cases) +
                         static_cast<std::size_t>(j)];
    }
};

struct DownSample {
    std::vector<int> case_indices;  // distinct, in pick order
    Method method = Method::lex;
    std::uint64_t seed = 0;         // seed of the rng stream the construction drew from
};

// k cases uniformly without replacement.
DownSample random_downsample(int n_cases, int k, SeededRng& rng);

CaseDistanceMatrix case_distances(const ErrorMatrix& pop, std::span<const int> representatives);

// Farthest-first traversal: uniform-random seed case, then repeatedly the
// case with maximum minimum distance to the picked set, ties broken uniformly
// at random (one bounded draw per pick iff several cases tie).
DownSample farthest_first_downsample(const CaseDistanceMatrix& dist, int k, SeededRng& rng);

// Dispatch over cfg.method. Always splits the passed rng into two child
// streams (representatives first, then case picks) regardless of method, so
// ids with rho covering the whole population reproduces full-ids bit for bit.
DownSample build_downsample(const ErrorMatrix& pop, const DownSampleConfig& cfg, SeededRng& rng);

}  // namespace lexids
