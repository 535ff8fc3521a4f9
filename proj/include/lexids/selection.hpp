#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lexids/error_matrix.hpp"
#include "lexids/rng.hpp"

namespace lexids {

struct SelectionOutcome {
    std::vector<int> parent_rows;  // one entry per requested parent
    std::vector<int> cases_used;   // the case set selection was conditioned on
    std::uint64_t seed = 0;        // seed of the rng the caller passed in
};

// One lexicase selection: walk case_order, keep candidates whose error on the
// current case equals the minimum among those remaining, stop once a single
// candidate is left. If several survive the whole order, one is picked
// uniformly at random.
//
// Rng contract: consumes no draws during filtering and exactly one bounded
// draw for the final tie-break, and that draw happens only when more than one
// candidate survives. Survivors are indexed in ascending row order for the
// tie-break, so a naive implementation sharing the rng stream picks the same
// winner.
int lexicase_select_one(const ErrorMatrix& pop, std::span<const int> case_order, SeededRng& rng);

// n_parents independent lexicase selections, each on a fresh uniform shuffle
// of `cases`. Candidate pool is always the full population.
//
// Rng contract, per selection event: first the shuffle (size-1 bounded draws,
// highest index first), then the selection's tie-break draw as above. One
// scratch permutation is reshuffled in place across events; Fisher-Yates
// output is uniform regardless of the starting arrangement.
SelectionOutcome select_parents(const ErrorMatrix& pop, int n_parents, std::span<const int> cases,
                                SeededRng& rng);

}  // namespace lexids
