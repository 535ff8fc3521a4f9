#pragma once

#include <span>
#include <vector>

#include "lexids/error_matrix.hpp"
#include "lexids/rng.hpp"

namespace lexids {

// Blocked niche layout: individuals [g*individuals_per_niche, ...) and cases
// [g*cases_per_niche, ...) belong to niche g.
struct NicheLayout {
    int n_niches = 10;
    int individuals_per_niche = 100;
    int cases_per_niche = 20;

    int individuals() const { return n_niches * individuals_per_niche; }
    int cases() const { return n_niches * cases_per_niche; }
};

struct NichePopulation {
    ErrorMatrix matrix;
    std::vector<int> individual_niche;  // row -> niche id
    std::vector<int> case_niche;        // case -> niche id
};

// Mutually exclusive niches: error 0 where the individual's niche owns the
// case, error 1 elsewhere. Deterministic; no rng involved.
NichePopulation make_niche_population(const NicheLayout& layout);

// Copy of pop with its case columns permuted uniformly at random (niche map
// permuted to match). Selection math is column-order invariant; this exists
// so tests can prove that.
NichePopulation with_shuffled_cases(const NichePopulation& pop, SeededRng& rng);

// Sorted distinct niche ids that have at least one selected member.
std::vector<int> niche_coverage(std::span<const int> selected_rows,
                                std::span<const int> individual_niche);

}  // namespace lexids
