#include "lexids/synthetic.hpp"

#include <algorithm>
#include <stdexcept>

namespace lexids {

NichePopulation make_niche_population(const NicheLayout& layout) {
    if (layout.n_niches < 1 || layout.individuals_per_niche < 1 || layout.cases_per_niche < 1) {
        throw std::invalid_argument("niche layout: all counts must be >= 1");
    }
    const int n = layout.individuals();
    const int t = layout.cases();

    std::vector<int> individual_niche(static_cast<std::size_t>(n));
    std::vector<int> case_niche(static_cast<std::size_t>(t));
    for (int i = 0; i < n; ++i) individual_niche[static_cast<std::size_t>(i)] = i / layout.individuals_per_niche;
    for (int c = 0; c < t; ++c) case_niche[static_cast<std::size_t>(c)] = c / layout.cases_per_niche;

    std::vector<double> errors(static_cast<std::size_t>(n) * static_cast<std::size_t>(t), 1.0);
    for (int i = 0; i < n; ++i) {
        const int g = individual_niche[static_cast<std::size_t>(i)];
        double* row = errors.data() + static_cast<std::size_t>(i) * t;
        for (int c = g * layout.cases_per_niche; c < (g + 1) * layout.cases_per_niche; ++c) {
            row[c] = 0.0;
        }
    }

    return NichePopulation{
        ErrorMatrix(n, t, std::move(errors), 0.0, "synthetic-niche"),
        std::move(individual_niche),
        std::move(case_niche),
    };
}

NichePopulation with_shuffled_cases(const NichePopulation& pop, SeededRng& rng) {
    const int n = pop.matrix.individuals();
    const int t = pop.matrix.cases();
    std::vector<int> perm(static_cast<std::size_t>(t));
    for (int c = 0; c < t; ++c) perm[static_cast<std::size_t>(c)] = c;
    fisher_yates_shuffle(perm, rng);

    std::vector<double> errors(static_cast<std::size_t>(n) * static_cast<std::size_t>(t));
    std::vector<int> case_niche(static_cast<std::size_t>(t));
    for (int c = 0; c < t; ++c) {
        const int src = perm[static_cast<std::size_t>(c)];
        case_niche[static_cast<std::size_t>(c)] = pop.case_niche[static_cast<std::size_t>(src)];
        for (int i = 0; i < n; ++i) {
            errors[static_cast<std::size_t>(i) * t + c] = pop.matrix.error(i, src);
        }
    }

    return NichePopulation{
        ErrorMatrix(n, t, std::move(errors), pop.matrix.solve_threshold(), pop.matrix.label()),
        pop.individual_niche,
        std::move(case_niche),
    };
}

std::vector<int> niche_coverage(std::span<const int> selected_rows,
                                std::span<const int> individual_niche) {
    std::vector<int> niches;
    for (int row : selected_rows) {
        if (row < 0 || static_cast<std::size_t>(row) >= individual_niche.size()) {
            throw std::out_of_range("niche_coverage: row index out of range");
        }
        niches.push_back(individual_niche[static_cast<std::size_t>(row)]);
    }
    std::sort(niches.begin(), niches.end());
    niches.erase(std::unique(niches.begin(), niches.end()), niches.end());
    return niches;
}

}  // namespace lexids
