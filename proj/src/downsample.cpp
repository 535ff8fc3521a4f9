#include "lexids/downsample.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace lexids {

int DownSampleConfig::sample_size(int n_cases) const {
    if (!(rate_r > 0.0) || rate_r > 1.0) {
        throw std::invalid_argument("down-sample rate must be in (0, 1]");
    }
    const int k = static_cast<int>(std::llround(rate_r * n_cases));
    return std::max(1, std::min(k, n_cases));
}

int DownSampleConfig::representative_count(int n_individuals) const {
    if (method == Method::full_ids) return n_individuals;
    if (!(parent_sample_rho > 0.0) || parent_sample_rho > 1.0) {
        throw std::invalid_argument("representative fraction rho must be in (0, 1]");
    }
    const int m = static_cast<int>(std::llround(parent_sample_rho * n_individuals));
    return std::max(1, std::min(m, n_individuals));
}

DownSample random_downsample(int n_cases, int k, SeededRng& rng) {
    if (k < 1 || k > n_cases) {
        throw std::invalid_argument("random_downsample: sample size out of range");
    }
    DownSample ds;
    ds.method = Method::rand;
    ds.seed = rng.seed();
    ds.case_indices = sample_without_replacement(n_cases, k, rng);
    return ds;
}

CaseDistanceMatrix case_distances(const ErrorMatrix& pop, std::span<const int> representatives) {
    if (representatives.empty()) {
        throw std::invalid_argument("case_distances: representative list must not be empty");
    }
    for (int r : representatives) {
        if (r < 0 || r >= pop.individuals()) {
            throw std::out_of_range("case_distances: representative row out of range");
        }
    }

    const int t = pop.cases();
    const int m = static_cast<int>(representatives.size());
    const int words = (m + 63) / 64;

    // Per-case solve bits over the representatives, packed in rep-list order.
    std::vector<std::uint64_t> bits(static_cast<std::size_t>(t) * static_cast<std::size_t>(words), 0);
    for (int j = 0; j < m; ++j) {
        const double* row = pop.row_data(representatives[static_cast<std::size_t>(j)]);
        const double threshold = pop.solve_threshold();
        for (int c = 0; c < t; ++c) {
            if (row[c] <= threshold) {
                bits[static_cast<std::size_t>(c) * words + j / 64] |= 1ull << (j % 64);
            }
        }
    }

    CaseDistanceMatrix out;
    out.n_cases = t;
    out.representatives.assign(representatives.begin(), representatives.end());
    out.distances.assign(static_cast<std::size_t>(t) * static_cast<std::size_t>(t), 0);
    for (int i = 0; i < t; ++i) {
        const auto* a = bits.data() + static_cast<std::size_t>(i) * words;
        for (int j = i + 1; j < t; ++j) {
            const auto* b = bits.data() + static_cast<std::size_t>(j) * words;
            int d = 0;
            for (int w = 0; w < words; ++w) d += std::popcount(a[w] ^ b[w]);
            out.distances[static_cast<std::size_t>(i) * t + j] = d;
            out.distances[static_cast<std::size_t>(j) * t + i] = d;
        }
    }
    return out;
}

DownSample farthest_first_downsample(const CaseDistanceMatrix& dist, int k, SeededRng& rng) {
    const int t = dist.n_cases;
    if (k < 1 || k > t) {
        throw std::invalid_argument("farthest_first_downsample: sample size out of range");
    }

    DownSample ds;
    ds.method = Method::ids;
    ds.seed = rng.seed();
    ds.case_indices.reserve(static_cast<std::size_t>(k));

    std::vector<char> picked(static_cast<std::size_t>(t), 0);
    std::vector<int> min_dist(static_cast<std::size_t>(t), 0);
    std::vector<int> ties;

    const int first = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(t)));
    ds.case_indices.push_back(first);
    picked[static_cast<std::size_t>(first)] = 1;
    for (int c = 0; c < t; ++c) min_dist[static_cast<std::size_t>(c)] = dist.dist(c, first);

    for (int step = 1; step < k; ++step) {
        int best = -1;
        for (int c = 0; c < t; ++c) {
            if (picked[static_cast<std::size_t>(c)]) continue;
            const int d = min_dist[static_cast<std::size_t>(c)];
            if (best < 0 || d > best) {
                best = d;
                ties.clear();
                ties.push_back(c);
            } else if (d == best) {
                ties.push_back(c);
            }
        }
        const int pick = ties.size() == 1
                             ? ties.front()
                             : ties[uniform_below(rng, ties.size())];
        ds.case_indices.push_back(pick);
        picked[static_cast<std::size_t>(pick)] = 1;
        for (int c = 0; c < t; ++c) {
            const int d = dist.dist(c, pick);
            if (d < min_dist[static_cast<std::size_t>(c)]) min_dist[static_cast<std::size_t>(c)] = d;
        }
    }
    return ds;
}

DownSample build_downsample(const ErrorMatrix& pop, const DownSampleConfig& cfg, SeededRng& rng) {
    const std::uint64_t source_seed = rng.seed();
    SeededRng rep_rng(rng.next());
    SeededRng case_rng(rng.next());

    DownSample ds;
    switch (cfg.method) {
        case Method::lex: {
            ds.method = Method::lex;
            ds.case_indices.resize(static_cast<std::size_t>(pop.cases()));
            for (int c = 0; c < pop.cases(); ++c) ds.case_indices[static_cast<std::size_t>(c)] = c;
            break;
        }
        case Method::rand: {
            ds = random_downsample(pop.cases(), cfg.sample_size(pop.cases()), case_rng);
            break;
        }
        case Method::ids:
        case Method::full_ids: {
            const int m = cfg.representative_count(pop.individuals());
            std::vector<int> reps;
            if (cfg.method == Method::full_ids) {
                reps.resize(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i) reps[static_cast<std::size_t>(i)] = i;
            } else {
                reps = sample_without_replacement(pop.individuals(), m, rep_rng);
            }
            const auto dist = case_distances(pop, reps);
            ds = farthest_first_downsample(dist, cfg.sample_size(pop.cases()), case_rng);
            ds.method = cfg.method;
            break;
        }
    }
    ds.seed = source_seed;
    return ds;
}

}  // namespace lexids
