#include "lexids/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "lexids/downsample.hpp"
#include "lexids/rng.hpp"
#include "lexids/selection.hpp"

namespace lexids {

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
}

// little-endian regardless of host
void fnv_u64(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
    }
}

// (method, rate) pairs a config expands to; lex appears once with rate 1.
std::vector<std::pair<Method, double>> conditions(const ExperimentConfig& cfg) {
    std::vector<std::pair<Method, double>> out;
    for (Method m : cfg.methods) {
        if (m == Method::lex) {
            out.emplace_back(m, 1.0);
        } else {
            for (double r : cfg.rates) out.emplace_back(m, r);
        }
    }
    return out;
}

void validate(const ErrorMatrix& pop, const ExperimentConfig& cfg, bool rounds) {
    if (cfg.methods.empty()) throw std::invalid_argument("experiment: method list is empty");
    bool needs_rates = false;
    for (Method m : cfg.methods) needs_rates |= m != Method::lex;
    if (needs_rates && cfg.rates.empty()) {
        throw std::invalid_argument("experiment: rate list is empty");
    }
    for (double r : cfg.rates) {
        if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("experiment: rate outside (0, 1]");
    }
    if (!(cfg.rho > 0.0) || cfg.rho > 1.0) {
        throw std::invalid_argument("experiment: rho outside (0, 1]");
    }
    if (cfg.n_parents < 1) throw std::invalid_argument("experiment: need at least one parent");
    if (rounds) {
        if (cfg.n_replicates < 1 || cfg.n_rounds < 1) {
            throw std::invalid_argument("experiment: replicate and round counts must be >= 1");
        }
    } else if (cfg.repetitions < 1) {
        throw std::invalid_argument("experiment: repetition count must be >= 1");
    }
    (void)pop;
}

// Fan a unit index range out over up to n_threads workers. Deterministic as
// long as fn(i) writes only to slot i.
template <typename Fn>
void run_units(int n_units, int n_threads, Fn&& fn) {
    n_threads = std::max(1, std::min(n_threads, n_units));
    if (n_threads == 1) {
        for (int i = 0; i < n_units; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_units; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

std::string record_population_id(const ErrorMatrix& pop, const ExperimentConfig& cfg) {
    return cfg.population_id.empty() ? pop.label() : cfg.population_id;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, Method method, double rate, int replicate,
                          int round) {
    std::uint64_t h = 1469598103934665603ull;
    fnv_u64(h, base_seed);
    const auto tag = method_name(method);
    fnv_bytes(h, tag.data(), tag.size());
    fnv_u64(h, static_cast<std::uint64_t>(std::llround(rate * 1e6)));
    fnv_u64(h, static_cast<std::uint64_t>(replicate));
    fnv_u64(h, static_cast<std::uint64_t>(round));
    return h;
}

std::vector<ResultRecord> static_analysis(const ErrorMatrix& pop, const ExperimentConfig& cfg) {
    validate(pop, cfg, false);
    const auto conds = conditions(cfg);
    const auto pop_id = record_population_id(pop, cfg);
    const int n_units = static_cast<int>(conds.size()) * cfg.repetitions;
    std::vector<ResultRecord> records(static_cast<std::size_t>(n_units));

    run_units(n_units, cfg.n_threads, [&](int unit) {
        const auto& [method, rate] = conds[static_cast<std::size_t>(unit) / cfg.repetitions];
        const int rep = static_cast<int>(static_cast<std::size_t>(unit) % cfg.repetitions) + 1;
        const auto seed = derive_seed(cfg.base_seed, method, rate, rep, 0);
        SeededRng rng(seed);
        const DownSampleConfig dcfg{method, rate, cfg.rho};
        const auto ds = build_downsample(pop, dcfg, rng);
        const auto outcome = select_parents(pop, cfg.n_parents, ds.case_indices, rng);
        const auto report = coverage_loss(pop, outcome.parent_rows);
        records[static_cast<std::size_t>(unit)] =
            ResultRecord{pop_id,          method,
                         rate,            rep,
                         rep,             seed,
                         report.coverage_before, report.coverage_after,
                         report.loss};
    });
    return records;
}

std::vector<ResultRecord> rounds_analysis(const ErrorMatrix& pop, const ExperimentConfig& cfg) {
    validate(pop, cfg, true);
    const auto conds = conditions(cfg);
    const auto pop_id = record_population_id(pop, cfg);
    const int original_coverage = test_coverage(pop);
    const int n_units = static_cast<int>(conds.size()) * cfg.n_replicates;
    std::vector<std::vector<ResultRecord>> unit_records(static_cast<std::size_t>(n_units));

    run_units(n_units, cfg.n_threads, [&](int unit) {
        const auto& [method, rate] = conds[static_cast<std::size_t>(unit) / cfg.n_replicates];
        const int replicate = static_cast<int>(static_cast<std::size_t>(unit) % cfg.n_replicates) + 1;
        const DownSampleConfig dcfg{method, rate, cfg.rho};
        auto& out = unit_records[static_cast<std::size_t>(unit)];
        out.reserve(static_cast<std::size_t>(cfg.n_rounds));

        ErrorMatrix current = pop;
        for (int round = 1; round <= cfg.n_rounds; ++round) {
            const auto seed = derive_seed(cfg.base_seed, method, rate, replicate, round);
            SeededRng rng(seed);
            const auto ds = build_downsample(current, dcfg, rng);
            const auto outcome = select_parents(current, cfg.n_parents, ds.case_indices, rng);
            const int after = coverage_loss(current, outcome.parent_rows).coverage_after;
            out.push_back(ResultRecord{pop_id, method, rate, replicate, round, seed,
                                       original_coverage, after, original_coverage - after});
            current = restrict_rows(current, outcome.parent_rows);
        }
    });

    std::vector<ResultRecord> records;
    records.reserve(static_cast<std::size_t>(n_units) * static_cast<std::size_t>(cfg.n_rounds));
    for (auto& unit : unit_records) {
        records.insert(records.end(), unit.begin(), unit.end());
    }
    return records;
}

std::vector<SummaryRow> summarize(std::span<const ResultRecord> records) {
    if (records.empty()) throw std::invalid_argument("summarize: no records");

    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) order[i] = i;
    auto key = [&](std::size_t i) {
        const auto& r = records[i];
        return std::tuple(static_cast<int>(r.method), r.rate, r.rep_or_round);
    };
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return key(x) < key(y); });

    std::vector<SummaryRow> rows;
    std::size_t i = 0;
    std::vector<double> losses;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && key(order[j]) == key(order[i])) ++j;
        losses.clear();
        for (std::size_t k = i; k < j; ++k) {
            losses.push_back(static_cast<double>(records[order[k]].loss));
        }
        std::sort(losses.begin(), losses.end());
        const auto n = losses.size();
        double mean = 0.0;
        for (double v : losses) mean += v;
        mean /= static_cast<double>(n);
        double sd = 0.0;
        if (n > 1) {
            for (double v : losses) sd += (v - mean) * (v - mean);
            sd = std::sqrt(sd / static_cast<double>(n - 1));
        }
        const double median =
            n % 2 == 1 ? losses[n / 2] : (losses[n / 2 - 1] + losses[n / 2]) / 2.0;
        const double half = 1.96 * sd / std::sqrt(static_cast<double>(n));

        const auto& r = records[order[i]];
        rows.push_back(SummaryRow{r.method, r.rate, r.rep_or_round, static_cast<int>(n), mean,
                                  median, sd, mean - half, mean + half});
        i = j;
    }
    return rows;
}

}  // namespace lexids
