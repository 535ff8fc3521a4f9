// lexids: lexicase selection with random / informed down-sampling, plus the
// static and multi-round coverage-loss analyses and the nonparametric stats
// used to compare them.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexids/downsample.hpp"
#include "lexids/harness.hpp"
#include "lexids/method.hpp"
#include "lexids/population_io.hpp"
#include "lexids/rng.hpp"
#include "lexids/stats.hpp"
#include "lexids/synthetic.hpp"

namespace {

using namespace lexids;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> methods;
    for (const auto& name : names) {
        const auto m = parse_method(name);
        if (!m) throw UsageError("unknown method '" + name + "'");
        methods.push_back(*m);
    }
    return methods;
}

void check_rates(const std::vector<double>& rates) {
    for (double r : rates) {
        if (!(r > 0.0) || r > 1.0) throw UsageError("rate outside (0, 1]");
    }
}

std::string population_id_for(const PopulationData& pop, const std::string& path) {
    if (!pop.matrix.label().empty()) return pop.matrix.label();
    return std::filesystem::path(path).stem().string();
}

// Shared flags of the analyze / rounds subcommands.
struct ExperimentFlags {
    std::vector<std::string> files;
    std::string out;
    std::vector<std::string> methods;
    std::vector<double> rates{0.05, 0.1, 0.2};
    int parents = 1000;
    double rho = 0.01;
    std::uint64_t seed = 1;
    int threads = 1;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& flags) {
    cmd->add_option("files", flags.files, "population files")->required()->expected(-1);
    cmd->add_option("--out", flags.out, "records CSV to write")->required();
    cmd->add_option("--methods", flags.methods, "comma-separated selection methods")
        ->delimiter(',');
    cmd->add_option("--rates", flags.rates, "comma-separated down-sample rates in (0,1]")
        ->delimiter(',');
    cmd->add_option("--parents", flags.parents, "parents selected per event");
    cmd->add_option("--rho", flags.rho, "population fraction used as distance representatives");
    cmd->add_option("--seed", flags.seed, "base seed");
    cmd->add_option("--threads", flags.threads, "worker threads");
}

ExperimentConfig config_from(const ExperimentFlags& flags,
                             const std::vector<std::string>& default_methods) {
    check_rates(flags.rates);
    if (flags.parents < 1) throw UsageError("--parents must be >= 1");
    if (!(flags.rho > 0.0) || flags.rho > 1.0) throw UsageError("--rho outside (0, 1]");
    if (flags.threads < 1) throw UsageError("--threads must be >= 1");
    ExperimentConfig cfg;
    cfg.methods = parse_methods(flags.methods.empty() ? default_methods : flags.methods);
    cfg.rates = flags.rates;
    cfg.n_parents = flags.parents;
    cfg.rho = flags.rho;
    cfg.base_seed = flags.seed;
    cfg.n_threads = flags.threads;
    return cfg;
}

int cmd_synth(const std::string& out, int niches, int per_niche, int cases_per_niche,
              bool shuffle_cases, std::uint64_t seed) {
    if (niches < 1 || per_niche < 1 || cases_per_niche < 1) {
        throw UsageError("niche layout counts must be >= 1");
    }
    NicheLayout layout{niches, per_niche, cases_per_niche};
    auto pop = make_niche_population(layout);
    if (shuffle_cases) {
        SeededRng rng(seed);
        pop = with_shuffled_cases(pop, rng);
    }
    write_population(PopulationData{pop.matrix, pop.individual_niche, pop.case_niche}, out);
    std::cout << out << ": " << pop.matrix.individuals() << " individuals, "
              << pop.matrix.cases() << " cases, coverage " << test_coverage(pop.matrix) << "\n";
    return 0;
}

int cmd_ingest(const std::vector<std::string>& files) {
    for (const auto& file : files) {
        const auto pop = read_population(file);
        std::cout << file << ": " << pop.matrix.individuals() << " individuals, "
                  << pop.matrix.cases() << " cases, coverage " << test_coverage(pop.matrix);
        if (!pop.matrix.label().empty()) std::cout << ", label " << pop.matrix.label();
        if (!pop.individual_niche.empty()) std::cout << ", niche maps present";
        std::cout << "\n";
    }
    return 0;
}

int cmd_analyze(const ExperimentFlags& flags, int repetitions) {
    if (repetitions < 1) throw UsageError("--reps must be >= 1");
    auto cfg = config_from(flags, {"lex", "rand", "ids", "full-ids"});
    cfg.repetitions = repetitions;

    std::vector<ResultRecord> all;
    for (const auto& file : flags.files) {
        const auto pop = read_population(file);
        cfg.population_id = population_id_for(pop, file);
        const auto records = static_analysis(pop.matrix, cfg);
        all.insert(all.end(), records.begin(), records.end());
    }
    write_records(all, flags.out);
    std::cout << flags.out << ": " << all.size() << " records\n";
    return 0;
}

int cmd_rounds(const ExperimentFlags& flags, int replicates, int rounds) {
    if (replicates < 1) throw UsageError("--reps must be >= 1");
    if (rounds < 1) throw UsageError("--rounds must be >= 1");
    auto cfg = config_from(flags, {"lex", "rand", "ids"});
    cfg.n_replicates = replicates;
    cfg.n_rounds = rounds;

    std::vector<ResultRecord> all;
    for (const auto& file : flags.files) {
        const auto pop = read_population(file);
        cfg.population_id = population_id_for(pop, file);
        const auto records = rounds_analysis(pop.matrix, cfg);
        all.insert(all.end(), records.begin(), records.end());
    }
    write_records(all, flags.out);
    std::cout << flags.out << ": " << all.size() << " records\n";
    return 0;
}

// Kruskal-Wallis across the selection conditions at each down-sample rate,
// then pairwise rank-sum tests with a Bonferroni correction over the pairs
// in the group. lex rows carry no rate, so they join every rate's group.
int cmd_stats(const std::string& csv, double alpha, bool final_only) {
    if (!(alpha > 0.0) || alpha >= 1.0) throw UsageError("--alpha outside (0, 1)");
    auto records = read_records(csv);

    if (final_only) {
        int last = 0;
        for (const auto& r : records) last = std::max(last, r.rep_or_round);
        std::erase_if(records, [&](const ResultRecord& r) { return r.rep_or_round != last; });
        std::cout << "final-only: keeping rep_or_round " << last << "\n";
    }

    std::vector<double> lex_losses;
    std::map<double, std::map<std::string, std::vector<double>>> by_rate;
    for (const auto& r : records) {
        if (r.method == Method::lex) {
            lex_losses.push_back(static_cast<double>(r.loss));
        } else {
            by_rate[r.rate][std::string(method_name(r.method))].push_back(
                static_cast<double>(r.loss));
        }
    }

    if (by_rate.empty()) {
        std::cout << "no down-sampled conditions in " << csv << "; nothing to compare\n";
        return 0;
    }

    for (const auto& [rate, by_method] : by_rate) {
        std::map<std::string, std::vector<double>> groups(by_method);
        if (!lex_losses.empty()) groups["lex"] = lex_losses;

        std::cout << "rate " << format_double(rate) << ":";
        for (const auto& [name, losses] : groups) {
            std::cout << " " << name << "(n=" << losses.size() << ")";
        }
        std::cout << "\n";
        if (groups.size() < 2) {
            std::cout << "  fewer than two conditions, skipping\n";
            continue;
        }

        std::vector<std::vector<double>> values;
        for (const auto& [name, losses] : groups) values.push_back(losses);
        const auto kw = kruskal_wallis(values);
        std::cout << "  kruskal-wallis: H=" << format_double(kw.statistic)
                  << " p=" << format_double(kw.p_value)
                  << (kw.p_value < alpha ? " significant" : " n.s.") << "\n";

        std::vector<std::pair<std::string, std::string>> pairs;
        std::vector<double> raw_p;
        std::vector<TestResult> tests;
        for (auto a = groups.begin(); a != groups.end(); ++a) {
            for (auto b = std::next(a); b != groups.end(); ++b) {
                tests.push_back(wilcoxon_rank_sum(a->second, b->second));
                pairs.emplace_back(a->first, b->first);
            }
        }
        for (const auto& t : tests) raw_p.push_back(t.p_value);
        const auto corrected = bonferroni(raw_p, static_cast<int>(raw_p.size()));
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            std::cout << "  " << pairs[i].first << " vs " << pairs[i].second
                      << ": U=" << format_double(tests[i].statistic)
                      << " p=" << format_double(raw_p[i])
                      << " corrected=" << format_double(corrected[i])
                      << (tests[i].exact ? " (exact)" : " (normal)")
                      << (corrected[i] < alpha ? " significant" : " n.s.") << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lexicase selection with random and informed down-sampling"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "write a synthetic niche population file");
    int niches = 10, per_niche = 100, cases_per_niche = 20;
    bool shuffle_cases = false;
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    synth->add_option("--niches", niches, "niche count");
    synth->add_option("--per-niche", per_niche, "individuals per niche");
    synth->add_option("--cases-per-niche", cases_per_niche, "training cases per niche");
    synth->add_flag("--shuffle-cases", shuffle_cases, "permute case columns");
    synth->add_option("--seed", synth_seed, "seed for --shuffle-cases");
    synth->add_option("--out", synth_out, "population file to write")->required();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate population files");
    std::vector<std::string> ingest_files;
    ingest->add_option("files", ingest_files, "population files")->required()->expected(-1);

    // analyze
    auto* analyze =
        app.add_subcommand("analyze", "single-generation coverage-loss analysis");
    ExperimentFlags analyze_flags;
    int repetitions = 10;
    add_experiment_flags(analyze, analyze_flags);
    analyze->add_option("--reps", repetitions, "repetitions per condition");

    // rounds
    auto* rounds = app.add_subcommand("rounds", "multi-round selection-drift analysis");
    ExperimentFlags rounds_flags;
    int replicates = 20, n_rounds = 300;
    add_experiment_flags(rounds, rounds_flags);
    rounds->add_option("--reps", replicates, "replicates per condition");
    rounds->add_option("--rounds", n_rounds, "selection rounds per replicate");

    // stats
    auto* stats = app.add_subcommand("stats", "compare conditions in a records CSV");
    std::string stats_csv;
    double alpha = 0.05;
    bool final_only = false;
    stats->add_option("csv", stats_csv, "records CSV")->required();
    stats->add_option("--alpha", alpha, "significance level");
    stats->add_flag("--final-only", final_only, "keep only the highest rep_or_round");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_out, niches, per_niche, cases_per_niche, shuffle_cases,
                             synth_seed);
        }
        if (ingest->parsed()) return cmd_ingest(ingest_files);
        if (analyze->parsed()) return cmd_analyze(analyze_flags, repetitions);
        if (rounds->parsed()) return cmd_rounds(rounds_flags, replicates, n_rounds);
        if (stats->parsed()) return cmd_stats(stats_csv, alpha, final_only);
        std::cerr << "usage error: no subcommand\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
