#pragma once

#include <span>
#include <string>
#include <vector>

namespace lexids {

struct TestResult {
    std::string method;             // "kruskal-wallis" or "wilcoxon-rank-sum"
    double statistic = 0.0;         // H, or U of the first sample
    double p_value = 1.0;           // two-sided, uncorrected
    std::vector<int> sample_sizes;
    bool exact = false;             // wilcoxon only: exact enumeration used
};

// How wilcoxon_rank_sum computes its p-value. `automatic` uses exact
// enumeration when both samples have at most 10 values and the pooled data
// is tie-free, the normal approximation otherwise.
enum class PValueMode { automatic, exact_only, normal_approx };

// Kruskal-Wallis H on midranks with the standard tie correction; p from the
// chi-square upper tail with (k-1) degrees of freedom. All values identical
// across all groups gives H = 0, p = 1 by convention.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Mann-Whitney/Wilcoxon rank-sum. statistic is U of sample a. Two-sided p:
// exact path enumerates the tie-free null distribution of U; approximate
// path uses the normal approximation on max(U_a, U_b) with tie-corrected
// variance and a 0.5 continuity correction. exact_only rejects tied data.
TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                             PValueMode mode = PValueMode::automatic);

// min(1, m * p) for each p; order preserved. m must be at least the number
// of p-values.
std::vector<double> bonferroni(std::span<const double> p_values, int m);

// Upper tail of the chi-square distribution with df degrees of freedom,
// via the regularized incomplete gamma function. Good to ~1e-10 relative
// accuracy on the domain the tests use.
double chi_squared_sf(double x, double df);

}  // namespace lexids
