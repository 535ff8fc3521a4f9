#include "lexids/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lexids {

namespace {

// Regularized upper incomplete gamma Q(a, x): power series for x < a + 1,
// modified Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw std::invalid_argument("regularized_gamma_q: need a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;

    const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 10000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (term < sum * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefactor);
    }

    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefactor) * h;
}

struct RankInfo {
    std::vector<double> ranks;  // midrank per pooled element, input order
    double tie_sum = 0.0;       // sum of t^3 - t over tie groups
    bool has_ties = false;
};

RankInfo midranks(std::span<const double> pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });

    RankInfo info;
    info.ranks.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && pooled[order[j]] == pooled[order[i]]) ++j;
        const double t = static_cast<double>(j - i);
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) info.ranks[order[k]] = rank;
        if (j - i > 1) {
            info.has_ties = true;
            info.tie_sum += t * t * t - t;
        }
        i = j;
    }
    return info;
}

void check_finite(std::span<const double> values, const char* who) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(who) + ": values must be finite");
        }
    }
}

// Null distribution counts of the Mann-Whitney U statistic for tie-free
// samples: N(u; m, n) = N(u - n; m - 1, n) + N(u; m, n - 1).
std::vector<double> exact_u_counts(int n1, int n2) {
    const int max_u = n1 * n2;
    std::vector<std::vector<double>> cur(static_cast<std::size_t>(n1) + 1,
                                         std::vector<double>(static_cast<std::size_t>(max_u) + 1, 0.0));
    for (int m = 0; m <= n1; ++m) cur[static_cast<std::size_t>(m)][0] = 1.0;
    for (int nn = 1; nn <= n2; ++nn) {
        auto prev = cur;
        for (int m = 0; m <= n1; ++m) {
            auto& row = cur[static_cast<std::size_t>(m)];
            for (int u = 0; u <= m * nn; ++u) {
                double v = prev[static_cast<std::size_t>(m)][static_cast<std::size_t>(u)];
                if (m >= 1 && u >= nn) {
                    v += cur[static_cast<std::size_t>(m) - 1][static_cast<std::size_t>(u - nn)];
                }
                row[static_cast<std::size_t>(u)] = v;
            }
        }
    }
    return cur[static_cast<std::size_t>(n1)];
}

}  // namespace

double chi_squared_sf(double x, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("chi_squared_sf: df must be positive");
    if (!(x > 0.0)) return 1.0;
    return regularized_gamma_q(df / 2.0, x / 2.0);
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) {
        throw std::invalid_argument("kruskal_wallis: need at least two groups");
    }
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("kruskal_wallis: empty group");
        check_finite(g, "kruskal_wallis");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const double n = static_cast<double>(pooled.size());
    const auto info = midranks(pooled);

    TestResult result;
    result.method = "kruskal-wallis";
    for (const auto& g : groups) result.sample_sizes.push_back(static_cast<int>(g.size()));

    const double correction = 1.0 - info.tie_sum / (n * n * n - n);
    if (correction <= 0.0) {
        // every pooled value identical
        result.statistic = 0.0;
        result.p_value = 1.0;
        return result;
    }

    double h = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) rank_sum += info.ranks[offset + i];
        offset += g.size();
        h += rank_sum * rank_sum / static_cast<double>(g.size());
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    h /= correction;
    if (h < 0.0) h = 0.0;  // fp noise on identical-rank layouts

    result.statistic = h;
    result.p_value = chi_squared_sf(h, static_cast<double>(groups.size()) - 1.0);
    return result;
}

TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, PValueMode mode) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("wilcoxon_rank_sum: samples must not be empty");
    }
    check_finite(a, "wilcoxon_rank_sum");
    check_finite(b, "wilcoxon_rank_sum");

    const int n1 = static_cast<int>(a.size());
    const int n2 = static_cast<int>(b.size());
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto info = midranks(pooled);

    double rank_sum_a = 0.0;
    for (int i = 0; i < n1; ++i) rank_sum_a += info.ranks[static_cast<std::size_t>(i)];
    const double u1 = rank_sum_a - static_cast<double>(n1) * (n1 + 1) / 2.0;
    const double u2 = static_cast<double>(n1) * n2 - u1;

    TestResult result;
    result.method = "wilcoxon-rank-sum";
    result.statistic = u1;
    result.sample_sizes = {n1, n2};

    const bool want_exact =
        mode == PValueMode::exact_only ||
        (mode == PValueMode::automatic && n1 <= 10 && n2 <= 10 && !info.has_ties);
    if (want_exact) {
        if (info.has_ties) {
            throw std::invalid_argument("wilcoxon_rank_sum: exact p-value requires tie-free data");
        }
        const auto counts = exact_u_counts(n1, n2);
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        const auto u = static_cast<std::size_t>(std::llround(u1));
        double below = 0.0, above = 0.0;
        for (std::size_t i = 0; i <= u; ++i) below += counts[i];
        for (std::size_t i = u; i < counts.size(); ++i) above += counts[i];
        result.p_value = std::min(1.0, 2.0 * std::min(below, above) / total);
        result.exact = true;
        return result;
    }

    const double n = static_cast<double>(n1 + n2);
    const double mu = static_cast<double>(n1) * n2 / 2.0;
    const double var =
        static_cast<double>(n1) * n2 / 12.0 * ((n + 1.0) - info.tie_sum / (n * (n - 1.0)));
    if (var <= 0.0) {
        result.p_value = 1.0;  // every pooled value identical
        return result;
    }
    const double u = std::max(u1, u2);
    const double z = (u - mu - 0.5) / std::sqrt(var);
    result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return result;
}

std::vector<double> bonferroni(std::span<const double> p_values, int m) {
    if (m < static_cast<int>(p_values.size())) {
        throw std::invalid_argument("bonferroni: m must cover every comparison");
    }
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) {
        if (!(p >= 0.0) || p > 1.0) {
            throw std::invalid_argument("bonferroni: p-values must lie in [0, 1]");
        }
        out.push_back(std::min(1.0, m * p));
    }
    return out;
}

}  // namespace lexids
