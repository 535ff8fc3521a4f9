#include "lexids/selection.hpp"

#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace lexids {

namespace {

std::uint64_t hash_cells(const double* row, std::span<const int> cases) {
    std::uint64_t h = 1469598103934665603ull;
    for (int c : cases) {
        std::uint64_t bits;
        std::memcpy(&bits, &row[c], sizeof(bits));
        for (int shift = 0; shift < 64; shift += 8) {
            h ^= (bits >> shift) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

// Rows with equal error vectors over the conditioning case set behave
// identically under lexicase, so filtering runs on row groups instead of
// rows. Groups are built once per (population, case set); each selection is
// then a scan over the handful of live groups per case.
//
// Because any two distinct groups differ on at least one conditioning case,
// exactly one group survives a full pass over the set, and the loop can stop
// as soon as one group is left: remaining cases cannot split it. The final
// tie-break draws once into the ascending member list, which is exactly what
// a naive row-by-row implementation does with its ascending survivor list.
class GroupedLexicase {
public:
    GroupedLexicase(const ErrorMatrix& pop, std::span<const int> cases) {
        std::vector<int> class_to_group;  // dense storage class ids -> group
        std::unordered_map<std::uint64_t, std::vector<int>> groups_by_hash;
        const int n = pop.individuals();
        for (int i = 0; i < n; ++i) {
            const auto cls = static_cast<std::size_t>(pop.row_class(i));
            if (cls >= class_to_group.size()) class_to_group.resize(cls + 1, -1);
            int g = class_to_group[cls];
            if (g < 0) {
                const double* row = pop.row_data(i);
                auto& bucket = groups_by_hash[hash_cells(row, cases)];
                for (int candidate : bucket) {
                    const double* other = rep_[static_cast<std::size_t>(candidate)];
                    bool equal = true;
                    for (int c : cases) {
                        if (row[c] != other[c]) {
                            equal = false;
                            break;
                        }
                    }
                    if (equal) {
                        g = candidate;
                        break;
                    }
                }
                if (g < 0) {
                    g = static_cast<int>(rep_.size());
                    rep_.push_back(row);
                    members_.emplace_back();
                    bucket.push_back(g);
                }
                class_to_group[cls] = g;
            }
            members_[static_cast<std::size_t>(g)].push_back(i);
        }
    }

    // case_order must be a permutation (or duplication) of the construction
    // case set. Consumes one bounded draw iff the winner's group has more
    // than one member.
    int select(std::span<const int> case_order, SeededRng& rng) {
        alive_.clear();
        for (int g = 0; g < static_cast<int>(rep_.size()); ++g) alive_.push_back(g);
        for (int c : case_order) {
            if (alive_.size() == 1) break;
            double min = std::numeric_limits<double>::infinity();
            for (int g : alive_) {
                const double e = rep_[static_cast<std::size_t>(g)][c];
                if (e < min) min = e;
            }
            next_.clear();
            for (int g : alive_) {
                if (rep_[static_cast<std::size_t>(g)][c] == min) next_.push_back(g);
            }
            alive_.swap(next_);
        }
        const auto& members = members_[static_cast<std::size_t>(alive_.front())];
        if (members.size() == 1) return members.front();
        return members[uniform_below(rng, members.size())];
    }

private:
    std::vector<const double*> rep_;
    std::vector<std::vector<int>> members_;
    std::vector<int> alive_, next_;
};

void check_cases(const ErrorMatrix& pop, std::span<const int> cases, const char* who) {
    if (cases.empty()) {
        throw std::invalid_argument(std::string(who) + ": case list must not be empty");
    }
    for (int c : cases) {
        if (c < 0 || c >= pop.cases()) {
            throw std::out_of_range(std::string(who) + ": case index out of range");
        }
    }
}

}  // namespace

int lexicase_select_one(const ErrorMatrix& pop, std::span<const int> case_order, SeededRng& rng) {
    check_cases(pop, case_order, "lexicase_select_one");
    GroupedLexicase engine(pop, case_order);
    return engine.select(case_order, rng);
}

SelectionOutcome select_parents(const ErrorMatrix& pop, int n_parents, std::span<const int> cases,
                                SeededRng& rng) {
    if (n_parents < 1) {
        throw std::invalid_argument("select_parents: need at least one parent");
    }
    check_cases(pop, cases, "select_parents");

    GroupedLexicase engine(pop, cases);
    SelectionOutcome out;
    out.seed = rng.seed();
    out.cases_used.assign(cases.begin(), cases.end());
    out.parent_rows.reserve(static_cast<std::size_t>(n_parents));
    std::vector<int> order(cases.begin(), cases.end());
    for (int p = 0; p < n_parents; ++p) {
        fisher_yates_shuffle(order, rng);
        out.parent_rows.push_back(engine.select(order, rng));
    }
    return out;
}

}  // namespace lexids
