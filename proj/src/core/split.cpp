#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "femkit/core.hpp"
#include "femkit/util.hpp"

namespace femkit::core {
namespace {

constexpr std::size_t kSplits = 3;

void check_spec(const SplitSpec& spec) {
    const double fractions[kSplits] = {spec.train_fraction, spec.val_fraction,
                                       spec.test_fraction};
    double sum = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0 && f < 1.0)) {
            throw SplitSpecError("each split fraction must lie in (0, 1)");
        }
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw SplitSpecError("split fractions must sum to 1");
    }
}

// Largest-remainder rounding of n * fraction_s to integers summing to n.
std::array<std::size_t, kSplits> apportion(std::size_t n, const double* fractions) {
    std::array<std::size_t, kSplits> sizes{};
    std::array<double, kSplits> frac_part{};
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < kSplits; ++s) {
        double target = static_cast<double>(n) * fractions[s];
        sizes[s] = static_cast<std::size_t>(std::floor(target));
        frac_part[s] = target - std::floor(target);
        assigned += sizes[s];
    }
    std::array<std::size_t, kSplits> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac_part[a] > frac_part[b]; });
    for (std::size_t k = 0; assigned < n; ++k) {
        ++sizes[order[k % kSplits]];
        ++assigned;
    }
    return sizes;
}

} // namespace

CorpusSplits split_corpus(const Corpus& corpus, const SplitSpec& spec) {
    check_spec(spec);
    const std::size_t n = corpus.size();
    const double fractions[kSplits] = {spec.train_fraction, spec.val_fraction,
                                       spec.test_fraction};
    if (n == 0) throw TooFewSamples("corpus is empty");

    auto sizes = apportion(n, fractions);
    for (std::size_t s = 0; s < kSplits; ++s) {
        if (sizes[s] == 0) {
            throw TooFewSamples("corpus of " + std::to_string(n) +
                                " samples leaves an empty split");
        }
    }

    // Group sample indices; one group per label when stratifying.
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        int key = spec.stratify_by_label ? corpus.samples[i].label : 0;
        groups[key].push_back(i);
    }

    // Per-(group, split) quotas: floor each real target, then hand out the
    // leftover units by descending fractional part, respecting both the
    // group totals and the global split sizes. Keeps every split's label
    // ratio within one sample of the global ratio.
    struct Cell {
        int group;
        std::size_t split;
        double frac;
    };
    std::map<int, std::array<std::size_t, kSplits>> quota;
    std::map<int, std::size_t> group_left;
    std::array<std::size_t, kSplits> split_left = sizes;
    std::vector<Cell> cells;
    for (const auto& [label, members] : groups) {
        auto& q = quota[label];
        std::size_t assigned = 0;
        for (std::size_t s = 0; s < kSplits; ++s) {
            double target = static_cast<double>(members.size()) * fractions[s];
            q[s] = static_cast<std::size_t>(std::floor(target));
            assigned += q[s];
            split_left[s] -= q[s];
            cells.push_back({label, s, target - std::floor(target)});
        }
        group_left[label] = members.size() - assigned;
    }
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.frac != b.frac) return a.frac > b.frac;
        if (a.group != b.group) return a.group < b.group;
        return a.split < b.split;
    });
    bool progress = true;
    while (progress) {
        progress = false;
        for (const Cell& c : cells) {
            if (group_left[c.group] > 0 && split_left[c.split] > 0) {
                ++quota[c.group][c.split];
                --group_left[c.group];
                --split_left[c.split];
                progress = true;
            }
        }
    }

    // Shuffle each group with the spec seed, then slice by quota. Selected
    // indices are re-sorted so each split preserves corpus order.
    std::mt19937_64 rng(spec.seed);
    std::array<std::vector<std::size_t>, kSplits> picks;
    for (auto& [label, members] : groups) {
        util::deterministic_shuffle(members, rng);
        std::size_t offset = 0;
        for (std::size_t s = 0; s < kSplits; ++s) {
            for (std::size_t k = 0; k < quota[label][s]; ++k) {
                picks[s].push_back(members[offset + k]);
            }
            offset += quota[label][s];
        }
    }

    CorpusSplits out;
    Corpus* dests[kSplits] = {&out.train, &out.val, &out.test};
    const char* suffix[kSplits] = {".train", ".val", ".test"};
    for (std::size_t s = 0; s < kSplits; ++s) {
        std::sort(picks[s].begin(), picks[s].end());
        dests[s]->name = corpus.name + suffix[s];
        dests[s]->schema_version = corpus.schema_version;
        dests[s]->samples.reserve(picks[s].size());
        for (std::size_t idx : picks[s]) dests[s]->samples.push_back(corpus.samples[idx]);
    }
    return out;
}

} // namespace femkit::core
