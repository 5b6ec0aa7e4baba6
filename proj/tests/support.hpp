#pragma once

// Independent oracles for the test suites. Each one re-derives its
// target quantity from scratch, by a different route than the library
// (sort-based selection, long-double naive summation, finite
// differences), so agreement is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ntd/episodic_memory.hpp"
#include "ntd/sample.hpp"

namespace testsupport {

struct ScoredMember {
    std::uint64_t id = 0;
    double score = 0.0;
};

struct EvictionChoice {
    int group = -1;
    std::uint64_t id = 0;
};

// Literal eviction rule: the largest group wins, smallest class index
// on ties; inside it the highest score wins, smallest id on ties.
// Implemented by sorting explicit candidate lists.
inline EvictionChoice oracle_evict(const std::map<int, std::vector<ScoredMember>>& groups) {
    std::vector<std::pair<std::size_t, int>> by_size;
    for (const auto& [label, members] : groups) {
        if (!members.empty()) {
            by_size.emplace_back(members.size(), label);
        }
    }
    std::sort(by_size.begin(), by_size.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return a.second < b.second;
    });
    const int chosen_group = by_size.front().second;

    std::vector<ScoredMember> members = groups.at(chosen_group);
    std::sort(members.begin(), members.end(), [](const ScoredMember& a, const ScoredMember& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.id < b.id;
    });
    return EvictionChoice{chosen_group, members.front().id};
}

// Naive softmax probabilities in long double, no max-shift tricks.
inline std::vector<double> naive_softmax(const std::vector<double>& weights,
                                         const std::vector<double>& bias, int num_classes,
                                         int feature_dim, std::span<const double> x) {
    std::vector<long double> z(static_cast<std::size_t>(num_classes));
    for (int c = 0; c < num_classes; ++c) {
        long double acc = bias[static_cast<std::size_t>(c)];
        for (int j = 0; j < feature_dim; ++j) {
            acc += static_cast<long double>(weights[static_cast<std::size_t>(c * feature_dim + j)]) *
                   x[static_cast<std::size_t>(j)];
        }
        z[static_cast<std::size_t>(c)] = acc;
    }
    const long double mx = *std::max_element(z.begin(), z.end());
    long double total = 0.0L;
    for (auto& v : z) {
        v = std::exp(v - mx);
        total += v;
    }
    std::vector<double> probs(z.size());
    for (std::size_t c = 0; c < z.size(); ++c) {
        probs[c] = static_cast<double>(z[c] / total);
    }
    return probs;
}

// Cross-entropy in nats from the naive softmax path.
inline double naive_cross_entropy(const std::vector<double>& weights,
                                  const std::vector<double>& bias, int num_classes,
                                  int feature_dim, std::span<const double> x, int label) {
    std::vector<long double> z(static_cast<std::size_t>(num_classes));
    for (int c = 0; c < num_classes; ++c) {
        long double acc = bias[static_cast<std::size_t>(c)];
        for (int j = 0; j < feature_dim; ++j) {
            acc += static_cast<long double>(weights[static_cast<std::size_t>(c * feature_dim + j)]) *
                   x[static_cast<std::size_t>(j)];
        }
        z[static_cast<std::size_t>(c)] = acc;
    }
    const long double mx = *std::max_element(z.begin(), z.end());
    long double total = 0.0L;
    for (long double v : z) {
        total += std::exp(v - mx);
    }
    const long double loss = mx + std::log(total) - z[static_cast<std::size_t>(label)];
    return static_cast<double>(loss < 0.0L ? 0.0L : loss);
}

// Summed batch cross-entropy as a plain function of raw parameters,
// for finite differencing.
inline double oracle_batch_loss(const std::vector<double>& weights,
                                const std::vector<double>& bias, int num_classes, int feature_dim,
                                const std::vector<ntd::Sample>& batch) {
    double total = 0.0;
    for (const auto& s : batch) {
        total += naive_cross_entropy(weights, bias, num_classes, feature_dim, s.features,
                                     s.noisy_label);
    }
    return total;
}

struct FdGradient {
    std::vector<double> weights;
    std::vector<double> bias;
};

// Central finite differences of the summed batch loss over every
// parameter.
inline FdGradient fd_gradient(std::vector<double> weights, std::vector<double> bias,
                              int num_classes, int feature_dim,
                              const std::vector<ntd::Sample>& batch, double eps) {
    FdGradient grad;
    grad.weights.resize(weights.size());
    grad.bias.resize(bias.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double saved = weights[i];
        weights[i] = saved + eps;
        const double up = oracle_batch_loss(weights, bias, num_classes, feature_dim, batch);
        weights[i] = saved - eps;
        const double down = oracle_batch_loss(weights, bias, num_classes, feature_dim, batch);
        weights[i] = saved;
        grad.weights[i] = (up - down) / (2.0 * eps);
    }
    for (std::size_t c = 0; c < bias.size(); ++c) {
        const double saved = bias[c];
        bias[c] = saved + eps;
        const double up = oracle_batch_loss(weights, bias, num_classes, feature_dim, batch);
        bias[c] = saved - eps;
        const double down = oracle_batch_loss(weights, bias, num_classes, feature_dim, batch);
        bias[c] = saved;
        grad.bias[c] = (up - down) / (2.0 * eps);
    }
    return grad;
}

// Relative error with a floor so near-zero gradients compare by
// absolute difference.
inline double relative_error(double a, double b, double floor = 1e-3) {
    const double scale = std::max({floor, std::abs(a), std::abs(b)});
    return std::abs(a - b) / scale;
}

// Pearson chi-square statistic against a uniform expectation.
inline double chi_square_uniform(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) {
        total += c;
    }
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (std::size_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

inline ntd::Sample make_sample(std::uint64_t id, int noisy_label, int true_label,
                               std::vector<double> features = {0.0}) {
    ntd::Sample s;
    s.id = id;
    s.features = std::move(features);
    s.noisy_label = noisy_label;
    s.true_label = true_label;
    return s;
}

inline std::vector<double> random_features(std::mt19937_64& eng, int dim, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    std::vector<double> out(static_cast<std::size_t>(dim));
    for (auto& v : out) {
        v = gauss(eng);
    }
    return out;
}

// One randomized eviction round: fill a fresh memory to capacity plus
// one, evict through the library, and replay the decision through
// oracle_evict. Returns true when both agree exactly. Scores are drawn
// from a small discrete pool half the time so ties are frequent.
inline bool eviction_round_matches_oracle(std::mt19937_64& eng) {
    std::uniform_int_distribution<int> pick_classes(2, 8);
    std::uniform_int_distribution<int> pick_capacity(3, 40);
    const int num_classes = pick_classes(eng);
    const std::size_t capacity = static_cast<std::size_t>(pick_capacity(eng));

    std::uniform_int_distribution<int> pick_label(0, num_classes - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> pick_tier(0, 3);
    std::uniform_real_distribution<double> pick_score(0.0, 1.0);
    constexpr double kTiers[] = {0.0, 0.25, 0.5, 1.0};

    ntd::EpisodicMemory memory(capacity, num_classes);
    std::map<int, std::vector<ScoredMember>> groups;
    std::unordered_map<std::uint64_t, double> scores;
    for (std::uint64_t id = 0; id <= capacity; ++id) {
        const int label = pick_label(eng);
        const double score = coin(eng) ? kTiers[pick_tier(eng)] : pick_score(eng);
        memory.insert(make_sample(id, label, label));
        groups[label].push_back(ScoredMember{id, score});
        scores.emplace(id, score);
    }

    const EvictionChoice expected = oracle_evict(groups);
    const ntd::Sample evicted = memory.debias_evict(scores);
    return evicted.noisy_label == expected.group && evicted.id == expected.id &&
           memory.size() == capacity && !memory.contains(expected.id);
}

// Counts disagreements over a batch of randomized rounds.
inline int eviction_oracle_mismatches(std::uint64_t seed, int rounds) {
    std::mt19937_64 eng(seed);
    int mismatches = 0;
    for (int r = 0; r < rounds; ++r) {
        if (!eviction_round_matches_oracle(eng)) {
            ++mismatches;
        }
    }
    return mismatches;
}

}  // namespace testsupport
