#include "ntd/augmentation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "ntd/errors.hpp"
#include "ntd/rng.hpp"

namespace ntd {

PolicyCounts policy_counts_for(int total) {
    if (total < 1) {
        throw ConfigError("policy_counts_for: |Pi| must be at least 1, got " +
                          std::to_string(total));
    }
    PolicyCounts counts;
    counts.jitter_count = (total - 1 + 1) / 2;  // ceil of (total-1)/2
    counts.dropout_count = total - 1 - counts.jitter_count;
    return counts;
}

AugmentationPolicySet::AugmentationPolicySet(std::uint64_t seed, int feature_dim,
                                             std::vector<double> jitter_sigma, int jitter_count,
                                             int dropout_count, double dropout_rate)
    : seed_(seed),
      feature_dim_(feature_dim),
      jitter_sigma_(std::move(jitter_sigma)),
      jitter_count_(jitter_count),
      dropout_count_(dropout_count),
      dropout_rate_(dropout_rate) {
    if (feature_dim < 1) {
        throw std::invalid_argument("AugmentationPolicySet: feature_dim must be positive");
    }
    if (jitter_count < 0 || dropout_count < 0) {
        throw std::invalid_argument("AugmentationPolicySet: policy counts must be non-negative");
    }
    if (jitter_count > 0 && static_cast<int>(jitter_sigma_.size()) != feature_dim) {
        throw DimensionError("AugmentationPolicySet: jitter_sigma has size " +
                             std::to_string(jitter_sigma_.size()) + ", expected " +
                             std::to_string(feature_dim));
    }
    if (!(dropout_rate >= 0.0 && dropout_rate <= 1.0)) {
        throw std::invalid_argument("AugmentationPolicySet: dropout_rate must be in [0, 1]");
    }
}

AugmentationPolicySet AugmentationPolicySet::identity_only(std::uint64_t seed, int feature_dim) {
    return AugmentationPolicySet(seed, feature_dim, {}, 0, 0, 0.0);
}

AugmentationPolicySet AugmentationPolicySet::make(std::uint64_t seed, PolicyCounts counts,
                                                  double jitter_scale, double dropout_rate,
                                                  std::span<const double> feature_std) {
    std::vector<double> sigma(feature_std.size());
    for (std::size_t j = 0; j < feature_std.size(); ++j) {
        sigma[j] = jitter_scale * feature_std[j];
    }
    return AugmentationPolicySet(seed, static_cast<int>(feature_std.size()), std::move(sigma),
                                 counts.jitter_count, counts.dropout_count, dropout_rate);
}

std::vector<double> AugmentationPolicySet::apply(std::size_t policy_index,
                                                 std::span<const double> x,
                                                 std::uint64_t sample_id) const {
    std::vector<double> out;
    apply_into(policy_index, x, sample_id, out);
    return out;
}

void AugmentationPolicySet::apply_into(std::size_t policy_index, std::span<const double> x,
                                       std::uint64_t sample_id, std::vector<double>& out) const {
    if (policy_index >= count()) {
        throw std::out_of_range("AugmentationPolicySet::apply: policy index " +
                                std::to_string(policy_index) + " out of range, |Pi| = " +
                                std::to_string(count()));
    }
    if (static_cast<int>(x.size()) != feature_dim_) {
        throw DimensionError("AugmentationPolicySet::apply: input has dimension " +
                             std::to_string(x.size()) + ", expected " +
                             std::to_string(feature_dim_));
    }
    out.assign(x.begin(), x.end());
    if (policy_index == 0) {
        return;
    }
    rng::SmallEngine eng(rng::derive(seed_, policy_index, sample_id));
    if (policy_index <= static_cast<std::size_t>(jitter_count_)) {
        std::normal_distribution<double> noise(0.0, 1.0);
        for (int j = 0; j < feature_dim_; ++j) {
            out[static_cast<std::size_t>(j)] +=
                jitter_sigma_[static_cast<std::size_t>(j)] * noise(eng);
        }
    } else {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int j = 0; j < feature_dim_; ++j) {
            if (u(eng) < dropout_rate_) {
                out[static_cast<std::size_t>(j)] = 0.0;
            }
        }
    }
}

double tta_mean_loss(std::span<const double> x, int noisy_label, std::uint64_t sample_id,
                     const SoftmaxClassifier& model, const AugmentationPolicySet& policies) {
    const std::size_t n = policies.count();
    double sum = 0.0;
    double comp = 0.0;  // Kahan compensation
    std::vector<double> view;
    for (std::size_t i = 0; i < n; ++i) {
        policies.apply_into(i, x, sample_id, view);
        const double loss = model.cross_entropy(view, noisy_label);
        if (!std::isfinite(loss)) {
            throw NonFiniteError("tta_mean_loss: non-finite loss under policy " +
                                 std::to_string(i) + " for sample id " +
                                 std::to_string(sample_id));
        }
        const double y = loss - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(n);
}

}  // namespace ntd
