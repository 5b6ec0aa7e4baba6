#ifndef NTD_AUGMENTATION_HPP
#define NTD_AUGMENTATION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ntd/model.hpp"

namespace ntd {

// How a policy count splits into families: one identity, then jitters,
// then dropouts.
struct PolicyCounts {
    int jitter_count = 4;
    int dropout_count = 3;
};

// Split a total policy count |Pi| >= 1 as identity + jitters + dropouts.
PolicyCounts policy_counts_for(int total);

// Seeded set of feature-space transforms. Policy 0 is always the
// identity; policies 1..jitter_count add per-dimension Gaussian jitter;
// the remainder zero coordinates independently with dropout_rate.
//
// Randomness is derived from hash(seed, policy_index, sample_id), so a
// policy applied to the same sample always replays the same transform
// regardless of evaluation order.
class AugmentationPolicySet {
public:
    AugmentationPolicySet(std::uint64_t seed, int feature_dim, std::vector<double> jitter_sigma,
                          int jitter_count, int dropout_count, double dropout_rate);

    static AugmentationPolicySet identity_only(std::uint64_t seed, int feature_dim);

    // jitter_sigma[j] = jitter_scale * feature_std[j].
    static AugmentationPolicySet make(std::uint64_t seed, PolicyCounts counts, double jitter_scale,
                                      double dropout_rate, std::span<const double> feature_std);

    std::size_t count() const noexcept { return static_cast<std::size_t>(1 + jitter_count_ + dropout_count_); }
    int feature_dim() const noexcept { return feature_dim_; }

    std::vector<double> apply(std::size_t policy_index, std::span<const double> x,
                              std::uint64_t sample_id) const;

    // Same transform written into a caller-owned buffer, which is
    // resized to the feature dimension. Lets scoring loops reuse one
    // allocation across views.
    void apply_into(std::size_t policy_index, std::span<const double> x, std::uint64_t sample_id,
                    std::vector<double>& out) const;

private:
    std::uint64_t seed_;
    int feature_dim_;
    std::vector<double> jitter_sigma_;
    int jitter_count_;
    int dropout_count_;
    double dropout_rate_;
};

// Mean cross-entropy of the model over every augmented view of x
// against the noisy label. The mean is compensated-summed so policy
// order cannot perturb it.
double tta_mean_loss(std::span<const double> x, int noisy_label, std::uint64_t sample_id,
                     const SoftmaxClassifier& model, const AugmentationPolicySet& policies);

}  // namespace ntd

#endif  // NTD_AUGMENTATION_HPP
