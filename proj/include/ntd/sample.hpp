#ifndef NTD_SAMPLE_HPP
#define NTD_SAMPLE_HPP

#include <cstdint>
#include <vector>

namespace ntd {

// One stream element. true_label is carried for evaluation only; the
// sampler and the learner never read it.
struct Sample {
    std::uint64_t id = 0;
    std::vector<double> features;
    int noisy_label = 0;
    int true_label = 0;
};

}  // namespace ntd

#endif  // NTD_SAMPLE_HPP
