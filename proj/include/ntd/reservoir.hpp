#ifndef NTD_RESERVOIR_HPP
#define NTD_RESERVOIR_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "ntd/sample.hpp"

namespace ntd {

// Classic algorithm-R reservoir: after n observations every item has
// been retained with probability capacity / n. Comparison baseline for
// the debiasing memory.
class ReservoirMemory {
public:
    ReservoirMemory(std::size_t capacity, std::uint64_t seed);

    void observe(Sample sample);

    const std::vector<Sample>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t seen() const noexcept { return seen_; }

    double clean_ratio() const;
    std::vector<std::size_t> group_sizes(int num_classes) const;
    std::vector<const Sample*> all_samples() const;

private:
    std::size_t capacity_;
    std::vector<Sample> items_;
    std::size_t seen_ = 0;
    std::mt19937_64 rng_;
};

}  // namespace ntd

#endif  // NTD_RESERVOIR_HPP
