#include "ntd/reservoir.hpp"

#include <stdexcept>
#include <string>

#include "ntd/errors.hpp"

namespace ntd {

ReservoirMemory::ReservoirMemory(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {
    if (capacity == 0) {
        throw std::invalid_argument("ReservoirMemory: capacity must be positive");
    }
    items_.reserve(capacity);
}

void ReservoirMemory::observe(Sample sample) {
    ++seen_;
    if (items_.size() < capacity_) {
        items_.push_back(std::move(sample));
        return;
    }
    std::uniform_int_distribution<std::size_t> pick(0, seen_ - 1);
    const std::size_t slot = pick(rng_);
    if (slot < capacity_) {
        items_[slot] = std::move(sample);
    }
}

double ReservoirMemory::clean_ratio() const {
    if (items_.empty()) {
        throw EmptyMemoryError("ReservoirMemory::clean_ratio: undefined for an empty reservoir");
    }
    std::size_t clean = 0;
    for (const auto& s : items_) {
        if (s.noisy_label == s.true_label) {
            ++clean;
        }
    }
    return static_cast<double>(clean) / static_cast<double>(items_.size());
}

std::vector<std::size_t> ReservoirMemory::group_sizes(int num_classes) const {
    if (num_classes < 1) {
        throw std::invalid_argument("ReservoirMemory::group_sizes: num_classes must be positive");
    }
    std::vector<std::size_t> sizes(static_cast<std::size_t>(num_classes), 0);
    for (const auto& s : items_) {
        if (s.noisy_label >= 0 && s.noisy_label < num_classes) {
            ++sizes[static_cast<std::size_t>(s.noisy_label)];
        }
    }
    return sizes;
}

std::vector<const Sample*> ReservoirMemory::all_samples() const {
    std::vector<const Sample*> out;
    out.reserve(items_.size());
    for (const auto& s : items_) {
        out.push_back(&s);
    }
    return out;
}

}  // namespace ntd
