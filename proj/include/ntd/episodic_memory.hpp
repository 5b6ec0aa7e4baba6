#ifndef NTD_EPISODIC_MEMORY_HPP
#define NTD_EPISODIC_MEMORY_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ntd/sample.hpp"

namespace ntd {

enum class InsertOutcome {
    kStoredDirectly,
    kEvictionRequired,
};

// Capacity-bounded store partitioned into per-noisy-label groups.
//
// Insertion follows an insert-then-evict protocol: once the memory is
// full, insert() appends the arrival anyway (size becomes capacity + 1
// transiently) and returns kEvictionRequired; the caller must then call
// debias_evict() with mean-loss scores before the step completes. The
// evicted sample is the highest-scoring member of the largest group,
// so group sizes are pushed toward equality while high-loss (likely
// mislabeled) samples are dropped first.
//
// Tie-breaks are deterministic: among equally large groups the smallest
// class index is selected, and among equal scores the smallest id (the
// oldest sample) is evicted.
class EpisodicMemory {
public:
    EpisodicMemory(std::size_t capacity, int num_classes);

    // Appends the sample to its noisy-label group. Duplicate detection
    // covers resident samples only, so the structure stays bounded.
    InsertOutcome insert(Sample sample);

    // Removes and returns the highest-scoring member of the selected
    // group. Requires a pending tentative insert (size == capacity + 1)
    // and a score for every member of the selected group.
    Sample debias_evict(const std::unordered_map<std::uint64_t, double>& scores);

    // The group debias_evict will draw from: the largest group, smallest
    // class index on ties. Lets callers score only the members that can
    // actually be evicted. Requires a non-empty memory.
    int eviction_group() const;

    // Current size of every group, indexed by class; absent classes are 0.
    std::vector<std::size_t> group_sizes() const;

    // Fraction of stored samples whose noisy label equals the true label.
    double clean_ratio() const;

    std::size_t size() const noexcept { return size_; }
    std::size_t capacity() const noexcept { return capacity_; }
    int num_classes() const noexcept { return num_classes_; }
    bool eviction_pending() const noexcept { return size_ > capacity_; }

    const std::vector<Sample>& group(int label) const;
    bool contains(std::uint64_t id) const { return ids_.count(id) != 0; }

    // All stored samples in class order, insertion order within a group.
    std::vector<const Sample*> all_samples() const;

    // Writes one {id, noisy_label, true_label, group_position} record
    // per line in class order.
    void dump(std::ostream& out) const;

private:
    std::size_t capacity_;
    int num_classes_;
    std::size_t size_ = 0;
    std::vector<std::vector<Sample>> groups_;
    std::unordered_set<std::uint64_t> ids_;
};

}  // namespace ntd

#endif  // NTD_EPISODIC_MEMORY_HPP
