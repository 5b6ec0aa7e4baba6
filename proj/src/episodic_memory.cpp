#include "ntd/episodic_memory.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ntd/errors.hpp"

namespace ntd {

EpisodicMemory::EpisodicMemory(std::size_t capacity, int num_classes)
    : capacity_(capacity), num_classes_(num_classes) {
    if (capacity == 0) {
        throw std::invalid_argument("EpisodicMemory: capacity must be positive");
    }
    if (num_classes < 1) {
        throw std::invalid_argument("EpisodicMemory: num_classes must be positive");
    }
    groups_.resize(static_cast<std::size_t>(num_classes));
}

InsertOutcome EpisodicMemory::insert(Sample sample) {
    if (sample.noisy_label < 0 || sample.noisy_label >= num_classes_) {
        throw std::invalid_argument("EpisodicMemory::insert: noisy_label " +
                                    std::to_string(sample.noisy_label) + " outside [0, " +
                                    std::to_string(num_classes_) + ")");
    }
    if (size_ > capacity_) {
        throw ProtocolViolationError(
            "EpisodicMemory::insert: an eviction is pending; call debias_evict first");
    }
    if (!ids_.insert(sample.id).second) {
        throw DuplicateIdError("EpisodicMemory::insert: duplicate sample id " +
                               std::to_string(sample.id));
    }
    groups_[static_cast<std::size_t>(sample.noisy_label)].push_back(std::move(sample));
    ++size_;
    return size_ <= capacity_ ? InsertOutcome::kStoredDirectly : InsertOutcome::kEvictionRequired;
}

int EpisodicMemory::eviction_group() const {
    if (size_ == 0) {
        throw EmptyMemoryError("EpisodicMemory::eviction_group: memory is empty");
    }
    // Largest group, smallest class index on ties.
    std::size_t max_size = 0;
    std::size_t selected = 0;
    for (std::size_t c = 0; c < groups_.size(); ++c) {
        if (groups_[c].size() > max_size) {
            max_size = groups_[c].size();
            selected = c;
        }
    }
    return static_cast<int>(selected);
}

Sample EpisodicMemory::debias_evict(const std::unordered_map<std::uint64_t, double>& scores) {
    if (size_ != capacity_ + 1) {
        throw ProtocolViolationError("EpisodicMemory::debias_evict: size is " +
                                     std::to_string(size_) + ", expected capacity + 1 = " +
                                     std::to_string(capacity_ + 1));
    }
    const std::size_t selected = static_cast<std::size_t>(eviction_group());

    // Highest score, smallest id on ties.
    auto& group = groups_[selected];
    std::size_t best = group.size();
    double best_score = 0.0;
    for (std::size_t i = 0; i < group.size(); ++i) {
        auto it = scores.find(group[i].id);
        if (it == scores.end()) {
            throw IncompleteScoresError("EpisodicMemory::debias_evict: no score for sample id " +
                                        std::to_string(group[i].id) + " in selected group " +
                                        std::to_string(selected));
        }
        const double score = it->second;
        if (best == group.size() || score > best_score ||
            (score == best_score && group[i].id < group[best].id)) {
            best = i;
            best_score = score;
        }
    }

    Sample evicted = std::move(group[best]);
    group.erase(group.begin() + static_cast<std::ptrdiff_t>(best));
    ids_.erase(evicted.id);
    --size_;
    return evicted;
}

std::vector<std::size_t> EpisodicMemory::group_sizes() const {
    std::vector<std::size_t> sizes(groups_.size());
    for (std::size_t c = 0; c < groups_.size(); ++c) {
        sizes[c] = groups_[c].size();
    }
    return sizes;
}

double EpisodicMemory::clean_ratio() const {
    if (size_ == 0) {
        throw EmptyMemoryError("EpisodicMemory::clean_ratio: undefined for an empty memory");
    }
    std::size_t clean = 0;
    for (const auto& g : groups_) {
        for (const auto& s : g) {
            if (s.noisy_label == s.true_label) {
                ++clean;
            }
        }
    }
    return static_cast<double>(clean) / static_cast<double>(size_);
}

const std::vector<Sample>& EpisodicMemory::group(int label) const {
    if (label < 0 || label >= num_classes_) {
        throw std::invalid_argument("EpisodicMemory::group: label out of range");
    }
    return groups_[static_cast<std::size_t>(label)];
}

std::vector<const Sample*> EpisodicMemory::all_samples() const {
    std::vector<const Sample*> out;
    out.reserve(size_);
    for (const auto& g : groups_) {
        for (const auto& s : g) {
            out.push_back(&s);
        }
    }
    return out;
}

void EpisodicMemory::dump(std::ostream& out) const {
    for (const auto& g : groups_) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            nlohmann::json record = {
                {"id", g[i].id},
                {"noisy_label", g[i].noisy_label},
                {"true_label", g[i].true_label},
                {"group_position", i},
            };
            out << record.dump() << '\n';
        }
    }
}

}  // namespace ntd
