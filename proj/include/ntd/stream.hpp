#ifndef NTD_STREAM_HPP
#define NTD_STREAM_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "ntd/sample.hpp"

namespace ntd {

enum class NoiseType {
    kSymmetric,   // flip to a uniformly random other class
    kAsymmetric,  // flip to the cyclic successor within the task's class set
};

struct StreamSpec {
    int num_classes = 10;
    int feature_dim = 32;
    int samples_per_task = 2000;
    int num_tasks = 5;
    // Disjoint class subsets, one per task. Empty means a contiguous
    // near-equal split of [0, num_classes).
    std::vector<std::vector<int>> classes_per_task;
    double boundary_fuzz = 0.1;  // fraction of a task blended at each boundary, < 0.5
    NoiseType noise_type = NoiseType::kSymmetric;
    double noise_rate = 0.4;
    // Isotropic per-class spread.  Class means scale with it, so it sets
    // the overall feature magnitude; the default keeps a summed-batch
    // gradient step stable at the default learning rates (the update is
    // proportional to the squared feature norm).
    double sigma_data = 0.15;
    std::uint64_t seed = 1;

    void validate() const;
    std::vector<std::vector<int>> task_partition() const;
};

struct ClassGenerators {
    std::vector<std::vector<double>> means;  // one per class
    double sigma = 1.0;
};

// Class means on a seeded random sphere, rejection-sampled so every
// pair is at least 9.5 sigma apart (near the orthogonal limit at the
// default radius, which keeps per-class training from disturbing the
// other classes' logits); the radius escalates if placement keeps
// failing.
ClassGenerators make_class_generators(const StreamSpec& spec);

struct Stream {
    std::vector<Sample> samples;
    std::vector<int> task_index;  // parallel to samples; the span's task
};

// Task-ordered stream with linearly cross-faded boundaries and injected
// label noise. Fully determined by spec.seed.
Stream generate_stream(const StreamSpec& spec);

// With probability noise_rate replaces the label: symmetric noise draws
// uniformly over the other classes, asymmetric noise picks the fixed
// successor inside the task's class set.
int inject_noise(int true_label, const StreamSpec& spec, std::mt19937_64& rng);

// Noise-free samples drawn uniformly over all classes, on an RNG stream
// disjoint from training.
std::vector<Sample> make_test_set(const StreamSpec& spec, std::size_t size);

// Line-delimited {id, features, noisy_label, true_label, task_index}
// records; import is the exact inverse.
void export_stream(const Stream& stream, std::ostream& out);
Stream import_stream(std::istream& in);

// Per-dimension standard deviation over a sample set (population form).
std::vector<double> feature_std(const std::vector<Sample>& samples);

}  // namespace ntd

#endif  // NTD_STREAM_HPP
