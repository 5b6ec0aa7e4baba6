#ifndef NTD_EXPERIMENT_HPP
#define NTD_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ntd/stream.hpp"

namespace ntd {

enum class SamplerKind {
    kNtd,
    kReservoir,
};

std::string sampler_name(SamplerKind kind);
SamplerKind sampler_from_name(const std::string& name);

struct ExperimentConfig {
    StreamSpec stream;
    std::size_t memory_size = 500;
    int batch_size = 16;
    int tta_policies = 8;
    double jitter_scale = 0.1;
    double dropout_rate = 0.1;
    double online_lr = 0.05;
    double memory_lr = 0.01;
    int mem_epochs = 32;
    bool defer_memory_training = false;  // train on memory only after the final task
    std::size_t test_size = 2000;
    std::vector<SamplerKind> samplers = {SamplerKind::kNtd};
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::string out_path = "results.json";

    void validate() const;
};

// Desk-scale defaults: 10 classes, 32 dims, 5 tasks x 2000 samples,
// memory 500, batch 16, |Pi| = 8, 3 seeds.
ExperimentConfig default_config();

struct StageTimes {
    double online_learning = 0.0;
    double episodic_memory_usage = 0.0;
    double overall = 0.0;
};

struct TrialMetrics {
    double last_test_accuracy = 0.0;
    double last_memory_clean_ratio = 0.0;
    std::vector<std::size_t> group_size_histogram;
    std::vector<double> online_loss_per_task;
    std::vector<double> accuracy_per_task;
    StageTimes wall_time;
    long peak_rss_kib = 0;  // informational only
};

struct TrialResult {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    TrialMetrics metrics;
};

struct AggregateStat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single trial
};

using Aggregate = std::map<std::string, AggregateStat>;

struct SamplerRun {
    SamplerKind sampler = SamplerKind::kNtd;
    std::vector<TrialResult> trials;
    Aggregate aggregate;
};

struct ExperimentResults {
    ExperimentConfig config;
    std::vector<SamplerRun> runs;
};

// The stream a trial consumes; depends only on the stream spec and the
// trial seed, never on the sampler.
Stream trial_stream(const ExperimentConfig& config, std::uint64_t seed);

// One full pass: online SGD over the stream with memory construction,
// per-task memory training, evaluation on a clean test set.
TrialMetrics run_trial(const ExperimentConfig& config, SamplerKind sampler, std::uint64_t seed);

// Every configured sampler over every configured seed. A failing trial
// is recorded and the remaining trials still run.
ExperimentResults run_experiment(const ExperimentConfig& config);

Aggregate aggregate_trials(const std::vector<TrialResult>& trials);

}  // namespace ntd

#endif  // NTD_EXPERIMENT_HPP
