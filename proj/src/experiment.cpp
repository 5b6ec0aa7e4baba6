#include "ntd/experiment.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "ntd/augmentation.hpp"
#include "ntd/episodic_memory.hpp"
#include "ntd/errors.hpp"
#include "ntd/model.hpp"
#include "ntd/reservoir.hpp"
#include "ntd/rng.hpp"

namespace ntd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

long peak_rss_kib() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) {
        return 0;
    }
    return usage.ru_maxrss;
}

// Scores the members of the group debias_evict will draw from, with
// the current model. Scores are recomputed at every eviction so they
// always reflect the evolving model; only the selected group is scored
// since only its members can be evicted.
void score_eviction_group(const EpisodicMemory& memory, const SoftmaxClassifier& model,
                          const AugmentationPolicySet& policies,
                          std::unordered_map<std::uint64_t, double>& scores) {
    scores.clear();
    for (const Sample& s : memory.group(memory.eviction_group())) {
        scores.emplace(s.id, tta_mean_loss(s.features, s.noisy_label, s.id, model, policies));
    }
}

}  // namespace

std::string sampler_name(SamplerKind kind) {
    return kind == SamplerKind::kNtd ? "ntd" : "reservoir";
}

SamplerKind sampler_from_name(const std::string& name) {
    if (name == "ntd") {
        return SamplerKind::kNtd;
    }
    if (name == "reservoir") {
        return SamplerKind::kReservoir;
    }
    throw ConfigError("unknown sampler '" + name + "', expected ntd or reservoir");
}

void ExperimentConfig::validate() const {
    stream.validate();
    if (memory_size < 1) {
        throw ConfigError("ExperimentConfig: memory_size must be at least 1");
    }
    if (batch_size < 1) {
        throw ConfigError("ExperimentConfig: batch_size must be at least 1");
    }
    if (tta_policies < 1) {
        throw ConfigError("ExperimentConfig: tta_policies must be at least 1");
    }
    if (!(jitter_scale >= 0.0)) {
        throw ConfigError("ExperimentConfig: jitter_scale must be non-negative");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate <= 1.0)) {
        throw ConfigError("ExperimentConfig: dropout_rate must lie in [0, 1]");
    }
    if (!(online_lr >= 0.0) || !(memory_lr >= 0.0)) {
        throw ConfigError("ExperimentConfig: learning rates must be non-negative");
    }
    if (mem_epochs < 1) {
        throw ConfigError("ExperimentConfig: mem_epochs must be at least 1");
    }
    if (test_size < static_cast<std::size_t>(stream.num_classes)) {
        throw ConfigError("ExperimentConfig: test_size must be at least num_classes");
    }
    if (samplers.empty()) {
        throw ConfigError("ExperimentConfig: at least one sampler is required");
    }
    if (seeds.empty()) {
        throw ConfigError("ExperimentConfig: at least one trial seed is required");
    }
}

ExperimentConfig default_config() {
    return ExperimentConfig{};
}

Stream trial_stream(const ExperimentConfig& config, std::uint64_t seed) {
    StreamSpec spec = config.stream;
    spec.seed = seed;
    return generate_stream(spec);
}

TrialMetrics run_trial(const ExperimentConfig& config, SamplerKind sampler, std::uint64_t seed) {
    config.validate();
    const auto trial_start = Clock::now();

    StreamSpec spec = config.stream;
    spec.seed = seed;
    const Stream stream = generate_stream(spec);
    const std::vector<Sample> test_set = make_test_set(spec, config.test_size);

    SoftmaxClassifier model(spec.num_classes, spec.feature_dim, config.online_lr,
                            rng::derive(seed, rng::kModelInit));
    const AugmentationPolicySet policies = AugmentationPolicySet::make(
        rng::derive(seed, rng::kTtaPolicies), policy_counts_for(config.tta_policies),
        config.jitter_scale, config.dropout_rate, feature_std(stream.samples));

    EpisodicMemory memory(config.memory_size, spec.num_classes);
    ReservoirMemory reservoir(config.memory_size, rng::derive(seed, rng::kReservoir));

    TrialMetrics metrics;
    double online_seconds = 0.0;
    double memory_seconds = 0.0;
    std::unordered_map<std::uint64_t, double> scores;
    std::vector<const Sample*> batch;

    const int per_task = spec.samples_per_task;
    for (int task = 0; task < spec.num_tasks; ++task) {
        const auto online_start = Clock::now();
        double task_loss = 0.0;
        int batches = 0;
        const int task_begin = task * per_task;
        const int task_end = task_begin + per_task;
        for (int start = task_begin; start < task_end; start += config.batch_size) {
            const int end = std::min(task_end, start + config.batch_size);
            batch.clear();
            for (int i = start; i < end; ++i) {
                batch.push_back(&stream.samples[static_cast<std::size_t>(i)]);
            }
            task_loss += model.sgd_step(batch);
            ++batches;

            for (int i = start; i < end; ++i) {
                const Sample& s = stream.samples[static_cast<std::size_t>(i)];
                if (sampler == SamplerKind::kReservoir) {
                    reservoir.observe(s);
                    continue;
                }
                if (memory.insert(s) == InsertOutcome::kEvictionRequired) {
                    score_eviction_group(memory, model, policies, scores);
                    memory.debias_evict(scores);
                }
            }
        }
        online_seconds += seconds_since(online_start);
        metrics.online_loss_per_task.push_back(task_loss / static_cast<double>(batches));

        const bool train_memory_now =
            !config.defer_memory_training || task + 1 == spec.num_tasks;
        if (train_memory_now) {
            const auto memory_start = Clock::now();
            const auto data = sampler == SamplerKind::kNtd ? memory.all_samples()
                                                           : reservoir.all_samples();
            model.set_learning_rate(config.memory_lr);
            train_on_samples(model, data, config.mem_epochs, config.batch_size,
                             rng::derive(seed, rng::kMemoryTrain, static_cast<std::uint64_t>(task)));
            model.set_learning_rate(config.online_lr);
            memory_seconds += seconds_since(memory_start);
        }
        metrics.accuracy_per_task.push_back(evaluate_accuracy(model, test_set));
    }

    metrics.last_test_accuracy = metrics.accuracy_per_task.back();
    if (sampler == SamplerKind::kNtd) {
        metrics.last_memory_clean_ratio = memory.clean_ratio();
        metrics.group_size_histogram = memory.group_sizes();
    } else {
        metrics.last_memory_clean_ratio = reservoir.clean_ratio();
        metrics.group_size_histogram = reservoir.group_sizes(spec.num_classes);
    }
    metrics.wall_time.online_learning = online_seconds;
    metrics.wall_time.episodic_memory_usage = memory_seconds;
    metrics.wall_time.overall = seconds_since(trial_start);
    metrics.peak_rss_kib = peak_rss_kib();
    return metrics;
}

ExperimentResults run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentResults results;
    results.config = config;
    for (SamplerKind sampler : config.samplers) {
        SamplerRun run;
        run.sampler = sampler;
        for (std::uint64_t seed : config.seeds) {
            TrialResult trial;
            trial.seed = seed;
            try {
                trial.metrics = run_trial(config, sampler, seed);
                trial.ok = true;
            } catch (const std::exception& e) {
                trial.ok = false;
                trial.error = e.what();
            }
            run.trials.push_back(std::move(trial));
        }
        run.aggregate = aggregate_trials(run.trials);
        results.runs.push_back(std::move(run));
    }
    return results;
}

Aggregate aggregate_trials(const std::vector<TrialResult>& trials) {
    std::vector<std::pair<std::string, std::vector<double>>> columns = {
        {"last_test_accuracy", {}},
        {"last_memory_clean_ratio", {}},
        {"wall_time_online_learning", {}},
        {"wall_time_episodic_memory_usage", {}},
        {"wall_time_overall", {}},
    };
    for (const auto& trial : trials) {
        if (!trial.ok) {
            continue;
        }
        columns[0].second.push_back(trial.metrics.last_test_accuracy);
        columns[1].second.push_back(trial.metrics.last_memory_clean_ratio);
        columns[2].second.push_back(trial.metrics.wall_time.online_learning);
        columns[3].second.push_back(trial.metrics.wall_time.episodic_memory_usage);
        columns[4].second.push_back(trial.metrics.wall_time.overall);
    }
    Aggregate aggregate;
    for (const auto& [name, values] : columns) {
        if (values.empty()) {
            continue;
        }
        AggregateStat stat;
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        stat.mean = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
            double sq = 0.0;
            for (double v : values) {
                const double d = v - stat.mean;
                sq += d * d;
            }
            stat.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
        }
        aggregate.emplace(name, stat);
    }
    return aggregate;
}

}  // namespace ntd
