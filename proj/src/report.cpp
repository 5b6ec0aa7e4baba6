#include "ntd/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "ntd/errors.hpp"

namespace ntd {

namespace {

std::string noise_name(NoiseType type) {
    return type == NoiseType::kSymmetric ? "sym" : "asym";
}

NoiseType noise_from_name(const std::string& name) {
    if (name == "sym" || name == "symmetric") {
        return NoiseType::kSymmetric;
    }
    if (name == "asym" || name == "asymmetric") {
        return NoiseType::kAsymmetric;
    }
    throw ConfigError("unknown noise type '" + name + "', expected sym or asym");
}

nlohmann::json metrics_to_json(const TrialMetrics& m) {
    return nlohmann::json{
        {"last_test_accuracy", m.last_test_accuracy},
        {"last_memory_clean_ratio", m.last_memory_clean_ratio},
        {"group_size_histogram", m.group_size_histogram},
        {"online_loss_per_task", m.online_loss_per_task},
        {"accuracy_per_task", m.accuracy_per_task},
        {"wall_time",
         {{"online_learning", m.wall_time.online_learning},
          {"episodic_memory_usage", m.wall_time.episodic_memory_usage},
          {"overall", m.wall_time.overall}}},
        {"peak_rss_kib", m.peak_rss_kib},
    };
}

TrialMetrics metrics_from_json(const nlohmann::json& doc) {
    TrialMetrics m;
    m.last_test_accuracy = doc.at("last_test_accuracy").get<double>();
    m.last_memory_clean_ratio = doc.at("last_memory_clean_ratio").get<double>();
    m.group_size_histogram = doc.at("group_size_histogram").get<std::vector<std::size_t>>();
    m.online_loss_per_task = doc.at("online_loss_per_task").get<std::vector<double>>();
    m.accuracy_per_task = doc.at("accuracy_per_task").get<std::vector<double>>();
    if (doc.contains("wall_time")) {
        const auto& wt = doc.at("wall_time");
        m.wall_time.online_learning = wt.value("online_learning", 0.0);
        m.wall_time.episodic_memory_usage = wt.value("episodic_memory_usage", 0.0);
        m.wall_time.overall = wt.value("overall", 0.0);
    }
    m.peak_rss_kib = doc.value("peak_rss_kib", 0L);
    return m;
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& config) {
    nlohmann::json doc{
        {"num_classes", config.stream.num_classes},
        {"feature_dim", config.stream.feature_dim},
        {"samples_per_task", config.stream.samples_per_task},
        {"num_tasks", config.stream.num_tasks},
        {"boundary_fuzz", config.stream.boundary_fuzz},
        {"noise_type", noise_name(config.stream.noise_type)},
        {"noise_rate", config.stream.noise_rate},
        {"sigma_data", config.stream.sigma_data},
        {"memory_size", config.memory_size},
        {"batch_size", config.batch_size},
        {"tta_policies", config.tta_policies},
        {"jitter_scale", config.jitter_scale},
        {"dropout_rate", config.dropout_rate},
        {"online_lr", config.online_lr},
        {"memory_lr", config.memory_lr},
        {"mem_epochs", config.mem_epochs},
        {"defer_memory_training", config.defer_memory_training},
        {"test_size", config.test_size},
        {"seeds", config.seeds},
        {"out", config.out_path},
    };
    std::vector<std::string> samplers;
    for (SamplerKind kind : config.samplers) {
        samplers.push_back(sampler_name(kind));
    }
    doc["samplers"] = samplers;
    if (!config.stream.classes_per_task.empty()) {
        doc["classes_per_task"] = config.stream.classes_per_task;
    }
    return doc;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
    ExperimentConfig config;
    config.stream.num_classes = doc.at("num_classes").get<int>();
    config.stream.feature_dim = doc.at("feature_dim").get<int>();
    config.stream.samples_per_task = doc.at("samples_per_task").get<int>();
    config.stream.num_tasks = doc.at("num_tasks").get<int>();
    config.stream.boundary_fuzz = doc.at("boundary_fuzz").get<double>();
    config.stream.noise_type = noise_from_name(doc.at("noise_type").get<std::string>());
    config.stream.noise_rate = doc.at("noise_rate").get<double>();
    config.stream.sigma_data = doc.at("sigma_data").get<double>();
    if (doc.contains("classes_per_task")) {
        config.stream.classes_per_task =
            doc.at("classes_per_task").get<std::vector<std::vector<int>>>();
    }
    config.memory_size = doc.at("memory_size").get<std::size_t>();
    config.batch_size = doc.at("batch_size").get<int>();
    config.tta_policies = doc.at("tta_policies").get<int>();
    config.jitter_scale = doc.at("jitter_scale").get<double>();
    config.dropout_rate = doc.at("dropout_rate").get<double>();
    config.online_lr = doc.at("online_lr").get<double>();
    config.memory_lr = doc.at("memory_lr").get<double>();
    config.mem_epochs = doc.at("mem_epochs").get<int>();
    config.defer_memory_training = doc.at("defer_memory_training").get<bool>();
    config.test_size = doc.at("test_size").get<std::size_t>();
    config.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    config.out_path = doc.at("out").get<std::string>();
    config.samplers.clear();
    for (const auto& name : doc.at("samplers")) {
        config.samplers.push_back(sampler_from_name(name.get<std::string>()));
    }
    return config;
}

nlohmann::json results_to_json(const ExperimentResults& results) {
    nlohmann::json doc;
    doc["config"] = config_to_json(results.config);
    auto& trials = doc["trials"] = nlohmann::json::array();
    auto& aggregate = doc["aggregate"] = nlohmann::json::object();
    for (const auto& run : results.runs) {
        const std::string name = sampler_name(run.sampler);
        for (const auto& trial : run.trials) {
            nlohmann::json entry{
                {"sampler", name},
                {"seed", trial.seed},
                {"ok", trial.ok},
            };
            if (trial.ok) {
                entry["metrics"] = metrics_to_json(trial.metrics);
            } else {
                entry["error"] = trial.error;
            }
            trials.push_back(std::move(entry));
        }
        auto& agg = aggregate[name] = nlohmann::json::object();
        for (const auto& [metric, stat] : run.aggregate) {
            agg[metric] = {{"mean", stat.mean}, {"std", stat.stddev}};
        }
    }
    if (results.runs.size() > 1) {
        auto& comparison = doc["comparison"] = nlohmann::json::array();
        for (const auto& [metric, stat] : results.runs.front().aggregate) {
            nlohmann::json row{{"metric", metric}};
            for (const auto& run : results.runs) {
                auto it = run.aggregate.find(metric);
                if (it != run.aggregate.end()) {
                    row[sampler_name(run.sampler)] = it->second.mean;
                }
            }
            comparison.push_back(std::move(row));
        }
    }
    return doc;
}

ExperimentResults results_from_json(const nlohmann::json& doc) {
    ExperimentResults results;
    results.config = config_from_json(doc.at("config"));
    for (const auto& name : doc.at("aggregate").items()) {
        SamplerRun run;
        run.sampler = sampler_from_name(name.key());
        for (const auto& metric : name.value().items()) {
            AggregateStat stat;
            stat.mean = metric.value().at("mean").get<double>();
            stat.stddev = metric.value().at("std").get<double>();
            run.aggregate.emplace(metric.key(), stat);
        }
        results.runs.push_back(std::move(run));
    }
    for (const auto& entry : doc.at("trials")) {
        const SamplerKind kind = sampler_from_name(entry.at("sampler").get<std::string>());
        TrialResult trial;
        trial.seed = entry.at("seed").get<std::uint64_t>();
        trial.ok = entry.at("ok").get<bool>();
        if (trial.ok) {
            trial.metrics = metrics_from_json(entry.at("metrics"));
        } else {
            trial.error = entry.value("error", "");
        }
        for (auto& run : results.runs) {
            if (run.sampler == kind) {
                run.trials.push_back(std::move(trial));
                break;
            }
        }
    }
    return results;
}

void write_report(const ExperimentResults& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("write_report: cannot open '" + path + "' for writing");
    }
    out << results_to_json(results).dump(2) << '\n';
    if (!out) {
        throw IoError("write_report: failed while writing '" + path + "'");
    }
}

ExperimentResults read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("read_report: cannot open '" + path + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("read_report: malformed results file '" + path + "': " + e.what());
    }
    return results_from_json(doc);
}

std::string summary_line(const ExperimentResults& results) {
    nlohmann::json summary{
        {"status", "ok"},
        {"out", results.config.out_path},
    };
    auto& aggregate = summary["aggregate"] = nlohmann::json::object();
    for (const auto& run : results.runs) {
        auto& agg = aggregate[sampler_name(run.sampler)] = nlohmann::json::object();
        for (const auto& [metric, stat] : run.aggregate) {
            agg[metric] = {{"mean", stat.mean}, {"std", stat.stddev}};
        }
    }
    return summary.dump();
}

std::string comparison_table(const ExperimentResults& results) {
    std::ostringstream out;
    out << std::left << std::setw(34) << "metric";
    for (const auto& run : results.runs) {
        out << std::right << std::setw(22) << sampler_name(run.sampler);
    }
    out << '\n';
    if (results.runs.empty()) {
        return out.str();
    }
    for (const auto& [metric, stat] : results.runs.front().aggregate) {
        (void)stat;
        out << std::left << std::setw(34) << metric;
        for (const auto& run : results.runs) {
            auto it = run.aggregate.find(metric);
            std::ostringstream cell;
            if (it != run.aggregate.end()) {
                cell << std::fixed << std::setprecision(4) << it->second.mean << " +/- "
                     << it->second.stddev;
            } else {
                cell << "-";
            }
            out << std::right << std::setw(22) << cell.str();
        }
        out << '\n';
    }
    return out.str();
}

nlohmann::json strip_volatile(nlohmann::json doc) {
    if (doc.contains("trials")) {
        for (auto& entry : doc["trials"]) {
            if (entry.contains("metrics")) {
                entry["metrics"].erase("wall_time");
                entry["metrics"].erase("peak_rss_kib");
            }
        }
    }
    if (doc.contains("aggregate")) {
        for (auto& agg : doc["aggregate"].items()) {
            auto& metrics = agg.value();
            for (auto it = metrics.begin(); it != metrics.end();) {
                if (it.key().rfind("wall_time", 0) == 0) {
                    it = metrics.erase(it);
                } else {
                    ++it;
                }
            }
        }
    }
    if (doc.contains("comparison")) {
        auto& comparison = doc["comparison"];
        for (auto it = comparison.begin(); it != comparison.end();) {
            const std::string metric = it->value("metric", "");
            if (metric.rfind("wall_time", 0) == 0) {
                it = comparison.erase(it);
            } else {
                ++it;
            }
        }
    }
    return doc;
}

}  // namespace ntd
