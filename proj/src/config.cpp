#include "ntd/config.hpp"

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "ntd/errors.hpp"

namespace ntd {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long long parsed = 0;
    try {
        parsed = std::stoll(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    if (pos != value.size()) {
        throw ConfigError("config key '" + key + "': trailing characters in '" + value + "'");
    }
    return parsed;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
    if (pos != value.size()) {
        throw ConfigError("config key '" + key + "': trailing characters in '" + value + "'");
    }
    return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& value) {
    std::vector<std::uint64_t> seeds;
    std::stringstream chunks(value);
    std::string chunk;
    while (std::getline(chunks, chunk, ',')) {
        chunk = trim(chunk);
        if (chunk.empty()) {
            continue;
        }
        const long long seed = parse_int("seeds", chunk);
        if (seed < 0) {
            throw ConfigError("config key 'seeds': seed must be non-negative, got " + chunk);
        }
        seeds.push_back(static_cast<std::uint64_t>(seed));
    }
    if (seeds.empty()) {
        throw ConfigError("config key 'seeds': expected at least one seed");
    }
    return seeds;
}

std::vector<std::vector<int>> parse_partition(const std::string& value) {
    std::vector<std::vector<int>> partition;
    std::stringstream tasks(value);
    std::string task;
    while (std::getline(tasks, task, ';')) {
        std::vector<int> classes;
        std::stringstream ids(task);
        std::string id;
        while (ids >> id) {
            classes.push_back(static_cast<int>(parse_int("classes_per_task", id)));
        }
        if (classes.empty()) {
            throw ConfigError("config key 'classes_per_task': empty task group in '" + value + "'");
        }
        partition.push_back(std::move(classes));
    }
    return partition;
}

std::vector<SamplerKind> parse_samplers(const std::string& value) {
    if (value == "both") {
        return {SamplerKind::kNtd, SamplerKind::kReservoir};
    }
    return {sampler_from_name(value)};
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig config = default_config();
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) {
            line.erase(comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": expected key=value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_number) + ": empty key");
        }

        if (key == "num_classes") {
            config.stream.num_classes = static_cast<int>(parse_int(key, value));
        } else if (key == "feature_dim") {
            config.stream.feature_dim = static_cast<int>(parse_int(key, value));
        } else if (key == "samples_per_task") {
            config.stream.samples_per_task = static_cast<int>(parse_int(key, value));
        } else if (key == "num_tasks") {
            config.stream.num_tasks = static_cast<int>(parse_int(key, value));
        } else if (key == "classes_per_task") {
            config.stream.classes_per_task = parse_partition(value);
        } else if (key == "boundary_fuzz") {
            config.stream.boundary_fuzz = parse_double(key, value);
        } else if (key == "noise_type") {
            if (value == "sym" || value == "symmetric") {
                config.stream.noise_type = NoiseType::kSymmetric;
            } else if (value == "asym" || value == "asymmetric") {
                config.stream.noise_type = NoiseType::kAsymmetric;
            } else {
                throw ConfigError("config key 'noise_type': expected sym or asym, got '" + value +
                                  "'");
            }
        } else if (key == "noise_rate") {
            config.stream.noise_rate = parse_double(key, value);
        } else if (key == "sigma_data") {
            config.stream.sigma_data = parse_double(key, value);
        } else if (key == "memory_size") {
            const long long parsed = parse_int(key, value);
            if (parsed < 0) {
                throw ConfigError("config key 'memory_size': must be non-negative");
            }
            config.memory_size = static_cast<std::size_t>(parsed);
        } else if (key == "batch_size") {
            config.batch_size = static_cast<int>(parse_int(key, value));
        } else if (key == "tta_policies") {
            config.tta_policies = static_cast<int>(parse_int(key, value));
        } else if (key == "jitter_scale") {
            config.jitter_scale = parse_double(key, value);
        } else if (key == "dropout_rate") {
            config.dropout_rate = parse_double(key, value);
        } else if (key == "online_lr") {
            config.online_lr = parse_double(key, value);
        } else if (key == "memory_lr") {
            config.memory_lr = parse_double(key, value);
        } else if (key == "mem_epochs") {
            config.mem_epochs = static_cast<int>(parse_int(key, value));
        } else if (key == "defer_memory_training") {
            config.defer_memory_training = parse_bool(key, value);
        } else if (key == "test_size") {
            const long long parsed = parse_int(key, value);
            if (parsed < 0) {
                throw ConfigError("config key 'test_size': must be non-negative");
            }
            config.test_size = static_cast<std::size_t>(parsed);
        } else if (key == "sampler") {
            config.samplers = parse_samplers(value);
        } else if (key == "seeds") {
            config.seeds = parse_seeds(value);
        } else if (key == "out") {
            if (value.empty()) {
                throw ConfigError("config key 'out': path must not be empty");
            }
            config.out_path = value;
        } else {
            throw ConfigError("config line " + std::to_string(line_number) + ": unknown key '" +
                              key + "'");
        }
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("load_config: cannot open '" + path + "'");
    }
    return parse_config(in);
}

std::string config_to_text(const ExperimentConfig& config) {
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "num_classes = " << config.stream.num_classes << '\n';
    out << "feature_dim = " << config.stream.feature_dim << '\n';
    out << "samples_per_task = " << config.stream.samples_per_task << '\n';
    out << "num_tasks = " << config.stream.num_tasks << '\n';
    if (!config.stream.classes_per_task.empty()) {
        out << "classes_per_task = ";
        for (std::size_t t = 0; t < config.stream.classes_per_task.size(); ++t) {
            if (t > 0) {
                out << "; ";
            }
            const auto& classes = config.stream.classes_per_task[t];
            for (std::size_t i = 0; i < classes.size(); ++i) {
                if (i > 0) {
                    out << ' ';
                }
                out << classes[i];
            }
        }
        out << '\n';
    }
    out << "boundary_fuzz = " << config.stream.boundary_fuzz << '\n';
    out << "noise_type = " << (config.stream.noise_type == NoiseType::kSymmetric ? "sym" : "asym")
        << '\n';
    out << "noise_rate = " << config.stream.noise_rate << '\n';
    out << "sigma_data = " << config.stream.sigma_data << '\n';
    out << "memory_size = " << config.memory_size << '\n';
    out << "batch_size = " << config.batch_size << '\n';
    out << "tta_policies = " << config.tta_policies << '\n';
    out << "jitter_scale = " << config.jitter_scale << '\n';
    out << "dropout_rate = " << config.dropout_rate << '\n';
    out << "online_lr = " << config.online_lr << '\n';
    out << "memory_lr = " << config.memory_lr << '\n';
    out << "mem_epochs = " << config.mem_epochs << '\n';
    out << "defer_memory_training = " << (config.defer_memory_training ? "true" : "false") << '\n';
    out << "test_size = " << config.test_size << '\n';
    if (config.samplers.size() == 2) {
        out << "sampler = both\n";
    } else if (!config.samplers.empty()) {
        out << "sampler = " << sampler_name(config.samplers.front()) << '\n';
    }
    out << "seeds = ";
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << config.seeds[i];
    }
    out << '\n';
    out << "out = " << config.out_path << '\n';
    return out.str();
}

}  // namespace ntd
