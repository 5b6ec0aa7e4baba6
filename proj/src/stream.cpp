#include "ntd/stream.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ntd/errors.hpp"
#include "ntd/rng.hpp"

namespace ntd {

namespace {

// Separation close to the orthogonal limit sqrt(2)*radius keeps the
// cosine between any two accepted mean directions below ~0.08, so
// training one class barely moves the logits of the others.
constexpr double kMeanSeparationFactor = 9.5;
constexpr double kMeanRadiusFactor = 7.0;
constexpr std::uint64_t kTestIdBase = 1ull << 40;

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

std::vector<std::vector<int>> StreamSpec::task_partition() const {
    if (!classes_per_task.empty()) {
        return classes_per_task;
    }
    if (num_tasks > num_classes) {
        throw ConfigError("StreamSpec: cannot split " + std::to_string(num_classes) +
                          " classes into " + std::to_string(num_tasks) + " non-empty tasks");
    }
    std::vector<std::vector<int>> partition(static_cast<std::size_t>(num_tasks));
    const int base = num_classes / num_tasks;
    const int extra = num_classes % num_tasks;
    int next = 0;
    for (int t = 0; t < num_tasks; ++t) {
        const int count = base + (t < extra ? 1 : 0);
        for (int i = 0; i < count; ++i) {
            partition[static_cast<std::size_t>(t)].push_back(next++);
        }
    }
    return partition;
}

void StreamSpec::validate() const {
    if (num_classes < 1) {
        throw ConfigError("StreamSpec: num_classes must be positive");
    }
    if (feature_dim < 1) {
        throw ConfigError("StreamSpec: feature_dim must be positive");
    }
    if (samples_per_task < 1) {
        throw ConfigError("StreamSpec: samples_per_task must be positive");
    }
    if (num_tasks < 1) {
        throw ConfigError("StreamSpec: num_tasks must be positive");
    }
    if (!(boundary_fuzz >= 0.0 && boundary_fuzz < 0.5)) {
        throw ConfigError("StreamSpec: boundary_fuzz must lie in [0, 0.5)");
    }
    if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
        throw ConfigError("StreamSpec: noise_rate must lie in [0, 1]");
    }
    if (!(sigma_data > 0.0)) {
        throw ConfigError("StreamSpec: sigma_data must be positive");
    }
    if (noise_rate > 0.0 && noise_type == NoiseType::kSymmetric && num_classes < 2) {
        throw ConfigError("StreamSpec: symmetric noise needs at least 2 classes");
    }

    const auto partition = task_partition();
    if (static_cast<int>(partition.size()) != num_tasks) {
        throw ConfigError("StreamSpec: classes_per_task must list one subset per task");
    }
    std::set<int> seen;
    for (const auto& subset : partition) {
        if (subset.empty()) {
            throw ConfigError("StreamSpec: every task needs at least one class");
        }
        for (int c : subset) {
            if (c < 0 || c >= num_classes) {
                throw ConfigError("StreamSpec: class index " + std::to_string(c) +
                                  " outside [0, " + std::to_string(num_classes) + ")");
            }
            if (!seen.insert(c).second) {
                throw ConfigError("StreamSpec: class " + std::to_string(c) +
                                  " appears in more than one task");
            }
        }
    }
}

ClassGenerators make_class_generators(const StreamSpec& spec) {
    auto eng = rng::engine(rng::derive(spec.seed, rng::kGeometry));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double separation = kMeanSeparationFactor * spec.sigma_data;
    const double sep_sq = separation * separation;

    for (int round = 0; round < 8; ++round) {
        const double radius =
            kMeanRadiusFactor * spec.sigma_data * std::pow(1.5, static_cast<double>(round));
        std::vector<std::vector<double>> means;
        means.reserve(static_cast<std::size_t>(spec.num_classes));
        bool failed = false;
        for (int c = 0; c < spec.num_classes && !failed; ++c) {
            bool placed = false;
            for (int attempt = 0; attempt < 2000; ++attempt) {
                std::vector<double> candidate(static_cast<std::size_t>(spec.feature_dim));
                double norm_sq = 0.0;
                for (auto& v : candidate) {
                    v = gauss(eng);
                    norm_sq += v * v;
                }
                if (norm_sq == 0.0) {
                    continue;
                }
                const double scale = radius / std::sqrt(norm_sq);
                for (auto& v : candidate) {
                    v *= scale;
                }
                bool ok = true;
                for (const auto& m : means) {
                    if (squared_distance(candidate, m) < sep_sq) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    means.push_back(std::move(candidate));
                    placed = true;
                    break;
                }
            }
            failed = !placed;
        }
        if (!failed) {
            return ClassGenerators{std::move(means), spec.sigma_data};
        }
    }
    throw ConfigError("make_class_generators: unable to place " +
                      std::to_string(spec.num_classes) + " class means at separation " +
                      std::to_string(separation) + " in dimension " +
                      std::to_string(spec.feature_dim));
}

int inject_noise(int true_label, const StreamSpec& spec, std::mt19937_64& rng) {
    if (true_label < 0 || true_label >= spec.num_classes) {
        throw std::invalid_argument("inject_noise: label out of range");
    }
    if (spec.noise_rate <= 0.0) {
        return true_label;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) >= spec.noise_rate) {
        return true_label;
    }
    if (spec.noise_type == NoiseType::kSymmetric) {
        std::uniform_int_distribution<int> pick(0, spec.num_classes - 2);
        const int v = pick(rng);
        return v >= true_label ? v + 1 : v;
    }
    // Asymmetric: cyclic successor within the task that owns the class.
    const auto partition = spec.task_partition();
    for (const auto& subset : partition) {
        for (std::size_t i = 0; i < subset.size(); ++i) {
            if (subset[i] == true_label) {
                return subset[(i + 1) % subset.size()];
            }
        }
    }
    // Class not covered by any task set; leave it untouched.
    return true_label;
}

Stream generate_stream(const StreamSpec& spec) {
    spec.validate();
    const ClassGenerators gens = make_class_generators(spec);
    const auto partition = spec.task_partition();

    auto draw_eng = rng::engine(rng::derive(spec.seed, rng::kTrainDraws));
    auto noise_eng = rng::engine(rng::derive(spec.seed, rng::kNoise));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int per_task = spec.samples_per_task;
    const int total = per_task * spec.num_tasks;
    const int window = static_cast<int>(std::floor(spec.boundary_fuzz * per_task));

    Stream stream;
    stream.samples.reserve(static_cast<std::size_t>(total));
    stream.task_index.reserve(static_cast<std::size_t>(total));

    for (int pos = 0; pos < total; ++pos) {
        const int task = pos / per_task;
        const int offset = pos % per_task;

        // Source task: inside a boundary window the draw cross-fades
        // linearly between the adjacent tasks.
        int source = task;
        if (window > 0) {
            if (offset >= per_task - window && task + 1 < spec.num_tasks) {
                const int j = offset - (per_task - window);  // [0, window)
                const double p_next = (j + 0.5) / (2.0 * window);
                if (u(draw_eng) < p_next) {
                    source = task + 1;
                }
            } else if (offset < window && task > 0) {
                const int j = window + offset;  // [window, 2*window)
                const double p_prev = 1.0 - (j + 0.5) / (2.0 * window);
                if (u(draw_eng) < p_prev) {
                    source = task - 1;
                }
            }
        }

        const auto& classes = partition[static_cast<std::size_t>(source)];
        std::uniform_int_distribution<std::size_t> pick(0, classes.size() - 1);
        const int label = classes[pick(draw_eng)];

        Sample s;
        s.id = static_cast<std::uint64_t>(pos);
        s.features.resize(static_cast<std::size_t>(spec.feature_dim));
        const auto& mean = gens.means[static_cast<std::size_t>(label)];
        for (int j = 0; j < spec.feature_dim; ++j) {
            s.features[static_cast<std::size_t>(j)] =
                mean[static_cast<std::size_t>(j)] + gens.sigma * gauss(draw_eng);
        }
        s.true_label = label;
        s.noisy_label = inject_noise(label, spec, noise_eng);

        stream.samples.push_back(std::move(s));
        stream.task_index.push_back(task);
    }
    return stream;
}

std::vector<Sample> make_test_set(const StreamSpec& spec, std::size_t size) {
    spec.validate();
    if (size < static_cast<std::size_t>(spec.num_classes)) {
        throw std::invalid_argument("make_test_set: size must be at least num_classes");
    }
    const ClassGenerators gens = make_class_generators(spec);
    auto eng = rng::engine(rng::derive(spec.seed, rng::kTestDraws));
    std::uniform_int_distribution<int> pick(0, spec.num_classes - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Sample> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        const int label = pick(eng);
        Sample s;
        s.id = kTestIdBase + i;
        s.features.resize(static_cast<std::size_t>(spec.feature_dim));
        const auto& mean = gens.means[static_cast<std::size_t>(label)];
        for (int j = 0; j < spec.feature_dim; ++j) {
            s.features[static_cast<std::size_t>(j)] =
                mean[static_cast<std::size_t>(j)] + gens.sigma * gauss(eng);
        }
        s.true_label = label;
        s.noisy_label = label;
        out.push_back(std::move(s));
    }
    return out;
}

void export_stream(const Stream& stream, std::ostream& out) {
    for (std::size_t i = 0; i < stream.samples.size(); ++i) {
        const Sample& s = stream.samples[i];
        nlohmann::json record = {
            {"id", s.id},
            {"features", s.features},
            {"noisy_label", s.noisy_label},
            {"true_label", s.true_label},
            {"task_index", stream.task_index[i]},
        };
        out << record.dump() << '\n';
    }
}

Stream import_stream(std::istream& in) {
    Stream stream;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw IoError("import_stream: bad record at line " + std::to_string(line_no) + ": " +
                          e.what());
        }
        try {
            Sample s;
            s.id = record.at("id").get<std::uint64_t>();
            s.features = record.at("features").get<std::vector<double>>();
            s.noisy_label = record.at("noisy_label").get<int>();
            s.true_label = record.at("true_label").get<int>();
            stream.task_index.push_back(record.at("task_index").get<int>());
            stream.samples.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw IoError("import_stream: missing field at line " + std::to_string(line_no) +
                          ": " + e.what());
        }
    }
    return stream;
}

std::vector<double> feature_std(const std::vector<Sample>& samples) {
    if (samples.empty()) {
        throw std::invalid_argument("feature_std: empty sample set");
    }
    const std::size_t dim = samples.front().features.size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& s : samples) {
        if (s.features.size() != dim) {
            throw DimensionError("feature_std: inconsistent feature dimensions");
        }
        for (std::size_t j = 0; j < dim; ++j) {
            mean[j] += s.features[j];
        }
    }
    const double n = static_cast<double>(samples.size());
    for (auto& m : mean) {
        m /= n;
    }
    std::vector<double> var(dim, 0.0);
    for (const auto& s : samples) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = s.features[j] - mean[j];
            var[j] += d * d;
        }
    }
    for (auto& v : var) {
        v = std::sqrt(v / n);
    }
    return var;
}

}  // namespace ntd
