#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "ntd/augmentation.hpp"
#include "ntd/config.hpp"
#include "ntd/episodic_memory.hpp"
#include "ntd/errors.hpp"
#include "ntd/experiment.hpp"
#include "ntd/model.hpp"
#include "ntd/report.hpp"
#include "ntd/reservoir.hpp"
#include "ntd/rng.hpp"
#include "ntd/stream.hpp"

namespace py = pybind11;

namespace {

std::vector<const ntd::Sample*> as_pointers(const std::vector<ntd::Sample>& batch) {
    std::vector<const ntd::Sample*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& s : batch) {
        ptrs.push_back(&s);
    }
    return ptrs;
}

}  // namespace

PYBIND11_MODULE(_ntd, m) {
    m.doc() = "Episodic memory sampling for noisy-label data streams";

    py::register_exception<ntd::DuplicateIdError>(m, "DuplicateIdError", PyExc_ValueError);
    py::register_exception<ntd::ProtocolViolationError>(m, "ProtocolViolationError",
                                                        PyExc_RuntimeError);
    py::register_exception<ntd::IncompleteScoresError>(m, "IncompleteScoresError",
                                                       PyExc_ValueError);
    py::register_exception<ntd::EmptyMemoryError>(m, "EmptyMemoryError", PyExc_RuntimeError);
    py::register_exception<ntd::DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ntd::NonFiniteError>(m, "NonFiniteError", PyExc_ArithmeticError);
    py::register_exception<ntd::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ntd::IoError>(m, "IoError", PyExc_OSError);

    py::class_<ntd::Sample>(m, "Sample")
        .def(py::init<>())
        .def(py::init([](std::uint64_t id, std::vector<double> features, int noisy_label,
                         int true_label) {
                 ntd::Sample s;
                 s.id = id;
                 s.features = std::move(features);
                 s.noisy_label = noisy_label;
                 s.true_label = true_label;
                 return s;
             }),
             py::arg("id"), py::arg("features"), py::arg("noisy_label"), py::arg("true_label"))
        .def_readwrite("id", &ntd::Sample::id)
        .def_readwrite("features", &ntd::Sample::features)
        .def_readwrite("noisy_label", &ntd::Sample::noisy_label)
        .def_readwrite("true_label", &ntd::Sample::true_label)
        .def("__repr__", [](const ntd::Sample& s) {
            return "Sample(id=" + std::to_string(s.id) +
                   ", noisy_label=" + std::to_string(s.noisy_label) +
                   ", true_label=" + std::to_string(s.true_label) + ")";
        });

    py::enum_<ntd::InsertOutcome>(m, "InsertOutcome")
        .value("STORED_DIRECTLY", ntd::InsertOutcome::kStoredDirectly)
        .value("EVICTION_REQUIRED", ntd::InsertOutcome::kEvictionRequired);

    py::class_<ntd::EpisodicMemory>(m, "EpisodicMemory")
        .def(py::init<std::size_t, int>(), py::arg("capacity"), py::arg("num_classes"))
        .def("insert", &ntd::EpisodicMemory::insert, py::arg("sample"))
        .def("debias_evict", &ntd::EpisodicMemory::debias_evict, py::arg("scores"))
        .def("eviction_group", &ntd::EpisodicMemory::eviction_group)
        .def("group_sizes", &ntd::EpisodicMemory::group_sizes)
        .def("clean_ratio", &ntd::EpisodicMemory::clean_ratio)
        .def("group", &ntd::EpisodicMemory::group, py::arg("label"),
             py::return_value_policy::copy)
        .def("contains", &ntd::EpisodicMemory::contains, py::arg("id"))
        .def("dumps",
             [](const ntd::EpisodicMemory& mem) {
                 std::ostringstream out;
                 mem.dump(out);
                 return out.str();
             })
        .def_property_readonly("size", &ntd::EpisodicMemory::size)
        .def_property_readonly("capacity", &ntd::EpisodicMemory::capacity)
        .def_property_readonly("num_classes", &ntd::EpisodicMemory::num_classes)
        .def_property_readonly("eviction_pending", &ntd::EpisodicMemory::eviction_pending)
        .def("__len__", &ntd::EpisodicMemory::size);

    py::class_<ntd::ReservoirMemory>(m, "ReservoirMemory")
        .def(py::init<std::size_t, std::uint64_t>(), py::arg("capacity"), py::arg("seed"))
        .def("observe", &ntd::ReservoirMemory::observe, py::arg("sample"))
        .def("clean_ratio", &ntd::ReservoirMemory::clean_ratio)
        .def("group_sizes", &ntd::ReservoirMemory::group_sizes, py::arg("num_classes"))
        .def_property_readonly("size", &ntd::ReservoirMemory::size)
        .def_property_readonly("capacity", &ntd::ReservoirMemory::capacity)
        .def_property_readonly("seen", &ntd::ReservoirMemory::seen)
        .def("__len__", &ntd::ReservoirMemory::size);

    py::class_<ntd::PolicyCounts>(m, "PolicyCounts")
        .def(py::init<>())
        .def_readwrite("jitter_count", &ntd::PolicyCounts::jitter_count)
        .def_readwrite("dropout_count", &ntd::PolicyCounts::dropout_count);

    m.def("policy_counts_for", &ntd::policy_counts_for, py::arg("total"));

    py::class_<ntd::AugmentationPolicySet>(m, "AugmentationPolicySet")
        .def(py::init<std::uint64_t, int, std::vector<double>, int, int, double>(),
             py::arg("seed"), py::arg("feature_dim"), py::arg("jitter_sigma"),
             py::arg("jitter_count"), py::arg("dropout_count"), py::arg("dropout_rate"))
        .def_static("identity_only", &ntd::AugmentationPolicySet::identity_only, py::arg("seed"),
                    py::arg("feature_dim"))
        .def_static(
            "make",
            [](std::uint64_t seed, ntd::PolicyCounts counts, double jitter_scale,
               double dropout_rate, const std::vector<double>& feature_std) {
                return ntd::AugmentationPolicySet::make(seed, counts, jitter_scale, dropout_rate,
                                                        feature_std);
            },
            py::arg("seed"), py::arg("counts"), py::arg("jitter_scale"), py::arg("dropout_rate"),
            py::arg("feature_std"))
        .def("count", &ntd::AugmentationPolicySet::count)
        .def_property_readonly("feature_dim", &ntd::AugmentationPolicySet::feature_dim)
        .def(
            "apply",
            [](const ntd::AugmentationPolicySet& p, std::size_t policy_index,
               const std::vector<double>& x, std::uint64_t sample_id) {
                return p.apply(policy_index, x, sample_id);
            },
            py::arg("policy_index"), py::arg("x"), py::arg("sample_id"));

    m.def(
        "tta_mean_loss",
        [](const std::vector<double>& x, int noisy_label, std::uint64_t sample_id,
           const ntd::SoftmaxClassifier& model, const ntd::AugmentationPolicySet& policies) {
            return ntd::tta_mean_loss(x, noisy_label, sample_id, model, policies);
        },
        py::arg("x"), py::arg("noisy_label"), py::arg("sample_id"), py::arg("model"),
        py::arg("policies"));

    py::class_<ntd::SoftmaxClassifier>(m, "SoftmaxClassifier")
        .def(py::init<int, int, double, std::uint64_t>(), py::arg("num_classes"),
             py::arg("feature_dim"), py::arg("learning_rate"), py::arg("init_seed"))
        .def_static("zeros", &ntd::SoftmaxClassifier::zeros, py::arg("num_classes"),
                    py::arg("feature_dim"), py::arg("learning_rate"))
        .def("logits",
             [](const ntd::SoftmaxClassifier& m_, const std::vector<double>& x) {
                 return m_.logits(x);
             })
        .def("predict",
             [](const ntd::SoftmaxClassifier& m_, const std::vector<double>& x) {
                 return m_.predict(x);
             })
        .def(
            "cross_entropy",
            [](const ntd::SoftmaxClassifier& m_, const std::vector<double>& x, int label) {
                return m_.cross_entropy(x, label);
            },
            py::arg("x"), py::arg("label"))
        .def(
            "sgd_step",
            [](ntd::SoftmaxClassifier& m_, const std::vector<ntd::Sample>& batch) {
                const auto ptrs = as_pointers(batch);
                return m_.sgd_step(ptrs);
            },
            py::arg("batch"))
        .def_property_readonly("num_classes", &ntd::SoftmaxClassifier::num_classes)
        .def_property_readonly("feature_dim", &ntd::SoftmaxClassifier::feature_dim)
        .def_property("learning_rate", &ntd::SoftmaxClassifier::learning_rate,
                      &ntd::SoftmaxClassifier::set_learning_rate)
        .def_property_readonly("step_count", &ntd::SoftmaxClassifier::step_count)
        .def_property_readonly("weights",
                               [](const ntd::SoftmaxClassifier& m_) { return m_.weights(); })
        .def_property_readonly("bias", [](const ntd::SoftmaxClassifier& m_) { return m_.bias(); })
        .def("save_text",
             [](const ntd::SoftmaxClassifier& m_) {
                 std::ostringstream out;
                 m_.save(out);
                 return out.str();
             })
        .def_static(
            "load_text",
            [](const std::string& text, double learning_rate) {
                std::istringstream in(text);
                return ntd::SoftmaxClassifier::load(in, learning_rate);
            },
            py::arg("text"), py::arg("learning_rate"));

    m.def(
        "train_on_samples",
        [](ntd::SoftmaxClassifier& model, const std::vector<ntd::Sample>& data, int epochs,
           int batch_size, std::uint64_t seed) {
            const auto ptrs = as_pointers(data);
            return ntd::train_on_samples(model, ptrs, epochs, batch_size, seed);
        },
        py::arg("model"), py::arg("data"), py::arg("epochs"), py::arg("batch_size"),
        py::arg("seed"));
    m.def("train_on_memory", &ntd::train_on_memory, py::arg("model"), py::arg("memory"),
          py::arg("epochs"), py::arg("batch_size"), py::arg("seed"));
    m.def("evaluate_accuracy", &ntd::evaluate_accuracy, py::arg("model"), py::arg("samples"));

    py::enum_<ntd::NoiseType>(m, "NoiseType")
        .value("SYMMETRIC", ntd::NoiseType::kSymmetric)
        .value("ASYMMETRIC", ntd::NoiseType::kAsymmetric);

    py::class_<ntd::StreamSpec>(m, "StreamSpec")
        .def(py::init<>())
        .def_readwrite("num_classes", &ntd::StreamSpec::num_classes)
        .def_readwrite("feature_dim", &ntd::StreamSpec::feature_dim)
        .def_readwrite("samples_per_task", &ntd::StreamSpec::samples_per_task)
        .def_readwrite("num_tasks", &ntd::StreamSpec::num_tasks)
        .def_readwrite("classes_per_task", &ntd::StreamSpec::classes_per_task)
        .def_readwrite("boundary_fuzz", &ntd::StreamSpec::boundary_fuzz)
        .def_readwrite("noise_type", &ntd::StreamSpec::noise_type)
        .def_readwrite("noise_rate", &ntd::StreamSpec::noise_rate)
        .def_readwrite("sigma_data", &ntd::StreamSpec::sigma_data)
        .def_readwrite("seed", &ntd::StreamSpec::seed)
        .def("validate", &ntd::StreamSpec::validate)
        .def("task_partition", &ntd::StreamSpec::task_partition);

    py::class_<ntd::Stream>(m, "Stream")
        .def_readonly("samples", &ntd::Stream::samples)
        .def_readonly("task_index", &ntd::Stream::task_index)
        .def("__len__", [](const ntd::Stream& s) { return s.samples.size(); });

    m.def("generate_stream", &ntd::generate_stream, py::arg("spec"));
    m.def("make_test_set", &ntd::make_test_set, py::arg("spec"), py::arg("size"));
    m.def(
        "inject_noise",
        [](int true_label, const ntd::StreamSpec& spec, std::uint64_t seed) {
            auto eng = ntd::rng::engine(seed);
            return ntd::inject_noise(true_label, spec, eng);
        },
        py::arg("true_label"), py::arg("spec"), py::arg("seed"),
        "Single noisy draw from a fresh engine seeded with `seed`.");
    m.def(
        "feature_std",
        [](const std::vector<ntd::Sample>& samples) { return ntd::feature_std(samples); },
        py::arg("samples"));
    m.def(
        "export_stream",
        [](const ntd::Stream& stream, const std::string& path) {
            std::ofstream out(path);
            if (!out) {
                throw ntd::IoError("export_stream: cannot open '" + path + "' for writing");
            }
            ntd::export_stream(stream, out);
        },
        py::arg("stream"), py::arg("path"));
    m.def(
        "import_stream",
        [](const std::string& path) {
            std::ifstream in(path);
            if (!in) {
                throw ntd::IoError("import_stream: cannot open '" + path + "'");
            }
            return ntd::import_stream(in);
        },
        py::arg("path"));

    py::enum_<ntd::SamplerKind>(m, "SamplerKind")
        .value("NTD", ntd::SamplerKind::kNtd)
        .value("RESERVOIR", ntd::SamplerKind::kReservoir);

    m.def("sampler_name", &ntd::sampler_name, py::arg("kind"));
    m.def("sampler_from_name", &ntd::sampler_from_name, py::arg("name"));

    py::class_<ntd::ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("stream", &ntd::ExperimentConfig::stream)
        .def_readwrite("memory_size", &ntd::ExperimentConfig::memory_size)
        .def_readwrite("batch_size", &ntd::ExperimentConfig::batch_size)
        .def_readwrite("tta_policies", &ntd::ExperimentConfig::tta_policies)
        .def_readwrite("jitter_scale", &ntd::ExperimentConfig::jitter_scale)
        .def_readwrite("dropout_rate", &ntd::ExperimentConfig::dropout_rate)
        .def_readwrite("online_lr", &ntd::ExperimentConfig::online_lr)
        .def_readwrite("memory_lr", &ntd::ExperimentConfig::memory_lr)
        .def_readwrite("mem_epochs", &ntd::ExperimentConfig::mem_epochs)
        .def_readwrite("defer_memory_training", &ntd::ExperimentConfig::defer_memory_training)
        .def_readwrite("test_size", &ntd::ExperimentConfig::test_size)
        .def_readwrite("samplers", &ntd::ExperimentConfig::samplers)
        .def_readwrite("seeds", &ntd::ExperimentConfig::seeds)
        .def_readwrite("out_path", &ntd::ExperimentConfig::out_path)
        .def("validate", &ntd::ExperimentConfig::validate);

    m.def("default_config", &ntd::default_config);
    m.def("load_config", &ntd::load_config, py::arg("path"));
    m.def(
        "parse_config",
        [](const std::string& text) {
            std::istringstream in(text);
            return ntd::parse_config(in);
        },
        py::arg("text"));
    m.def("config_to_text", &ntd::config_to_text, py::arg("config"));

    py::class_<ntd::StageTimes>(m, "StageTimes")
        .def_readonly("online_learning", &ntd::StageTimes::online_learning)
        .def_readonly("episodic_memory_usage", &ntd::StageTimes::episodic_memory_usage)
        .def_readonly("overall", &ntd::StageTimes::overall);

    py::class_<ntd::TrialMetrics>(m, "TrialMetrics")
        .def_readonly("last_test_accuracy", &ntd::TrialMetrics::last_test_accuracy)
        .def_readonly("last_memory_clean_ratio", &ntd::TrialMetrics::last_memory_clean_ratio)
        .def_readonly("group_size_histogram", &ntd::TrialMetrics::group_size_histogram)
        .def_readonly("online_loss_per_task", &ntd::TrialMetrics::online_loss_per_task)
        .def_readonly("accuracy_per_task", &ntd::TrialMetrics::accuracy_per_task)
        .def_readonly("wall_time", &ntd::TrialMetrics::wall_time)
        .def_readonly("peak_rss_kib", &ntd::TrialMetrics::peak_rss_kib);

    py::class_<ntd::TrialResult>(m, "TrialResult")
        .def_readonly("seed", &ntd::TrialResult::seed)
        .def_readonly("ok", &ntd::TrialResult::ok)
        .def_readonly("error", &ntd::TrialResult::error)
        .def_readonly("metrics", &ntd::TrialResult::metrics);

    py::class_<ntd::AggregateStat>(m, "AggregateStat")
        .def_readonly("mean", &ntd::AggregateStat::mean)
        .def_readonly("stddev", &ntd::AggregateStat::stddev);

    py::class_<ntd::SamplerRun>(m, "SamplerRun")
        .def_readonly("sampler", &ntd::SamplerRun::sampler)
        .def_readonly("trials", &ntd::SamplerRun::trials)
        .def_readonly("aggregate", &ntd::SamplerRun::aggregate);

    py::class_<ntd::ExperimentResults>(m, "ExperimentResults")
        .def_readonly("config", &ntd::ExperimentResults::config)
        .def_readonly("runs", &ntd::ExperimentResults::runs);

    m.def("trial_stream", &ntd::trial_stream, py::arg("config"), py::arg("seed"));
    m.def("run_trial", &ntd::run_trial, py::arg("config"), py::arg("sampler"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_experiment", &ntd::run_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    m.def(
        "results_to_json",
        [](const ntd::ExperimentResults& results) { return ntd::results_to_json(results).dump(2); },
        py::arg("results"));
    m.def("write_report", &ntd::write_report, py::arg("results"), py::arg("path"));
    m.def("summary_line", &ntd::summary_line, py::arg("results"));
    m.def("comparison_table", &ntd::comparison_table, py::arg("results"));
}
