// Command line front end.  `ntd run` executes a full experiment from a config
// file with optional overrides; `ntd export-stream` writes a generated stream
// to JSONL for inspection.  Errors leave a single machine readable JSON line
// on stdout and a nonzero exit status.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ntd/config.hpp"
#include "ntd/errors.hpp"
#include "ntd/experiment.hpp"
#include "ntd/report.hpp"
#include "ntd/stream.hpp"

namespace {

struct RunOptions {
    std::string config_path;
    std::string noise_type;
    double noise_rate = -1.0;
    long long memory_size = -1;
    std::string sampler;
    std::string seeds;
    std::string out_path;
    int mem_epochs = -1;
    int tta = -1;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream chunks(text);
    std::string chunk;
    while (std::getline(chunks, chunk, ',')) {
        if (chunk.empty()) {
            continue;
        }
        seeds.push_back(std::stoull(chunk));
    }
    if (seeds.empty()) {
        throw ntd::ConfigError("--seeds: expected a comma separated list of integers");
    }
    return seeds;
}

ntd::ExperimentConfig resolve_config(const RunOptions& opts) {
    ntd::ExperimentConfig config =
        opts.config_path.empty() ? ntd::default_config() : ntd::load_config(opts.config_path);
    if (!opts.noise_type.empty()) {
        if (opts.noise_type == "sym") {
            config.stream.noise_type = ntd::NoiseType::kSymmetric;
        } else if (opts.noise_type == "asym") {
            config.stream.noise_type = ntd::NoiseType::kAsymmetric;
        } else {
            throw ntd::ConfigError("--noise-type: expected sym or asym");
        }
    }
    if (opts.noise_rate >= 0.0) {
        config.stream.noise_rate = opts.noise_rate;
    }
    if (opts.memory_size >= 0) {
        config.memory_size = static_cast<std::size_t>(opts.memory_size);
    }
    if (!opts.sampler.empty()) {
        if (opts.sampler == "both") {
            config.samplers = {ntd::SamplerKind::kNtd, ntd::SamplerKind::kReservoir};
        } else {
            config.samplers = {ntd::sampler_from_name(opts.sampler)};
        }
    }
    if (!opts.seeds.empty()) {
        config.seeds = parse_seed_list(opts.seeds);
    }
    if (!opts.out_path.empty()) {
        config.out_path = opts.out_path;
    }
    if (opts.mem_epochs >= 0) {
        config.mem_epochs = opts.mem_epochs;
    }
    if (opts.tta >= 0) {
        config.tta_policies = opts.tta;
    }
    config.validate();
    return config;
}

int run_command(const RunOptions& opts) {
    const ntd::ExperimentConfig config = resolve_config(opts);
    const ntd::ExperimentResults results = ntd::run_experiment(config);
    ntd::write_report(results, config.out_path);
    std::cout << ntd::summary_line(results) << '\n';
    if (results.runs.size() > 1) {
        std::cerr << ntd::comparison_table(results);
    }
    for (const auto& run : results.runs) {
        for (const auto& trial : run.trials) {
            if (!trial.ok) {
                std::cerr << "trial failed: sampler=" << ntd::sampler_name(run.sampler)
                          << " seed=" << trial.seed << " error=" << trial.error << '\n';
                return 2;
            }
        }
    }
    return 0;
}

int export_stream_command(const std::string& config_path, const std::string& out_path,
                          std::uint64_t seed) {
    ntd::ExperimentConfig config =
        config_path.empty() ? ntd::default_config() : ntd::load_config(config_path);
    config.stream.seed = seed;
    config.stream.validate();
    const ntd::Stream stream = ntd::generate_stream(config.stream);
    std::ofstream out(out_path);
    if (!out) {
        throw ntd::IoError("export-stream: cannot open '" + out_path + "' for writing");
    }
    ntd::export_stream(stream, out);
    std::cout << nlohmann::json{{"status", "ok"},
                                {"out", out_path},
                                {"samples", stream.samples.size()}}
                     .dump()
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NTD episodic memory sampling for noisy label streams"};
    app.require_subcommand(1);

    RunOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "run an experiment and write a results report");
    run->add_option("--config", run_opts.config_path, "key=value config file");
    run->add_option("--noise-type", run_opts.noise_type, "override noise type: sym or asym");
    run->add_option("--noise-rate", run_opts.noise_rate, "override label noise rate in [0,1)");
    run->add_option("--memory-size", run_opts.memory_size, "override memory capacity");
    run->add_option("--sampler", run_opts.sampler, "override sampler: ntd, reservoir, or both");
    run->add_option("--seeds", run_opts.seeds, "override seeds, comma separated");
    run->add_option("--out", run_opts.out_path, "override results output path");
    run->add_option("--mem-epochs", run_opts.mem_epochs, "override memory training epochs");
    run->add_option("--tta", run_opts.tta, "override number of augmentation policies");

    std::string export_config;
    std::string export_out = "stream.jsonl";
    std::uint64_t export_seed = 1;
    CLI::App* exp = app.add_subcommand("export-stream", "generate a stream and write it as JSONL");
    exp->add_option("--config", export_config, "key=value config file");
    exp->add_option("--out", export_out, "output JSONL path");
    exp->add_option("--seed", export_seed, "stream seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) {
            return run_command(run_opts);
        }
        return export_stream_command(export_config, export_out, export_seed);
    } catch (const std::exception& e) {
        std::cout << nlohmann::json{{"status", "error"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
}
