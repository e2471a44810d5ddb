#include "qsvr/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using qsvr::experiment::ExperimentConfig;

struct CommonOptions {
    std::string config_path;
    std::string dataset;
    std::string output_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("-c,--config", opts.config_path, "configuration file (key=value lines)");
    cmd->add_option("-d,--dataset", opts.dataset, "dataset CSV path, or 'toy'");
    cmd->add_option("-o,--out", opts.output_dir, "output directory");
    cmd->add_option("-s,--seed", opts.seed, "random seed")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_option("--set", opts.overrides, "config override, e.g. --set svr.C=2.0")
        ->take_all();
}

ExperimentConfig build_config(const CommonOptions& opts) {
    ExperimentConfig config;
    if (!opts.config_path.empty()) {
        config = qsvr::experiment::load_config(opts.config_path);
    }
    if (!opts.dataset.empty()) {
        config.dataset_source = opts.dataset;
    }
    if (!opts.output_dir.empty()) {
        config.output_dir = opts.output_dir;
    }
    if (opts.seed_set) {
        config.seed = opts.seed;
    }
    for (const std::string& entry : opts.overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--set expects key=value, got '" + entry + "'");
        }
        qsvr::experiment::apply_config_entry(config, entry.substr(0, eq), entry.substr(eq + 1));
    }
    return config;
}

void report(const std::vector<qsvr::experiment::RunRecord>& records,
            const ExperimentConfig& config) {
    qsvr::experiment::emit_reports(records, config.output_dir);
    for (const auto& record : records) {
        std::printf("%-6s %-18s strength=%-8.4g eps=%-8s retrained=%d auc=%.4f\n",
                    record.model.c_str(), record.channel.c_str(), record.strength,
                    record.attack_epsilon ? std::to_string(*record.attack_epsilon).c_str() : "-",
                    record.retrained ? 1 : 0, record.auc);
    }
    std::printf("%zu record(s) written to %s\n", records.size(), config.output_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-kernel SVR anomaly-detection workbench"};
    app.require_subcommand(1);

    CommonOptions opts;

    auto* bench = app.add_subcommand("bench", "noiseless quantum and classical RBF baselines");
    add_common(bench, opts);

    auto* noise_sweep =
        app.add_subcommand("noise-sweep", "fit + evaluate one detector per noise grid point");
    add_common(noise_sweep, opts);

    auto* attack = app.add_subcommand("attack", "PGD attack sweep against the noiseless detector");
    add_common(attack, opts);
    bool with_noise_grid = false;
    attack->add_flag("--with-noise-grid", with_noise_grid,
                     "also score the adversarial sets under every noise grid point");

    auto* retrain = app.add_subcommand("retrain", "adversarial retraining comparison per epsilon");
    add_common(retrain, opts);

    auto* diagnostics =
        app.add_subcommand("diagnostics", "feature-wise KS p-value and variance of the test split");
    add_common(diagnostics, opts);

    auto* toy_gen = app.add_subcommand("toy-gen", "write the synthetic dataset as CSV");
    int toy_normal = 150;
    int toy_anomaly = 50;
    std::uint64_t toy_seed = 42;
    std::string toy_path = "toy.csv";
    toy_gen->add_option("--normal", toy_normal, "number of normal samples");
    toy_gen->add_option("--anomaly", toy_anomaly, "number of anomalous samples");
    toy_gen->add_option("-s,--seed", toy_seed, "random seed");
    toy_gen->add_option("-p,--path", toy_path, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (toy_gen->parsed()) {
            qsvr::data::save_csv(qsvr::data::toy_generate(toy_normal, toy_anomaly, toy_seed),
                                 toy_path);
            std::printf("wrote %s\n", toy_path.c_str());
            return 0;
        }
        const ExperimentConfig config = build_config(opts);
        if (bench->parsed()) {
            report(qsvr::experiment::run_benchmark(config), config);
        } else if (noise_sweep->parsed()) {
            report(qsvr::experiment::run_noise_sweep(config), config);
        } else if (attack->parsed()) {
            report(qsvr::experiment::run_attack_sweep(config, with_noise_grid), config);
        } else if (retrain->parsed()) {
            report(qsvr::experiment::run_retrain(config), config);
        } else if (diagnostics->parsed()) {
            qsvr::experiment::emit_diagnostics(config, config.output_dir);
            std::printf("diagnostics written to %s\n", config.output_dir.c_str());
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
