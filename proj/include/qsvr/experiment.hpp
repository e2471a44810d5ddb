#pragma once

#include "qsvr/attacks.hpp"
#include "qsvr/data.hpp"
#include "qsvr/eval.hpp"
#include "qsvr/kernel.hpp"
#include "qsvr/svr.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qsvr::experiment {

struct NoiseGrid {
    // Incoherent channels crossed with their strengths.
    std::vector<sim::ChannelKind> channels{
        sim::ChannelKind::BitFlip,     sim::ChannelKind::PhaseFlip,
        sim::ChannelKind::Depolarizing, sim::ChannelKind::PhaseDamping,
        sim::ChannelKind::AmplitudeDamping,
    };
    std::vector<double> strengths{0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    // Linear miscalibration sweep, overrotation in radians.
    int miscalibration_steps = 20;
    double miscalibration_max = 2.0 * 3.14159265358979323846;
    // Extra miscalibration points in [0.9 pi, 1.1 pi].
    bool densify_near_pi = false;
    int densify_points = 10;

    std::vector<std::pair<sim::ChannelKind, double>> points() const;
};

struct ExperimentConfig {
    std::string dataset_source = "toy";  // path to a CSV, or "toy"
    data::SplitPolicy split_policy = data::SplitPolicy::Simulation;
    int toy_normal = 150;   // generated pool sizes for the toy source
    int toy_anomaly = 50;
    // PCA to this many dimensions + min-max rescaling, fitted on the training
    // split only. Applied to CSV sources; the toy generator already emits
    // normalized 5-feature samples, so toy data skips it.
    bool preprocess = true;
    int pca_dims = 5;
    double angle_scale = 3.14159265358979323846;
    svr::SvrConfig svr_config;
    double rbf_gamma = 1.0;  // classical RBF-kernel baseline
    NoiseGrid noise_grid;
    std::vector<double> attack_epsilons{0.01, 0.1, 0.3};
    int attack_iterations = 50;
    int attack_restarts = 12;
    double attack_fd_step = 1e-4;
    std::uint64_t seed = 42;
    std::string output_dir = "out";
};

// One experiment grid point: the deterministic result fields plus the scored
// test set behind them, so reports can rebuild AUC and ROC curves.
struct RunRecord {
    std::string dataset;
    std::string model = "qsvr";
    std::string channel = "none";
    double strength = 0.0;
    std::optional<double> attack_epsilon;   // epsilon of the evaluated test set
    std::optional<double> retrain_epsilon;  // epsilon the model was retrained at
    bool retrained = false;
    double auc = 0.0;
    double normal_ratio = 0.0;
    double anomaly_ratio = 0.0;
    double wall_time_s = 0.0;
    std::uint64_t kernel_evals = 0;
    std::uint64_t seed = 0;
    std::string warnings;  // detector warnings, '; '-joined
    eval::ScoredSet scored;
    std::vector<kernel::ClassKernelStats> kernel_stats;
};

// Key-value configuration file: one `section.key=value` per line, '#' starts
// a comment. Unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

// Loads or generates the dataset, splits it, and preprocesses CSV sources
// (PCA + min-max fitted on the training split).
data::Split prepare_data(const ExperimentConfig& config);

// Noiseless quantum-kernel detector and the classical RBF-kernel SVR baseline
// on the same splits.
std::vector<RunRecord> run_benchmark(const ExperimentConfig& config);

// One detector fit + evaluation per (channel, strength) grid point.
std::vector<RunRecord> run_noise_sweep(const ExperimentConfig& config);

// Builds adversarial test sets per epsilon against the noiseless detector and
// scores them under the noiseless detector plus every configured noise grid
// point. include_noise_grid=false keeps only the noiseless evaluations.
std::vector<RunRecord> run_attack_sweep(const ExperimentConfig& config,
                                        bool include_noise_grid = false);

// Adversarial retraining per epsilon: baseline and retrained detectors are
// both evaluated on the clean test set and on the adversarial test set built
// against the baseline.
std::vector<RunRecord> run_retrain(const ExperimentConfig& config);

// Writes records.csv, roc_points.csv, kernel_stats.csv and per-record score
// files under `directory`. Deterministic ordering and formatting.
void emit_reports(const std::vector<RunRecord>& records, const std::string& directory);

// diagnostics.csv row for the (normalized) test split.
void emit_diagnostics(const ExperimentConfig& config, const std::string& directory);

}  // namespace qsvr::experiment
