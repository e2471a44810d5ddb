#pragma once

#include "qsvr/svr.hpp"

#include <string>
#include <vector>

namespace qsvr::attacks {

struct AttackConfig {
    double epsilon = 0.1;    // l-infinity budget
    int iterations = 50;     // PGD steps n per restart
    double alpha = -1.0;     // step size; negative means epsilon / n
    double fd_step = 1e-4;   // central-difference step h
    // Restart 0 always walks from x itself; further restarts start from
    // seeded uniform draws inside the budget ball, so the attack escapes
    // local plateaus of the score surface while staying deterministic.
    int restarts = 12;
    std::uint64_t seed = 0;
    bool record_trace = false;

    double step_size() const { return alpha < 0.0 ? epsilon / iterations : alpha; }
    void validate() const;
};

struct AdversarialSample {
    std::vector<double> original;
    std::vector<double> perturbed;
    int label = 0;
    std::vector<double> score_trace;  // per-step attack objective, when recorded
};

// Central finite-difference gradient of the attack loss
//   L(x, y) = (1 - 2y) * anomaly_score(x),
// which climbs the score for normal samples and descends it for anomalies.
std::vector<double> input_gradient(const svr::AnomalyDetector& detector,
                                   const std::vector<double>& x, int label, double fd_step);

// Deterministic PGD: per restart, n steps of
//   x <- clip(x + alpha * sgn(grad L))
// projected onto the epsilon-ball around the original and the normalized
// input range [0, 1] per feature. The emitted sample is the best-scoring
// point visited across all restarts (monotone accept), never worse than x.
AdversarialSample pgd_attack(const svr::AnomalyDetector& detector, const std::vector<double>& x,
                             int label, const AttackConfig& config);

// One adversarial sample per input, attacks run in parallel.
std::vector<AdversarialSample> build_adversarial_set(const svr::AnomalyDetector& detector,
                                                     const std::vector<std::vector<double>>& samples,
                                                     const std::vector<int>& labels,
                                                     const AttackConfig& config);

// Fits a noiseless baseline detector, attacks its own (all-normal) training
// points, then fits a fresh detector on the perturbed training set.
svr::AnomalyDetector adversarial_retrain(const std::vector<std::vector<double>>& train_features,
                                         const kernel::FeatureMapSpec& spec,
                                         const svr::SvrConfig& svr_config,
                                         const AttackConfig& attack_config);

// Adversarial sets persist in the dataset CSV schema plus original_index and
// epsilon columns.
void save_adversarial_csv(const std::vector<AdversarialSample>& samples,
                          const std::vector<std::string>& feature_names, double epsilon,
                          const std::string& path);

}  // namespace qsvr::attacks
