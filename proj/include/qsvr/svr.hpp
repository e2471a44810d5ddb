#pragma once

#include "qsvr/kernel.hpp"
#include "qsvr/simulator.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace qsvr::svr {

struct SvrConfig {
    double C = 1.0;
    double tube_epsilon = 0.1;
    double kkt_tolerance = 1e-3;
    long max_iterations = 100000;
    // Quantile of the training scores used as the decision threshold;
    // 1.0 means the maximum training score.
    double threshold_quantile = 1.0;

    void validate() const;
};

// Epsilon-SVR in signed dual form: beta_i = alpha_i - alpha_i^*, so the
// regression function is f(x) = sum_i beta_i kappa(x_i, x) + bias.
struct SvrModel {
    Eigen::VectorXd beta;
    double bias = 0.0;
    std::string training_set;
    long iterations = 0;
    double kkt_violation = 0.0;
    bool converged = false;
};

// Value of the dual objective -1/2 b'Kb - eps sum|b| + y'b for a coefficient
// vector; solve_dual maximizes this.
double dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& targets,
                      double tube_epsilon, const Eigen::VectorXd& beta);

// Maximizes the epsilon-insensitive dual subject to sum(beta) = 0 and
// |beta_i| <= C via pairwise maximal-violating-pair updates. Stops when the
// largest KKT violation drops below kkt_tolerance or the iteration cap is hit
// (reported through SvrModel::converged). Bias comes from the free support
// vectors when any exist, otherwise from the midpoint of the KKT interval.
SvrModel solve_dual(const kernel::GramMatrix& gram, const Eigen::VectorXd& targets,
                    const SvrConfig& config);

double predict(const SvrModel& model, const Eigen::VectorXd& kernel_row);

// Reconstruction ensemble: one SVR per feature dimension, each regressing that
// feature from the full encoded input. The anomaly score of x is the mean
// squared residual across dimensions.
struct AnomalyDetector {
    std::vector<SvrModel> models;          // one per feature; empty beta when skipped
    std::vector<bool> degenerate;          // true where the feature had zero train variance
    std::vector<double> feature_means;     // fallback predictor for degenerate features
    kernel::FeatureMapSpec spec;
    sim::NoiseModel noise;
    std::vector<std::vector<double>> train_features;
    // Cached encoding states of the training set; filled for ideal detectors
    // so scoring needs one circuit run per query instead of one per pair.
    std::vector<sim::StateVector> train_states;
    double threshold = 0.0;
    std::vector<double> train_scores;
    std::vector<std::string> warnings;
};

struct ClassificationResult {
    std::vector<int> labels;
    double normal_ratio = 0.0;   // tn / (tn + fp)
    double anomaly_ratio = 0.0;  // tp / (tp + fn)
};

// Fits the detector on an all-normal training set: one self-Gram under the
// noise model, one SVR per feature dimension, threshold calibrated to the
// maximum training anomaly score.
AnomalyDetector fit_detector(const std::vector<std::vector<double>>& train_features,
                             const kernel::FeatureMapSpec& spec, const sim::NoiseModel& noise,
                             const SvrConfig& config);

double anomaly_score(const AnomalyDetector& detector, const std::vector<double>& x);

// Batch scoring. Returns one score per sample; when out_gram is non-null it
// receives the test-vs-train kernel matrix used for the predictions (rows =
// test samples), which reports feed into per-class kernel statistics.
std::vector<double> anomaly_scores(const AnomalyDetector& detector,
                                   const std::vector<std::vector<double>>& samples,
                                   kernel::GramMatrix* out_gram = nullptr);

// Thresholds scores into labels (1 = anomaly iff score > threshold) and
// reports the class-conditional correct-classification ratios against the
// true labels. A ratio is NaN when its class is absent.
ClassificationResult classify(const AnomalyDetector& detector, const std::vector<double>& scores,
                              const std::vector<int>& true_labels);

}  // namespace qsvr::svr
