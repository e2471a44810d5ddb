#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace qsvr::data {

struct Dataset {
    Eigen::MatrixXd features;  // rows = samples
    std::vector<int> labels;   // 0 = normal, 1 = anomaly
    std::vector<std::string> feature_names;
    std::string name;
    std::string provenance;

    Eigen::Index n_samples() const { return features.rows(); }
    Eigen::Index n_features() const { return features.cols(); }
    std::vector<std::vector<double>> feature_rows() const;
    std::vector<std::vector<double>> feature_rows(int label) const;
};

struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;  // k x d, rows are principal directions
    Eigen::VectorXd explained_variance;
    bool padded = false;  // true when trailing components were zero-filled
};

struct Normalizer {
    Eigen::VectorXd mins;
    Eigen::VectorXd maxs;
    std::vector<int> constant_features;  // flagged: these map to 0.5
};

enum class SplitPolicy {
    Simulation,  // train 100 normal, test 100 with balanced classes
    Hardware,    // train 30 normal, test 50 with balanced classes
};

struct Split {
    Dataset train;  // all-normal
    Dataset test;   // balanced 50/50
};

// Reads the dataset CSV schema: header row, numeric feature columns and an
// integer 0/1 column named by label_column.
Dataset load_csv(const std::string& path, const std::string& label_column = "label");

void save_csv(const Dataset& dataset, const std::string& path);

// Top-k principal directions of the covariance of `features`, with a
// deterministic sign convention: the largest-magnitude entry of each
// direction is positive. Fewer input columns than k zero-pads the trailing
// directions and sets `padded`.
PcaModel fit_pca(const Eigen::MatrixXd& features, int k = 5);

Eigen::MatrixXd transform(const PcaModel& model, const Eigen::MatrixXd& features);

// Per-feature min/max from the fitting set only.
Normalizer fit_minmax(const Eigen::MatrixXd& train_features);

// Maps into [0, 1]; values outside the fitted range clamp to the boundary and
// constant features map to 0.5.
Eigen::MatrixXd normalize(const Normalizer& normalizer, const Eigen::MatrixXd& features);

// Synthetic linearly separable 5-feature dataset: normal samples draw
// coordinate 0 from [0, 0.3], anomalies from [0.7, 1.0] (margin 0.4 along
// that axis); all other coordinates are uniform in [0, 1].
Dataset toy_generate(int n_normal, int n_anomaly, std::uint64_t seed);

// Draws an all-normal training set and a disjoint balanced test set of the
// sizes fixed by the policy.
Split make_splits(const Dataset& dataset, SplitPolicy policy, std::uint64_t seed);

}  // namespace qsvr::data
