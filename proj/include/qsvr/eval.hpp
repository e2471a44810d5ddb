#pragma once

#include "qsvr/data.hpp"

#include <vector>

namespace qsvr::eval {

struct ScoredSet {
    std::vector<double> scores;
    std::vector<int> labels;  // 0 = normal, 1 = anomaly
};

struct KsResult {
    double statistic = 0.0;  // D = sup |ECDF_a - ECDF_b|
    double p_value = 1.0;
};

struct DatasetDiagnostics {
    double min_ks_p_value = 1.0;       // over features, normal vs anomaly
    double max_feature_variance = 0.0; // over features, whole test set
};

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

// Rank-based (Mann-Whitney) AUC with ties counting one half. Higher scores
// mean more anomalous; anomalies are the positive class.
double auc(const ScoredSet& scored);

// ROC curve points swept over the distinct score thresholds.
std::vector<RocPoint> roc_points(const ScoredSet& scored);

// Two-sample Kolmogorov-Smirnov test. The p-value uses the asymptotic
// Kolmogorov distribution at effective size n*m/(n+m); the series is summed
// until terms drop below 1e-12.
KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

// Feature-wise class-separability diagnostics of a test set: the minimum
// KS p-value between the classes and the maximum per-feature variance
// (population variance over all test samples).
DatasetDiagnostics dataset_diagnostics(const data::Dataset& test);

}  // namespace qsvr::eval
