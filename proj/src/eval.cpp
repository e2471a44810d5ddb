#include "qsvr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qsvr::eval {

namespace {

void check_scored(const ScoredSet& scored) {
    if (scored.scores.size() != scored.labels.size()) {
        throw std::invalid_argument("scores and labels differ in length");
    }
    const bool has_normal = std::find(scored.labels.begin(), scored.labels.end(), 0) !=
                            scored.labels.end();
    const bool has_anomaly = std::find(scored.labels.begin(), scored.labels.end(), 1) !=
                             scored.labels.end();
    if (!has_normal || !has_anomaly) {
        throw std::invalid_argument("AUC needs both classes present");
    }
}

// Survival function of the Kolmogorov distribution,
// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda) {
    if (lambda <= 1e-8) {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100000; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-12) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double auc(const ScoredSet& scored) {
    check_scored(scored);
    const std::size_t n = scored.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scored.scores[a] < scored.scores[b];
    });

    // Rank sum of the anomaly class with average ranks across ties.
    double anomaly_rank_sum = 0.0;
    std::size_t n_anomaly = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scored.scores[order[j]] == scored.scores[order[i]]) {
            ++j;
        }
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (scored.labels[order[k]] == 1) {
                anomaly_rank_sum += avg_rank;
                ++n_anomaly;
            }
        }
        i = j;
    }
    const std::size_t n_normal = n - n_anomaly;
    const double u = anomaly_rank_sum -
                     static_cast<double>(n_anomaly) * static_cast<double>(n_anomaly + 1) / 2.0;
    return u / (static_cast<double>(n_anomaly) * static_cast<double>(n_normal));
}

std::vector<RocPoint> roc_points(const ScoredSet& scored) {
    check_scored(scored);
    std::vector<double> thresholds = scored.scores;
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const double positives = static_cast<double>(
        std::count(scored.labels.begin(), scored.labels.end(), 1));
    const double negatives = static_cast<double>(scored.labels.size()) - positives;

    std::vector<RocPoint> points;
    points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
    for (double threshold : thresholds) {
        double tp = 0.0;
        double fp = 0.0;
        for (std::size_t k = 0; k < scored.scores.size(); ++k) {
            if (scored.scores[k] > threshold) {
                (scored.labels[k] == 1 ? tp : fp) += 1.0;
            }
        }
        points.push_back({threshold, fp / negatives, tp / positives});
    }
    return points;
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("KS test needs non-empty samples");
    }
    std::vector<double> sa = a;
    std::vector<double> sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    double statistic = 0.0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < sa.size() && ib < sb.size()) {
        const double value = std::min(sa[ia], sb[ib]);
        while (ia < sa.size() && sa[ia] <= value) {
            ++ia;
        }
        while (ib < sb.size() && sb[ib] <= value) {
            ++ib;
        }
        statistic = std::max(statistic, std::abs(static_cast<double>(ia) / na -
                                                 static_cast<double>(ib) / nb));
    }

    const double effective = na * nb / (na + nb);
    return {statistic, kolmogorov_survival(std::sqrt(effective) * statistic)};
}

DatasetDiagnostics dataset_diagnostics(const data::Dataset& test) {
    DatasetDiagnostics diag;
    diag.min_ks_p_value = 1.0;
    diag.max_feature_variance = 0.0;
    bool any_feature = false;
    for (Eigen::Index c = 0; c < test.n_features(); ++c) {
        std::vector<double> normal;
        std::vector<double> anomaly;
        for (Eigen::Index r = 0; r < test.n_samples(); ++r) {
            (test.labels[static_cast<std::size_t>(r)] == 0 ? normal : anomaly)
                .push_back(test.features(r, c));
        }
        if (normal.empty() || anomaly.empty()) {
            throw std::invalid_argument("diagnostics need both classes in the test set");
        }
        diag.min_ks_p_value = std::min(diag.min_ks_p_value, ks_two_sample(normal, anomaly).p_value);

        const double mean = test.features.col(c).mean();
        const double variance =
            (test.features.col(c).array() - mean).square().sum() /
            static_cast<double>(test.n_samples());
        diag.max_feature_variance = std::max(diag.max_feature_variance, variance);
        any_feature = true;
    }
    if (!any_feature) {
        throw std::invalid_argument("diagnostics need at least one feature");
    }
    return diag;
}

}  // namespace qsvr::eval
