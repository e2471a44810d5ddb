#include "qsvr/svr.hpp"

#include "qsvr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsvr::svr {

namespace {

constexpr double kBoxSlack = 1e-12;

// Directional derivatives of the minimization form
//   f(beta) = 1/2 b'Kb + eps sum|b| - y'b
// along +e_i and -e_i, with G_i = (K beta)_i - y_i. At beta_i = 0 either move
// grows |beta_i|, so both pick up +eps.
double deriv_up(double g, double beta, double eps) {
    return g + (beta >= 0.0 ? eps : -eps);
}

double deriv_down(double g, double beta, double eps) {
    return -g + (beta <= 0.0 ? eps : -eps);
}

// Exact objective change for the pairwise move beta_i += d, beta_j -= d.
double objective_delta(double d, double eta, double g_i, double g_j, double beta_i, double beta_j,
                       double eps) {
    return 0.5 * eta * d * d + (g_i - g_j) * d + eps * (std::abs(beta_i + d) - std::abs(beta_i)) +
           eps * (std::abs(beta_j - d) - std::abs(beta_j));
}

// Minimizes the piecewise quadratic objective_delta over d in [0, hi]. The
// kinks sit where beta_i + d or beta_j - d crosses zero; within a segment the
// curvature eta may be non-positive for noisy (indefinite) Grams, so segment
// endpoints are always candidates.
double best_step(double eta, double g_i, double g_j, double beta_i, double beta_j, double eps,
                 double hi) {
    std::vector<double> knots{0.0, hi};
    if (-beta_i > 0.0 && -beta_i < hi) {
        knots.push_back(-beta_i);
    }
    if (beta_j > 0.0 && beta_j < hi) {
        knots.push_back(beta_j);
    }
    std::sort(knots.begin(), knots.end());

    double best_d = 0.0;
    double best_delta = 0.0;
    auto consider = [&](double d) {
        const double delta = objective_delta(d, eta, g_i, g_j, beta_i, beta_j, eps);
        if (delta < best_delta) {
            best_delta = delta;
            best_d = d;
        }
    };
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double lo = knots[k];
        const double up = knots[k + 1];
        consider(lo);
        consider(up);
        if (eta > 0.0) {
            const double mid = 0.5 * (lo + up);
            const double sign_i = (beta_i + mid >= 0.0) ? 1.0 : -1.0;
            const double sign_j = (beta_j - mid >= 0.0) ? 1.0 : -1.0;
            const double stationary = -((g_i - g_j) + eps * (sign_i - sign_j)) / eta;
            if (stationary > lo && stationary < up) {
                consider(stationary);
            }
        }
    }
    return best_d;
}

}  // namespace

void SvrConfig::validate() const {
    if (!(C > 0.0)) {
        throw std::invalid_argument("SVR box constraint C must be positive");
    }
    if (!(tube_epsilon >= 0.0)) {
        throw std::invalid_argument("tube_epsilon must be non-negative");
    }
    if (!(kkt_tolerance > 0.0) || max_iterations < 1) {
        throw std::invalid_argument("kkt_tolerance must be positive and max_iterations >= 1");
    }
    if (!(threshold_quantile > 0.0 && threshold_quantile <= 1.0)) {
        throw std::invalid_argument("threshold_quantile must lie in (0, 1]");
    }
}

double dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& targets,
                      double tube_epsilon, const Eigen::VectorXd& beta) {
    return -0.5 * beta.dot(gram * beta) - tube_epsilon * beta.cwiseAbs().sum() +
           targets.dot(beta);
}

SvrModel solve_dual(const kernel::GramMatrix& gram, const Eigen::VectorXd& targets,
                    const SvrConfig& config) {
    config.validate();
    const Eigen::MatrixXd& K = gram.values;
    const auto n = K.rows();
    if (K.cols() != n) {
        throw std::invalid_argument("Gram matrix must be square");
    }
    if (targets.size() != n) {
        throw std::invalid_argument("target count does not match Gram size");
    }
    if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("Gram matrix is not symmetric");
    }

    const double C = config.C;
    const double eps = config.tube_epsilon;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd grad = -targets;  // G = K beta - y

    SvrModel model;
    model.training_set = gram.row_samples;

    long iter = 0;
    double violation = std::numeric_limits<double>::infinity();
    for (; iter < config.max_iterations; ++iter) {
        // Maximal violating pair: most negative up-derivative vs most
        // negative down-derivative, over the movable coordinates.
        Eigen::Index up_best = -1, up_second = -1;
        Eigen::Index dn_best = -1, dn_second = -1;
        double up_val = std::numeric_limits<double>::infinity();
        double up_val2 = up_val, dn_val = up_val, dn_val2 = up_val;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (beta[i] < C - kBoxSlack) {
                const double d = deriv_up(grad[i], beta[i], eps);
                if (d < up_val) {
                    up_val2 = up_val; up_second = up_best;
                    up_val = d; up_best = i;
                } else if (d < up_val2) {
                    up_val2 = d; up_second = i;
                }
            }
            if (beta[i] > -C + kBoxSlack) {
                const double d = deriv_down(grad[i], beta[i], eps);
                if (d < dn_val) {
                    dn_val2 = dn_val; dn_second = dn_best;
                    dn_val = d; dn_best = i;
                } else if (d < dn_val2) {
                    dn_val2 = d; dn_second = i;
                }
            }
        }
        if (up_best < 0 || dn_best < 0) {
            violation = 0.0;
            break;
        }
        Eigen::Index i = up_best;
        Eigen::Index j = dn_best;
        if (i == j) {
            // The same coordinate cannot move both ways in one pair; take the
            // better of the two runner-up pairings.
            const double with_dn2 = (dn_second >= 0)
                                        ? up_val + dn_val2
                                        : std::numeric_limits<double>::infinity();
            const double with_up2 = (up_second >= 0)
                                        ? up_val2 + dn_val
                                        : std::numeric_limits<double>::infinity();
            if (with_dn2 <= with_up2) {
                j = dn_second;
            } else {
                i = up_second;
            }
            if (i < 0 || j < 0) {
                violation = 0.0;
                break;
            }
        }
        const double d_up = deriv_up(grad[i], beta[i], eps);
        const double d_dn = deriv_down(grad[j], beta[j], eps);
        violation = -(d_up + d_dn);
        if (violation < config.kkt_tolerance) {
            break;
        }

        const double hi = std::min(C - beta[i], beta[j] + C);
        const double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
        const double step = best_step(eta, grad[i], grad[j], beta[i], beta[j], eps, hi);
        if (!(step > 0.0)) {
            // No strict improvement is available despite a KKT violation;
            // bail out rather than spin.
            break;
        }
        beta[i] += step;
        beta[j] -= step;
        grad += step * (K.col(i) - K.col(j));
    }

    model.beta = beta;
    model.iterations = iter;
    model.kkt_violation = violation;
    model.converged = violation < config.kkt_tolerance;

    // Bias from free support vectors: f(x_i) = y_i - eps*sign(beta_i) there.
    double bias_sum = 0.0;
    long bias_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(beta[i]) > kBoxSlack && std::abs(beta[i]) < C - kBoxSlack) {
            const double sign = beta[i] > 0.0 ? 1.0 : -1.0;
            bias_sum += -grad[i] - eps * sign;
            ++bias_count;
        }
    }
    if (bias_count > 0) {
        model.bias = bias_sum / static_cast<double>(bias_count);
    } else {
        double lo = -std::numeric_limits<double>::infinity();
        double up = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (beta[i] < C - kBoxSlack) {
                lo = std::max(lo, -deriv_up(grad[i], beta[i], eps));
            }
            if (beta[i] > -C + kBoxSlack) {
                up = std::min(up, deriv_down(grad[i], beta[i], eps));
            }
        }
        if (std::isfinite(lo) && std::isfinite(up)) {
            model.bias = 0.5 * (lo + up);
        }
    }
    return model;
}

double predict(const SvrModel& model, const Eigen::VectorXd& kernel_row) {
    if (kernel_row.size() != model.beta.size()) {
        throw std::invalid_argument("kernel row length does not match training size");
    }
    return model.beta.dot(kernel_row) + model.bias;
}

namespace {

double score_from_row(const AnomalyDetector& detector, const Eigen::VectorXd& row,
                      const std::vector<double>& x) {
    double sum = 0.0;
    const std::size_t dims = detector.models.size();
    for (std::size_t d = 0; d < dims; ++d) {
        const double prediction = detector.degenerate[d]
                                      ? detector.feature_means[d]
                                      : predict(detector.models[d], row);
        const double residual = prediction - x[d];
        sum += residual * residual;
    }
    return sum / static_cast<double>(dims);
}

// kappa(train_i, x) for every training sample. Ideal detectors reuse the
// cached training embedding states.
Eigen::VectorXd kernel_row_for(const AnomalyDetector& detector, const std::vector<double>& x) {
    if (!detector.train_states.empty()) {
        return kernel::kernel_row(detector.train_states, x, detector.spec);
    }
    const auto n = static_cast<Eigen::Index>(detector.train_features.size());
    Eigen::VectorXd row(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        row[i] = kernel::kernel_value(detector.train_features[static_cast<std::size_t>(i)], x,
                                      detector.spec, detector.noise);
    }
    return row;
}

}  // namespace

AnomalyDetector fit_detector(const std::vector<std::vector<double>>& train_features,
                             const kernel::FeatureMapSpec& spec, const sim::NoiseModel& noise,
                             const SvrConfig& config) {
    config.validate();
    spec.validate();
    if (train_features.empty()) {
        throw std::invalid_argument("training set is empty");
    }
    const std::size_t dims = train_features[0].size();
    if (static_cast<int>(dims) != spec.n_features) {
        throw std::invalid_argument("training features do not match feature map width");
    }

    AnomalyDetector detector;
    detector.spec = spec;
    detector.noise = noise;
    detector.train_features = train_features;
    if (noise.is_ideal()) {
        detector.train_states = kernel::embedding_states(train_features, spec);
    }
    detector.models.resize(dims);
    detector.degenerate.assign(dims, false);
    detector.feature_means.assign(dims, 0.0);

    const kernel::GramMatrix train_gram = kernel::gram(train_features, spec, noise, "train");

    // Degenerate Gram (all rows identical) makes every regression ill-posed;
    // flag it but keep going.
    double gram_spread = 0.0;
    for (Eigen::Index r = 1; r < train_gram.rows(); ++r) {
        gram_spread = std::max(
            gram_spread, (train_gram.values.row(r) - train_gram.values.row(0)).cwiseAbs().maxCoeff());
    }
    if (gram_spread < 1e-12) {
        detector.warnings.push_back("degenerate Gram: all training rows identical");
    }

    const auto n = static_cast<Eigen::Index>(train_features.size());
    parallel_for(dims, [&](std::size_t d) {
        Eigen::VectorXd targets(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            targets[i] = train_features[static_cast<std::size_t>(i)][d];
        }
        detector.feature_means[d] = targets.mean();
        if ((targets.array() - targets[0]).abs().maxCoeff() < 1e-15) {
            detector.degenerate[d] = true;
            return;
        }
        detector.models[d] = solve_dual(train_gram, targets, config);
    });
    for (std::size_t d = 0; d < dims; ++d) {
        if (detector.degenerate[d]) {
            detector.warnings.push_back("feature " + std::to_string(d) +
                                        " has zero training variance; SVR skipped");
        } else if (!detector.models[d].converged) {
            detector.warnings.push_back("SVR for feature " + std::to_string(d) +
                                        " hit the iteration cap (KKT violation " +
                                        std::to_string(detector.models[d].kkt_violation) + ")");
        }
    }

    // Training scores come straight from the self-Gram rows. At the default
    // quantile 1.0 the threshold is the largest of them, so the whole training
    // set sits inside the decision region.
    detector.train_scores.resize(train_features.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        detector.train_scores[static_cast<std::size_t>(i)] = score_from_row(
            detector, train_gram.values.col(i), train_features[static_cast<std::size_t>(i)]);
    }
    std::vector<double> sorted_scores = detector.train_scores;
    std::sort(sorted_scores.begin(), sorted_scores.end());
    const auto rank = static_cast<std::size_t>(std::min<double>(
        static_cast<double>(sorted_scores.size()) - 1.0,
        std::ceil(config.threshold_quantile * static_cast<double>(sorted_scores.size())) - 1.0));
    detector.threshold = sorted_scores[rank];
    return detector;
}

double anomaly_score(const AnomalyDetector& detector, const std::vector<double>& x) {
    if (x.size() != detector.feature_means.size()) {
        throw std::invalid_argument("sample width does not match detector");
    }
    return score_from_row(detector, kernel_row_for(detector, x), x);
}

std::vector<double> anomaly_scores(const AnomalyDetector& detector,
                                   const std::vector<std::vector<double>>& samples,
                                   kernel::GramMatrix* out_gram) {
    // One train-vs-test Gram; column t is the kernel row of test sample t.
    kernel::GramMatrix cross = kernel::gram(detector.train_features, samples, detector.spec,
                                            detector.noise, "train", "test");
    std::vector<double> scores(samples.size());
    parallel_for(samples.size(), [&](std::size_t t) {
        scores[t] = score_from_row(detector, cross.values.col(static_cast<Eigen::Index>(t)),
                                   samples[t]);
    });
    if (out_gram != nullptr) {
        *out_gram = kernel::transposed(cross);
    }
    return scores;
}

ClassificationResult classify(const AnomalyDetector& detector, const std::vector<double>& scores,
                              const std::vector<int>& true_labels) {
    if (scores.size() != true_labels.size()) {
        throw std::invalid_argument("scores and labels differ in length");
    }
    ClassificationResult result;
    result.labels.resize(scores.size());
    long tn = 0, fp = 0, tp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int predicted = scores[i] > detector.threshold ? 1 : 0;
        result.labels[i] = predicted;
        if (true_labels[i] == 0) {
            predicted == 0 ? ++tn : ++fp;
        } else {
            predicted == 1 ? ++tp : ++fn;
        }
    }
    result.normal_ratio = (tn + fp) > 0 ? static_cast<double>(tn) / static_cast<double>(tn + fp)
                                        : std::numeric_limits<double>::quiet_NaN();
    result.anomaly_ratio = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn)
                                         : std::numeric_limits<double>::quiet_NaN();
    return result;
}

}  // namespace qsvr::svr
