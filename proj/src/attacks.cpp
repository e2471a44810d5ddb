#include "qsvr/attacks.hpp"

#include "qsvr/parallel.hpp"
#include "qsvr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qsvr::attacks {

namespace {

double attack_loss(const svr::AnomalyDetector& detector, const std::vector<double>& x,
                   int label) {
    return (1.0 - 2.0 * label) * svr::anomaly_score(detector, x);
}

double signum(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void AttackConfig::validate() const {
    if (!(epsilon >= 0.0)) {
        throw std::invalid_argument("attack epsilon must be non-negative");
    }
    if (iterations < 1 || restarts < 1) {
        throw std::invalid_argument("attack needs at least one iteration and one restart");
    }
    if (!(fd_step > 0.0)) {
        throw std::invalid_argument("finite-difference step must be positive");
    }
    if (alpha >= 0.0 && alpha * iterations < epsilon) {
        throw std::invalid_argument("alpha * iterations cannot reach the epsilon budget");
    }
}

std::vector<double> input_gradient(const svr::AnomalyDetector& detector,
                                   const std::vector<double>& x, int label, double fd_step) {
    if (!(fd_step > 0.0)) {
        throw std::invalid_argument("finite-difference step must be positive");
    }
    std::vector<double> grad(x.size());
    std::vector<double> probe = x;
    for (std::size_t d = 0; d < x.size(); ++d) {
        probe[d] = x[d] + fd_step;
        const double up = attack_loss(detector, probe, label);
        probe[d] = x[d] - fd_step;
        const double down = attack_loss(detector, probe, label);
        probe[d] = x[d];
        grad[d] = (up - down) / (2.0 * fd_step);
    }
    return grad;
}

AdversarialSample pgd_attack(const svr::AnomalyDetector& detector, const std::vector<double>& x,
                             int label, const AttackConfig& config) {
    config.validate();
    AdversarialSample sample;
    sample.original = x;
    sample.label = label;

    const double alpha = config.step_size();
    Rng rng(config.seed);
    std::vector<double> best = x;
    double best_loss = attack_loss(detector, x, label);

    for (int restart = 0; restart < config.restarts; ++restart) {
        std::vector<double> current = x;
        if (restart > 0) {
            for (std::size_t d = 0; d < current.size(); ++d) {
                current[d] = std::clamp(x[d] + rng.uniform(-config.epsilon, config.epsilon),
                                        0.0, 1.0);
            }
        }
        for (int step = 0; step < config.iterations; ++step) {
            const std::vector<double> grad =
                input_gradient(detector, current, label, config.fd_step);
            for (std::size_t d = 0; d < current.size(); ++d) {
                double next = current[d] + alpha * signum(grad[d]);
                // Project onto the epsilon ball around the original, then the
                // normalized input range.
                next = std::clamp(next, x[d] - config.epsilon, x[d] + config.epsilon);
                next = std::clamp(next, 0.0, 1.0);
                current[d] = next;
            }
            const double loss = attack_loss(detector, current, label);
            if (loss > best_loss) {
                best_loss = loss;
                best = current;
            }
            if (restart == 0 && config.record_trace) {
                // The trace holds the plain anomaly score of the walking
                // iterate; the attack objective is (1 - 2y) times it.
                sample.score_trace.push_back((1.0 - 2.0 * label) * loss);
            }
        }
    }
    sample.perturbed = std::move(best);
    return sample;
}

std::vector<AdversarialSample> build_adversarial_set(const svr::AnomalyDetector& detector,
                                                     const std::vector<std::vector<double>>& samples,
                                                     const std::vector<int>& labels,
                                                     const AttackConfig& config) {
    config.validate();
    if (samples.size() != labels.size()) {
        throw std::invalid_argument("sample and label counts differ");
    }
    std::vector<AdversarialSample> result(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        result[i] = pgd_attack(detector, samples[i], labels[i], config);
    });
    return result;
}

svr::AnomalyDetector adversarial_retrain(const std::vector<std::vector<double>>& train_features,
                                         const kernel::FeatureMapSpec& spec,
                                         const svr::SvrConfig& svr_config,
                                         const AttackConfig& attack_config) {
    const svr::AnomalyDetector baseline =
        svr::fit_detector(train_features, spec, sim::NoiseModel::ideal(), svr_config);
    const std::vector<int> labels(train_features.size(), 0);
    const std::vector<AdversarialSample> attacked =
        build_adversarial_set(baseline, train_features, labels, attack_config);
    std::vector<std::vector<double>> perturbed;
    perturbed.reserve(attacked.size());
    for (const AdversarialSample& sample : attacked) {
        perturbed.push_back(sample.perturbed);
    }
    return svr::fit_detector(perturbed, spec, sim::NoiseModel::ideal(), svr_config);
}

void save_adversarial_csv(const std::vector<AdversarialSample>& samples,
                          const std::vector<std::string>& feature_names, double epsilon,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    for (const auto& name : feature_names) {
        out << name << ',';
    }
    out << "label,original_index,epsilon\n";
    char buffer[40];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const AdversarialSample& sample = samples[i];
        if (sample.perturbed.size() != feature_names.size()) {
            throw std::invalid_argument("feature name count does not match sample width");
        }
        for (double v : sample.perturbed) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", v);
            out << buffer << ',';
        }
        std::snprintf(buffer, sizeof(buffer), "%.17g", epsilon);
        out << sample.label << ',' << i << ',' << buffer << '\n';
    }
    if (!out) {
        throw std::runtime_error("write to " + path + " failed");
    }
}

}  // namespace qsvr::attacks
