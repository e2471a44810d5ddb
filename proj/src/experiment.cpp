#include "qsvr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qsvr::experiment {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) {
            values.push_back(std::stod(item));
        }
    }
    return values;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw std::invalid_argument("expected a boolean, got '" + text + "'");
}

std::string dataset_label(const ExperimentConfig& config) {
    if (config.dataset_source == "toy") {
        return "toy";
    }
    return std::filesystem::path(config.dataset_source).stem().string();
}

struct StopWatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

// Classical baseline: epsilon-SVR reconstruction with an RBF kernel,
// reusing solve_dual/predict on a classically computed Gram.
struct RbfDetector {
    std::vector<svr::SvrModel> models;
    std::vector<bool> degenerate;
    std::vector<double> feature_means;
    Eigen::MatrixXd train;
    double gamma = 1.0;
    double threshold = 0.0;
};

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& cols, double gamma) {
    Eigen::MatrixXd values(rows.rows(), cols.rows());
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < cols.rows(); ++c) {
            values(r, c) = std::exp(-gamma * (rows.row(r) - cols.row(c)).squaredNorm());
        }
    }
    return values;
}

double rbf_score(const RbfDetector& detector, const Eigen::VectorXd& kernel_row,
                 const Eigen::VectorXd& x) {
    double sum = 0.0;
    for (Eigen::Index d = 0; d < x.size(); ++d) {
        const double prediction = detector.degenerate[static_cast<std::size_t>(d)]
                                      ? detector.feature_means[static_cast<std::size_t>(d)]
                                      : svr::predict(detector.models[static_cast<std::size_t>(d)],
                                                     kernel_row);
        sum += (prediction - x[d]) * (prediction - x[d]);
    }
    return sum / static_cast<double>(x.size());
}

RbfDetector fit_rbf_detector(const Eigen::MatrixXd& train, double gamma,
                             const svr::SvrConfig& config) {
    RbfDetector detector;
    detector.train = train;
    detector.gamma = gamma;
    kernel::GramMatrix gram;
    gram.values = rbf_gram(train, train, gamma);
    gram.spec_hash = "rbf";
    gram.row_samples = "train";
    gram.col_samples = "train";
    const std::size_t dims = static_cast<std::size_t>(train.cols());
    detector.models.resize(dims);
    detector.degenerate.assign(dims, false);
    detector.feature_means.assign(dims, 0.0);
    for (std::size_t d = 0; d < dims; ++d) {
        const Eigen::VectorXd targets = train.col(static_cast<Eigen::Index>(d));
        detector.feature_means[d] = targets.mean();
        if ((targets.array() - targets[0]).abs().maxCoeff() < 1e-15) {
            detector.degenerate[d] = true;
            continue;
        }
        detector.models[d] = svr::solve_dual(gram, targets, config);
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        worst = std::max(worst, rbf_score(detector, gram.values.col(i), train.row(i).transpose()));
    }
    detector.threshold = worst;
    return detector;
}

std::vector<double> rbf_scores(const RbfDetector& detector, const Eigen::MatrixXd& samples) {
    const Eigen::MatrixXd cross = rbf_gram(detector.train, samples, detector.gamma);
    std::vector<double> scores(static_cast<std::size_t>(samples.rows()));
    for (Eigen::Index t = 0; t < samples.rows(); ++t) {
        scores[static_cast<std::size_t>(t)] =
            rbf_score(detector, cross.col(t), samples.row(t).transpose());
    }
    return scores;
}

sim::NoiseModel noise_for(sim::ChannelKind kind, double strength) {
    return sim::NoiseModel::with(sim::make_channel(kind, strength));
}

// Adversarial test sets persist next to the reports, one CSV per epsilon.
void save_adversarial_sets(const std::vector<attacks::AdversarialSample>& samples,
                           const std::vector<std::string>& feature_names, double epsilon,
                           const std::string& directory) {
    if (directory.empty()) {
        return;
    }
    std::filesystem::create_directories(directory);
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "%g", epsilon);
    const auto path =
        std::filesystem::path(directory) / ("adversarial_eps" + std::string(suffix) + ".csv");
    attacks::save_adversarial_csv(samples, feature_names, epsilon, path.string());
}

// Shared scoring/record assembly for quantum detectors. The eval counter and
// stopwatch windows start before the detector fit, so records account for the
// full cost of their grid point.
RunRecord evaluate_detector(const svr::AnomalyDetector& detector,
                            const std::vector<std::vector<double>>& test_rows,
                            const std::vector<int>& test_labels, const ExperimentConfig& config,
                            std::uint64_t evals_before, const StopWatch& watch) {
    RunRecord record;
    record.dataset = dataset_label(config);
    record.seed = config.seed;

    kernel::GramMatrix test_gram;
    record.scored.scores = svr::anomaly_scores(detector, test_rows, &test_gram);
    record.scored.labels = test_labels;
    record.auc = eval::auc(record.scored);
    const svr::ClassificationResult cls =
        svr::classify(detector, record.scored.scores, test_labels);
    record.normal_ratio = cls.normal_ratio;
    record.anomaly_ratio = cls.anomaly_ratio;
    record.kernel_stats = kernel::kernel_class_stats(test_gram, test_labels);
    record.wall_time_s = watch.seconds();
    record.kernel_evals = kernel::kernel_eval_count() - evals_before;
    for (const auto& warning : detector.warnings) {
        record.warnings += record.warnings.empty() ? warning : "; " + warning;
    }
    if (!detector.noise.is_ideal()) {
        record.channel = sim::to_string(detector.noise.channel->kind);
        record.strength = detector.noise.channel->strength;
    }
    return record;
}

}  // namespace

std::vector<std::pair<sim::ChannelKind, double>> NoiseGrid::points() const {
    std::vector<std::pair<sim::ChannelKind, double>> grid;
    for (sim::ChannelKind kind : channels) {
        for (double p : strengths) {
            grid.emplace_back(kind, p);
        }
    }
    if (miscalibration_steps > 0) {
        for (int i = 0; i < miscalibration_steps; ++i) {
            const double p = miscalibration_steps == 1
                                 ? 0.0
                                 : miscalibration_max * i / (miscalibration_steps - 1);
            grid.emplace_back(sim::ChannelKind::Miscalibration, p);
        }
    }
    if (densify_near_pi && densify_points > 0) {
        for (int i = 0; i < densify_points; ++i) {
            const double p =
                0.9 * kPi + 0.2 * kPi * (densify_points == 1 ? 0.5 : double(i) / (densify_points - 1));
            grid.emplace_back(sim::ChannelKind::Miscalibration, p);
        }
    }
    return grid;
}

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
    if (key == "dataset.source") {
        config.dataset_source = value;
    } else if (key == "dataset.split") {
        if (value == "simulation") {
            config.split_policy = data::SplitPolicy::Simulation;
        } else if (value == "hardware") {
            config.split_policy = data::SplitPolicy::Hardware;
        } else {
            throw std::invalid_argument("dataset.split must be simulation or hardware");
        }
    } else if (key == "dataset.toy_normal") {
        config.toy_normal = std::stoi(value);
    } else if (key == "dataset.toy_anomaly") {
        config.toy_anomaly = std::stoi(value);
    } else if (key == "dataset.preprocess") {
        config.preprocess = parse_bool(value);
    } else if (key == "dataset.pca_dims") {
        config.pca_dims = std::stoi(value);
    } else if (key == "feature_map.angle_scale") {
        config.angle_scale = std::stod(value);
    } else if (key == "svr.C") {
        config.svr_config.C = std::stod(value);
    } else if (key == "svr.tube_epsilon") {
        config.svr_config.tube_epsilon = std::stod(value);
    } else if (key == "svr.kkt_tolerance") {
        config.svr_config.kkt_tolerance = std::stod(value);
    } else if (key == "svr.max_iterations") {
        config.svr_config.max_iterations = std::stol(value);
    } else if (key == "svr.threshold_quantile") {
        config.svr_config.threshold_quantile = std::stod(value);
    } else if (key == "svr.rbf_gamma") {
        config.rbf_gamma = std::stod(value);
    } else if (key == "noise.channels") {
        config.noise_grid.channels.clear();
        std::istringstream stream(value);
        std::string item;
        while (std::getline(stream, item, ',')) {
            if (!item.empty()) {
                config.noise_grid.channels.push_back(sim::channel_kind_from_string(item));
            }
        }
    } else if (key == "noise.strengths") {
        config.noise_grid.strengths = parse_double_list(value);
    } else if (key == "noise.miscalibration_steps") {
        config.noise_grid.miscalibration_steps = std::stoi(value);
    } else if (key == "noise.miscalibration_max") {
        config.noise_grid.miscalibration_max = std::stod(value);
    } else if (key == "noise.densify_near_pi") {
        config.noise_grid.densify_near_pi = parse_bool(value);
    } else if (key == "noise.densify_points") {
        config.noise_grid.densify_points = std::stoi(value);
    } else if (key == "attack.epsilons") {
        config.attack_epsilons = parse_double_list(value);
    } else if (key == "attack.iterations") {
        config.attack_iterations = std::stoi(value);
    } else if (key == "attack.restarts") {
        config.attack_restarts = std::stoi(value);
    } else if (key == "attack.fd_step") {
        config.attack_fd_step = std::stod(value);
    } else if (key == "seed") {
        config.seed = std::stoull(value);
    } else if (key == "output.dir") {
        config.output_dir = value;
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config " + path);
    }
    ExperimentConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
            line.pop_back();
        }
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
            line.erase(line.begin());
        }
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        }
        apply_config_entry(config, line.substr(0, eq), line.substr(eq + 1));
    }
    return config;
}

data::Split prepare_data(const ExperimentConfig& config) {
    if (config.dataset_source == "toy") {
        // The generator already emits normalized 5-feature samples; re-fitting
        // PCA or min-max on the all-normal training split would distort the
        // constructed class margin.
        const data::Dataset dataset =
            data::toy_generate(config.toy_normal, config.toy_anomaly, config.seed);
        return data::make_splits(dataset, config.split_policy, config.seed);
    }
    const data::Dataset dataset = data::load_csv(config.dataset_source);
    data::Split split = data::make_splits(dataset, config.split_policy, config.seed);
    if (!config.preprocess) {
        return split;
    }
    if (split.train.n_features() > config.pca_dims) {
        const data::PcaModel pca = data::fit_pca(split.train.features, config.pca_dims);
        split.train.features = data::transform(pca, split.train.features);
        split.test.features = data::transform(pca, split.test.features);
        std::vector<std::string> names;
        for (int c = 0; c < config.pca_dims; ++c) {
            names.push_back("pc" + std::to_string(c));
        }
        split.train.feature_names = names;
        split.test.feature_names = names;
    }
    const data::Normalizer normalizer = data::fit_minmax(split.train.features);
    split.train.features = data::normalize(normalizer, split.train.features);
    split.test.features = data::normalize(normalizer, split.test.features);
    return split;
}

std::vector<RunRecord> run_benchmark(const ExperimentConfig& config) {
    const data::Split split = prepare_data(config);
    const auto train_rows = split.train.feature_rows();
    const auto test_rows = split.test.feature_rows();
    const kernel::FeatureMapSpec spec =
        kernel::FeatureMapSpec::ring(static_cast<int>(split.train.n_features()),
                                     config.angle_scale);

    std::vector<RunRecord> records;
    {
        const std::uint64_t evals = kernel::kernel_eval_count();
        const StopWatch watch;
        const svr::AnomalyDetector detector =
            svr::fit_detector(train_rows, spec, sim::NoiseModel::ideal(), config.svr_config);
        records.push_back(
            evaluate_detector(detector, test_rows, split.test.labels, config, evals, watch));
        records.back().model = "qsvr";
    }
    {
        StopWatch watch;
        RunRecord record;
        record.dataset = dataset_label(config);
        record.model = "csvr";
        record.seed = config.seed;
        const RbfDetector detector =
            fit_rbf_detector(split.train.features, config.rbf_gamma, config.svr_config);
        record.scored.scores = rbf_scores(detector, split.test.features);
        record.scored.labels = split.test.labels;
        record.auc = eval::auc(record.scored);
        long tn = 0, fp = 0, tp = 0, fn = 0;
        for (std::size_t i = 0; i < record.scored.scores.size(); ++i) {
            const int predicted = record.scored.scores[i] > detector.threshold ? 1 : 0;
            if (split.test.labels[i] == 0) {
                predicted == 0 ? ++tn : ++fp;
            } else {
                predicted == 1 ? ++tp : ++fn;
            }
        }
        record.normal_ratio = static_cast<double>(tn) / static_cast<double>(tn + fp);
        record.anomaly_ratio = static_cast<double>(tp) / static_cast<double>(tp + fn);
        record.wall_time_s = watch.seconds();
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<RunRecord> run_noise_sweep(const ExperimentConfig& config) {
    const data::Split split = prepare_data(config);
    const auto train_rows = split.train.feature_rows();
    const auto test_rows = split.test.feature_rows();
    const kernel::FeatureMapSpec spec =
        kernel::FeatureMapSpec::ring(static_cast<int>(split.train.n_features()),
                                     config.angle_scale);

    std::vector<RunRecord> records;
    for (const auto& [kind, strength] : config.noise_grid.points()) {
        const std::uint64_t evals = kernel::kernel_eval_count();
        const StopWatch watch;
        const sim::NoiseModel noise = noise_for(kind, strength);
        const svr::AnomalyDetector detector =
            svr::fit_detector(train_rows, spec, noise, config.svr_config);
        records.push_back(
            evaluate_detector(detector, test_rows, split.test.labels, config, evals, watch));
    }
    return records;
}

std::vector<RunRecord> run_attack_sweep(const ExperimentConfig& config, bool include_noise_grid) {
    const data::Split split = prepare_data(config);
    const auto train_rows = split.train.feature_rows();
    const auto test_rows = split.test.feature_rows();
    const kernel::FeatureMapSpec spec =
        kernel::FeatureMapSpec::ring(static_cast<int>(split.train.n_features()),
                                     config.angle_scale);

    const std::uint64_t baseline_evals = kernel::kernel_eval_count();
    const StopWatch baseline_watch;
    const svr::AnomalyDetector baseline =
        svr::fit_detector(train_rows, spec, sim::NoiseModel::ideal(), config.svr_config);

    std::vector<RunRecord> records;
    records.push_back(evaluate_detector(baseline, test_rows, split.test.labels, config,
                                        baseline_evals, baseline_watch));

    // Noisy detectors are independent of epsilon; fit each grid point once.
    std::map<std::pair<int, double>, svr::AnomalyDetector> noisy_detectors;

    for (double epsilon : config.attack_epsilons) {
        attacks::AttackConfig attack;
        attack.epsilon = epsilon;
        attack.iterations = config.attack_iterations;
        attack.restarts = config.attack_restarts;
        attack.fd_step = config.attack_fd_step;
        attack.seed = config.seed;
        const std::uint64_t attack_evals = kernel::kernel_eval_count();
        const StopWatch attack_watch;
        const std::vector<attacks::AdversarialSample> adversarial =
            attacks::build_adversarial_set(baseline, test_rows, split.test.labels, attack);
        save_adversarial_sets(adversarial, split.test.feature_names, epsilon, config.output_dir);
        std::vector<std::vector<double>> adv_rows;
        adv_rows.reserve(adversarial.size());
        for (const auto& sample : adversarial) {
            adv_rows.push_back(sample.perturbed);
        }

        RunRecord record = evaluate_detector(baseline, adv_rows, split.test.labels, config,
                                             attack_evals, attack_watch);
        record.attack_epsilon = epsilon;
        records.push_back(std::move(record));

        if (!include_noise_grid) {
            continue;
        }
        for (const auto& [kind, strength] : config.noise_grid.points()) {
            const std::uint64_t point_evals = kernel::kernel_eval_count();
            const StopWatch point_watch;
            const auto key = std::make_pair(static_cast<int>(kind), strength);
            auto it = noisy_detectors.find(key);
            if (it == noisy_detectors.end()) {
                it = noisy_detectors
                         .emplace(key, svr::fit_detector(train_rows, spec,
                                                         noise_for(kind, strength),
                                                         config.svr_config))
                         .first;
            }
            RunRecord noisy = evaluate_detector(it->second, adv_rows, split.test.labels, config,
                                                point_evals, point_watch);
            noisy.attack_epsilon = epsilon;
            records.push_back(std::move(noisy));
        }
    }
    return records;
}

std::vector<RunRecord> run_retrain(const ExperimentConfig& config) {
    const data::Split split = prepare_data(config);
    const auto train_rows = split.train.feature_rows();
    const auto test_rows = split.test.feature_rows();
    const kernel::FeatureMapSpec spec =
        kernel::FeatureMapSpec::ring(static_cast<int>(split.train.n_features()),
                                     config.angle_scale);

    const std::uint64_t baseline_evals = kernel::kernel_eval_count();
    const StopWatch baseline_watch;
    const svr::AnomalyDetector baseline =
        svr::fit_detector(train_rows, spec, sim::NoiseModel::ideal(), config.svr_config);

    std::vector<RunRecord> records;
    records.push_back(evaluate_detector(baseline, test_rows, split.test.labels, config,
                                        baseline_evals, baseline_watch));

    for (double epsilon : config.attack_epsilons) {
        attacks::AttackConfig attack;
        attack.epsilon = epsilon;
        attack.iterations = config.attack_iterations;
        attack.restarts = config.attack_restarts;
        attack.fd_step = config.attack_fd_step;
        attack.seed = config.seed;

        const std::uint64_t adv_evals = kernel::kernel_eval_count();
        const StopWatch adv_watch;
        const std::vector<attacks::AdversarialSample> adversarial =
            attacks::build_adversarial_set(baseline, test_rows, split.test.labels, attack);
        save_adversarial_sets(adversarial, split.test.feature_names, epsilon, config.output_dir);
        std::vector<std::vector<double>> adv_rows;
        adv_rows.reserve(adversarial.size());
        for (const auto& sample : adversarial) {
            adv_rows.push_back(sample.perturbed);
        }

        RunRecord base_adv = evaluate_detector(baseline, adv_rows, split.test.labels, config,
                                               adv_evals, adv_watch);
        base_adv.attack_epsilon = epsilon;
        records.push_back(std::move(base_adv));

        const std::uint64_t retrain_evals = kernel::kernel_eval_count();
        const StopWatch retrain_watch;
        const svr::AnomalyDetector retrained =
            attacks::adversarial_retrain(train_rows, spec, config.svr_config, attack);

        RunRecord retrained_clean = evaluate_detector(retrained, test_rows, split.test.labels,
                                                      config, retrain_evals, retrain_watch);
        retrained_clean.retrained = true;
        retrained_clean.retrain_epsilon = epsilon;
        records.push_back(std::move(retrained_clean));

        const std::uint64_t radv_evals = kernel::kernel_eval_count();
        const StopWatch radv_watch;
        RunRecord retrained_adv = evaluate_detector(retrained, adv_rows, split.test.labels,
                                                    config, radv_evals, radv_watch);
        retrained_adv.retrained = true;
        retrained_adv.retrain_epsilon = epsilon;
        retrained_adv.attack_epsilon = epsilon;
        records.push_back(std::move(retrained_adv));
    }
    return records;
}

namespace {

std::string record_id(const RunRecord& record, std::size_t index) {
    std::ostringstream id;
    id << std::setw(4) << std::setfill('0') << index << '_' << record.model;
    if (record.channel != "none") {
        id << '_' << record.channel << '_' << record.strength;
    }
    if (record.attack_epsilon) {
        id << "_adv" << *record.attack_epsilon;
    }
    if (record.retrained) {
        id << "_retrained";
    }
    return id.str();
}

}  // namespace

void emit_reports(const std::vector<RunRecord>& records, const std::string& directory) {
    if (records.empty()) {
        throw std::invalid_argument("no records to report");
    }
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(directory) / "scores");

    std::ofstream main_csv(fs::path(directory) / "records.csv");
    main_csv << "record_id,dataset,model,channel,strength,attack_epsilon,retrain_epsilon,"
                "retrained,auc,normal_ratio,anomaly_ratio,wall_time_s,kernel_evals,seed,"
                "warnings\n";
    std::ofstream roc_csv(fs::path(directory) / "roc_points.csv");
    roc_csv << "record_id,threshold,fpr,tpr\n";
    std::ofstream stats_csv(fs::path(directory) / "kernel_stats.csv");
    stats_csv << "strength,auc,class,mean,std\n";

    for (std::size_t i = 0; i < records.size(); ++i) {
        const RunRecord& record = records[i];
        const std::string id = record_id(record, i);
        main_csv << id << ',' << record.dataset << ',' << record.model << ',' << record.channel
                 << ',' << format_double(record.strength) << ','
                 << (record.attack_epsilon ? format_double(*record.attack_epsilon) : "") << ','
                 << (record.retrain_epsilon ? format_double(*record.retrain_epsilon) : "") << ','
                 << (record.retrained ? 1 : 0) << ',' << format_double(record.auc) << ','
                 << format_double(record.normal_ratio) << ','
                 << format_double(record.anomaly_ratio) << ','
                 << format_double(record.wall_time_s) << ',' << record.kernel_evals << ','
                 << record.seed << ',' << record.warnings << '\n';

        std::ofstream score_csv(fs::path(directory) / "scores" / (id + ".csv"));
        score_csv << "score,label\n";
        for (std::size_t k = 0; k < record.scored.scores.size(); ++k) {
            score_csv << format_double(record.scored.scores[k]) << ','
                      << record.scored.labels[k] << '\n';
        }

        for (const eval::RocPoint& point : eval::roc_points(record.scored)) {
            roc_csv << id << ',' << format_double(point.threshold) << ','
                    << format_double(point.fpr) << ',' << format_double(point.tpr) << '\n';
        }

        for (const kernel::ClassKernelStats& stats : record.kernel_stats) {
            stats_csv << format_double(record.strength) << ',' << format_double(record.auc) << ','
                      << stats.label << ',' << format_double(stats.mean) << ','
                      << format_double(stats.stddev) << '\n';
        }
    }
    if (!main_csv || !roc_csv || !stats_csv) {
        throw std::runtime_error("report emission to " + directory + " failed");
    }
}

void emit_diagnostics(const ExperimentConfig& config, const std::string& directory) {
    const data::Split split = prepare_data(config);
    const eval::DatasetDiagnostics diag = eval::dataset_diagnostics(split.test);
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    std::ofstream out(fs::path(directory) / "diagnostics.csv");
    out << "dataset,min_ks_p_value,max_feature_variance,input_space\n";
    out << dataset_label(config) << ',' << format_double(diag.min_ks_p_value) << ','
        << format_double(diag.max_feature_variance) << ",normalized\n";
    if (!out) {
        throw std::runtime_error("diagnostics emission to " + directory + " failed");
    }
}

}  // namespace qsvr::experiment
