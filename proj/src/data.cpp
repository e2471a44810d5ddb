#include "qsvr/data.hpp"

#include "qsvr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qsvr::data {

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, sep)) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        cells.emplace_back();
    }
    return cells;
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

}  // namespace

std::vector<std::vector<double>> Dataset::feature_rows() const {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        auto& row = rows[static_cast<std::size_t>(r)];
        row.resize(static_cast<std::size_t>(features.cols()));
        for (Eigen::Index c = 0; c < features.cols(); ++c) {
            row[static_cast<std::size_t>(c)] = features(r, c);
        }
    }
    return rows;
}

std::vector<std::vector<double>> Dataset::feature_rows(int label) const {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        if (labels[static_cast<std::size_t>(r)] != label) {
            continue;
        }
        std::vector<double> row(static_cast<std::size_t>(features.cols()));
        for (Eigen::Index c = 0; c < features.cols(); ++c) {
            row[static_cast<std::size_t>(c)] = features(r, c);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        throw std::runtime_error(path + ": empty file, expected a header row");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const std::vector<std::string> header = split_line(line, ',');
    long label_index = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == label_column) {
            label_index = static_cast<long>(c);
            break;
        }
    }
    if (label_index < 0) {
        throw std::runtime_error(path + ": missing label column '" + label_column + "'");
    }

    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (static_cast<long>(c) != label_index) {
            feature_names.push_back(header[c]);
        }
    }

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> cells = split_line(line, ',');
        if (cells.size() != header.size()) {
            throw std::runtime_error(path + ": row " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        }
        std::vector<double> row;
        row.reserve(feature_names.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::size_t consumed = 0;
            double value = 0.0;
            try {
                value = std::stod(cells[c], &consumed);
            } catch (const std::exception&) {
                consumed = 0;
            }
            if (consumed != cells[c].size() || cells[c].empty()) {
                throw std::runtime_error(path + ": non-numeric cell '" + cells[c] + "' at row " +
                                         std::to_string(line_no) + ", column " + header[c]);
            }
            if (static_cast<long>(c) == label_index) {
                if (value != 0.0 && value != 1.0) {
                    throw std::runtime_error(path + ": label at row " + std::to_string(line_no) +
                                             " must be 0 or 1");
                }
                labels.push_back(static_cast<int>(value));
            } else {
                row.push_back(value);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::runtime_error(path + ": no data rows");
    }

    Dataset dataset;
    dataset.name = path;
    dataset.feature_names = std::move(feature_names);
    dataset.labels = std::move(labels);
    dataset.features.resize(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            dataset.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c];
        }
    }
    return dataset;
}

void save_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    for (const auto& name : dataset.feature_names) {
        out << name << ',';
    }
    out << "label\n";
    for (Eigen::Index r = 0; r < dataset.n_samples(); ++r) {
        for (Eigen::Index c = 0; c < dataset.n_features(); ++c) {
            out << format_double(dataset.features(r, c)) << ',';
        }
        out << dataset.labels[static_cast<std::size_t>(r)] << '\n';
    }
    if (!out) {
        throw std::runtime_error("write to " + path + " failed");
    }
}

PcaModel fit_pca(const Eigen::MatrixXd& features, int k) {
    const Eigen::Index n = features.rows();
    const Eigen::Index d = features.cols();
    if (k < 1) {
        throw std::invalid_argument("PCA needs k >= 1");
    }
    if (n < 2) {
        throw std::invalid_argument("PCA needs at least 2 samples");
    }

    PcaModel model;
    model.mean = features.colwise().mean();
    const Eigen::MatrixXd centered = features.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd covariance =
        centered.transpose() * centered / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("PCA eigendecomposition failed");
    }

    model.components = Eigen::MatrixXd::Zero(k, d);
    model.explained_variance = Eigen::VectorXd::Zero(k);
    const Eigen::Index available = std::min<Eigen::Index>(k, d);
    model.padded = available < k;
    // Eigen returns ascending eigenvalues; take the top ones in descending
    // order and fix each direction's sign so its largest-magnitude entry is
    // positive.
    for (Eigen::Index i = 0; i < available; ++i) {
        const Eigen::Index src = d - 1 - i;
        Eigen::VectorXd direction = solver.eigenvectors().col(src);
        Eigen::Index peak = 0;
        direction.cwiseAbs().maxCoeff(&peak);
        if (direction[peak] < 0.0) {
            direction = -direction;
        }
        model.components.row(i) = direction.transpose();
        model.explained_variance[i] = std::max(0.0, solver.eigenvalues()[src]);
    }
    return model;
}

Eigen::MatrixXd transform(const PcaModel& model, const Eigen::MatrixXd& features) {
    if (features.cols() != model.mean.size()) {
        throw std::invalid_argument("feature width does not match PCA model");
    }
    return (features.rowwise() - model.mean.transpose()) * model.components.transpose();
}

Normalizer fit_minmax(const Eigen::MatrixXd& train_features) {
    if (train_features.rows() < 1) {
        throw std::invalid_argument("cannot fit a normalizer on an empty set");
    }
    Normalizer normalizer;
    normalizer.mins = train_features.colwise().minCoeff();
    normalizer.maxs = train_features.colwise().maxCoeff();
    for (Eigen::Index c = 0; c < train_features.cols(); ++c) {
        if (normalizer.maxs[c] == normalizer.mins[c]) {
            normalizer.constant_features.push_back(static_cast<int>(c));
        }
    }
    return normalizer;
}

Eigen::MatrixXd normalize(const Normalizer& normalizer, const Eigen::MatrixXd& features) {
    if (features.cols() != normalizer.mins.size()) {
        throw std::invalid_argument("feature width does not match normalizer");
    }
    Eigen::MatrixXd result(features.rows(), features.cols());
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
        const double lo = normalizer.mins[c];
        const double hi = normalizer.maxs[c];
        for (Eigen::Index r = 0; r < features.rows(); ++r) {
            if (hi == lo) {
                result(r, c) = 0.5;
            } else {
                result(r, c) = std::clamp((features(r, c) - lo) / (hi - lo), 0.0, 1.0);
            }
        }
    }
    return result;
}

Dataset toy_generate(int n_normal, int n_anomaly, std::uint64_t seed) {
    if (n_normal < 1 || n_anomaly < 1) {
        throw std::invalid_argument("toy dataset needs positive class counts");
    }
    constexpr int kDims = 5;
    Rng rng(seed);
    Dataset dataset;
    dataset.name = "toy";
    dataset.provenance = "synthetic, seed " + std::to_string(seed);
    dataset.feature_names = {"f0", "f1", "f2", "f3", "f4"};
    dataset.features.resize(n_normal + n_anomaly, kDims);
    dataset.labels.assign(static_cast<std::size_t>(n_normal + n_anomaly), 0);
    for (int r = 0; r < n_normal + n_anomaly; ++r) {
        const bool anomaly = r >= n_normal;
        dataset.labels[static_cast<std::size_t>(r)] = anomaly ? 1 : 0;
        dataset.features(r, 0) = anomaly ? rng.uniform(0.7, 1.0) : rng.uniform(0.0, 0.3);
        for (int c = 1; c < kDims; ++c) {
            dataset.features(r, c) = rng.uniform();
        }
    }
    return dataset;
}

Split make_splits(const Dataset& dataset, SplitPolicy policy, std::uint64_t seed) {
    const int train_size = policy == SplitPolicy::Simulation ? 100 : 30;
    const int test_size = policy == SplitPolicy::Simulation ? 100 : 50;
    const int test_half = test_size / 2;

    std::vector<Eigen::Index> normal_idx;
    std::vector<Eigen::Index> anomaly_idx;
    for (Eigen::Index r = 0; r < dataset.n_samples(); ++r) {
        (dataset.labels[static_cast<std::size_t>(r)] == 0 ? normal_idx : anomaly_idx).push_back(r);
    }
    if (static_cast<int>(normal_idx.size()) < train_size + test_half) {
        throw std::invalid_argument("need at least " + std::to_string(train_size + test_half) +
                                    " normal samples, have " + std::to_string(normal_idx.size()));
    }
    if (static_cast<int>(anomaly_idx.size()) < test_half) {
        throw std::invalid_argument("need at least " + std::to_string(test_half) +
                                    " anomalous samples, have " +
                                    std::to_string(anomaly_idx.size()));
    }

    Rng rng(seed);
    rng.shuffle(normal_idx);
    rng.shuffle(anomaly_idx);

    auto take = [&](const std::vector<Eigen::Index>& src, int offset, int count,
                    std::vector<Eigen::Index>& dst) {
        dst.insert(dst.end(), src.begin() + offset, src.begin() + offset + count);
    };
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> test_rows;
    take(normal_idx, 0, train_size, train_rows);
    take(normal_idx, train_size, test_half, test_rows);
    take(anomaly_idx, 0, test_half, test_rows);

    auto subset = [&](const std::vector<Eigen::Index>& rows, const std::string& suffix) {
        Dataset out;
        out.name = dataset.name + suffix;
        out.provenance = dataset.provenance;
        out.feature_names = dataset.feature_names;
        out.features.resize(static_cast<Eigen::Index>(rows.size()), dataset.n_features());
        out.labels.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out.features.row(static_cast<Eigen::Index>(i)) = dataset.features.row(rows[i]);
            out.labels[i] = dataset.labels[static_cast<std::size_t>(rows[i])];
        }
        return out;
    };
    return {subset(train_rows, ":train"), subset(test_rows, ":test")};
}

}  // namespace qsvr::data
