#include "qsvr/kernel.hpp"

#include "qsvr/parallel.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsvr::kernel {

namespace {

std::atomic<std::uint64_t> g_kernel_evals{0};

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

// FNV-1a over a canonical description string; stable across platforms.
std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    char buffer[20];
    std::snprintf(buffer, sizeof(buffer), "%016" PRIx64, hash);
    return buffer;
}

void check_sample(const std::vector<double>& x, const FeatureMapSpec& spec) {
    if (static_cast<int>(x.size()) != spec.n_features) {
        throw std::invalid_argument("sample has " + std::to_string(x.size()) +
                                    " features, feature map expects " +
                                    std::to_string(spec.n_features));
    }
}

// U(x_j) followed by the adjoint of U(x_i): reversed gate order, negated angles.
std::vector<sim::Gate> inversion_test_circuit(const std::vector<double>& x_i,
                                              const std::vector<double>& x_j,
                                              const FeatureMapSpec& spec) {
    std::vector<sim::Gate> circuit = build_feature_map(x_j, spec);
    const std::vector<sim::Gate> encode_i = build_feature_map(x_i, spec);
    circuit.reserve(circuit.size() + encode_i.size());
    for (auto it = encode_i.rbegin(); it != encode_i.rend(); ++it) {
        circuit.push_back(it->adjoint());
    }
    return circuit;
}

// Statevector of U(x)|0...0>; valid shortcut for ideal kernels only, where
// kappa(a, b) = |<phi(a)|phi(b)>|^2 equals the inversion-test probability.
sim::StateVector embedding_state(const std::vector<double>& x, const FeatureMapSpec& spec) {
    sim::StateVector state = sim::StateVector::zero_state(spec.n_features);
    for (const sim::Gate& gate : build_feature_map(x, spec)) {
        sim::apply_gate(state, gate);
    }
    return state;
}

double overlap_probability(const sim::StateVector& a, const sim::StateVector& b) {
    sim::Complex inner{0.0, 0.0};
    for (std::size_t k = 0; k < a.amplitudes.size(); ++k) {
        inner += std::conj(a.amplitudes[k]) * b.amplitudes[k];
    }
    return std::norm(inner);
}

}  // namespace

FeatureMapSpec FeatureMapSpec::ring(int n_features, double angle_scale) {
    FeatureMapSpec spec;
    spec.n_features = n_features;
    spec.angle_scale = angle_scale;
    for (int q = 0; q < n_features; ++q) {
        spec.entanglers.emplace_back(q, (q + 1) % n_features);
    }
    spec.validate();
    return spec;
}

void FeatureMapSpec::validate() const {
    if (n_features < 2) {
        throw std::invalid_argument("feature map needs at least 2 features for the IsingZZ layer");
    }
    for (const auto& [a, b] : entanglers) {
        if (a == b || a < 0 || b < 0 || a >= n_features || b >= n_features) {
            throw std::invalid_argument("entangler pair (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ") invalid for " +
                                        std::to_string(n_features) + " qubits");
        }
    }
}

std::string config_hash(const FeatureMapSpec& spec, const sim::NoiseModel& noise) {
    std::ostringstream canon;
    canon << "n=" << spec.n_features << ";scale=" << format_double(spec.angle_scale) << ";pairs=";
    for (const auto& [a, b] : spec.entanglers) {
        canon << a << "-" << b << ",";
    }
    if (noise.is_ideal()) {
        canon << ";noise=none";
    } else {
        canon << ";noise=" << sim::to_string(noise.channel->kind)
              << ";strength=" << format_double(noise.channel->strength);
    }
    return fnv1a_hex(canon.str());
}

std::vector<sim::Gate> build_feature_map(const std::vector<double>& x,
                                         const FeatureMapSpec& spec) {
    spec.validate();
    check_sample(x, spec);
    const double s = spec.angle_scale;
    std::vector<sim::Gate> gates;
    gates.reserve(2 * x.size() + spec.entanglers.size());
    for (int q = 0; q < spec.n_features; ++q) {
        gates.push_back(sim::Gate::rz(q, s * x[q]));
    }
    for (int q = 0; q < spec.n_features; ++q) {
        gates.push_back(sim::Gate::rx(q, s * x[q]));
    }
    for (const auto& [a, b] : spec.entanglers) {
        gates.push_back(sim::Gate::ising_zz(a, b, s * s * x[a] * x[b]));
    }
    return gates;
}

double kernel_value(const std::vector<double>& x_i, const std::vector<double>& x_j,
                    const FeatureMapSpec& spec, const sim::NoiseModel& noise) {
    check_sample(x_i, spec);
    check_sample(x_j, spec);
    g_kernel_evals.fetch_add(1, std::memory_order_relaxed);
    const auto state =
        sim::run_circuit(inversion_test_circuit(x_i, x_j, spec), spec.n_features, noise);
    return sim::all_zero_probability(state);
}

std::vector<sim::StateVector> embedding_states(const std::vector<std::vector<double>>& samples,
                                               const FeatureMapSpec& spec) {
    std::vector<sim::StateVector> states(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        states[i] = embedding_state(samples[i], spec);
    });
    return states;
}

Eigen::VectorXd kernel_row(const std::vector<sim::StateVector>& anchors,
                           const std::vector<double>& x, const FeatureMapSpec& spec) {
    const sim::StateVector state = embedding_state(x, spec);
    g_kernel_evals.fetch_add(anchors.size(), std::memory_order_relaxed);
    Eigen::VectorXd row(static_cast<Eigen::Index>(anchors.size()));
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        row[static_cast<Eigen::Index>(i)] = overlap_probability(anchors[i], state);
    }
    return row;
}

GramMatrix gram(const std::vector<std::vector<double>>& samples, const FeatureMapSpec& spec,
                const sim::NoiseModel& noise, const std::string& sample_set_id) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    GramMatrix result;
    result.values.resize(n, n);
    result.row_samples = sample_set_id;
    result.col_samples = sample_set_id;
    result.spec_hash = config_hash(spec, noise);
    if (!noise.is_ideal()) {
        result.noise_kind = sim::to_string(noise.channel->kind);
        result.noise_strength = noise.channel->strength;
    }

    if (noise.is_ideal()) {
        // Ideal kernels factor through the embedding states; evaluating the
        // upper triangle as pairwise overlaps avoids re-running the encoding
        // circuit per pair.
        std::vector<sim::StateVector> states(samples.size());
        parallel_for(samples.size(), [&](std::size_t i) {
            states[i] = embedding_state(samples[i], spec);
        });
        g_kernel_evals.fetch_add(samples.size() * (samples.size() + 1) / 2,
                                 std::memory_order_relaxed);
        parallel_for(samples.size(), [&](std::size_t i) {
            for (std::size_t j = i; j < samples.size(); ++j) {
                const double value = overlap_probability(states[i], states[j]);
                result.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
                result.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
            }
        });
        return result;
    }

    parallel_for(samples.size(), [&](std::size_t i) {
        for (std::size_t j = i; j < samples.size(); ++j) {
            const double value = kernel_value(samples[i], samples[j], spec, noise);
            result.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
            result.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
        }
    });
    return result;
}

GramMatrix gram(const std::vector<std::vector<double>>& rows,
                const std::vector<std::vector<double>>& cols, const FeatureMapSpec& spec,
                const sim::NoiseModel& noise, const std::string& row_set_id,
                const std::string& col_set_id) {
    GramMatrix result;
    result.values.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(cols.size()));
    result.row_samples = row_set_id;
    result.col_samples = col_set_id;
    result.spec_hash = config_hash(spec, noise);
    if (!noise.is_ideal()) {
        result.noise_kind = sim::to_string(noise.channel->kind);
        result.noise_strength = noise.channel->strength;
    }

    if (noise.is_ideal()) {
        std::vector<sim::StateVector> row_states(rows.size());
        std::vector<sim::StateVector> col_states(cols.size());
        parallel_for(rows.size(), [&](std::size_t r) {
            row_states[r] = embedding_state(rows[r], spec);
        });
        parallel_for(cols.size(), [&](std::size_t c) {
            col_states[c] = embedding_state(cols[c], spec);
        });
        g_kernel_evals.fetch_add(rows.size() * cols.size(), std::memory_order_relaxed);
        parallel_for(rows.size(), [&](std::size_t r) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                result.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    overlap_probability(row_states[r], col_states[c]);
            }
        });
        return result;
    }

    parallel_for(rows.size(), [&](std::size_t r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            result.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                kernel_value(rows[r], cols[c], spec, noise);
        }
    });
    return result;
}

GramMatrix transposed(const GramMatrix& gram) {
    GramMatrix result = gram;
    result.values = gram.values.transpose();
    result.row_samples = gram.col_samples;
    result.col_samples = gram.row_samples;
    return result;
}

std::vector<ClassKernelStats> kernel_class_stats(const GramMatrix& gram,
                                                 const std::vector<int>& row_labels) {
    if (static_cast<Eigen::Index>(row_labels.size()) != gram.rows()) {
        throw std::invalid_argument("row label count does not match Gram rows");
    }
    std::vector<ClassKernelStats> stats;
    for (int label : {0, 1}) {
        double sum = 0.0;
        std::size_t count = 0;
        for (Eigen::Index r = 0; r < gram.rows(); ++r) {
            if (row_labels[static_cast<std::size_t>(r)] != label) {
                continue;
            }
            for (Eigen::Index c = 0; c < gram.cols(); ++c) {
                sum += gram.values(r, c);
                ++count;
            }
        }
        if (count == 0) {
            throw std::invalid_argument("no rows with label " + std::to_string(label));
        }
        const double mean = sum / static_cast<double>(count);
        double sq = 0.0;
        for (Eigen::Index r = 0; r < gram.rows(); ++r) {
            if (row_labels[static_cast<std::size_t>(r)] != label) {
                continue;
            }
            for (Eigen::Index c = 0; c < gram.cols(); ++c) {
                const double d = gram.values(r, c) - mean;
                sq += d * d;
            }
        }
        stats.push_back({label, mean, std::sqrt(sq / static_cast<double>(count)), count});
    }
    return stats;
}

void save_gram(const GramMatrix& gram, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << "n_rows=" << gram.rows() << "\n";
    out << "n_cols=" << gram.cols() << "\n";
    out << "spec_hash=" << gram.spec_hash << "\n";
    out << "noise_kind=" << gram.noise_kind << "\n";
    out << "noise_strength=" << format_double(gram.noise_strength) << "\n";
    if (gram.seed) {
        out << "seed=" << *gram.seed << "\n";
    }
    if (!gram.row_samples.empty()) {
        out << "row_samples=" << gram.row_samples << "\n";
    }
    if (!gram.col_samples.empty()) {
        out << "col_samples=" << gram.col_samples << "\n";
    }
    for (Eigen::Index r = 0; r < gram.rows(); ++r) {
        for (Eigen::Index c = 0; c < gram.cols(); ++c) {
            if (c > 0) {
                out << ' ';
            }
            out << format_double(gram.values(r, c));
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("write to " + path + " failed");
    }
}

GramMatrix load_gram(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    GramMatrix gram;
    Eigen::Index n_rows = -1;
    Eigen::Index n_cols = -1;
    std::string line;
    // Header: key=value lines until the first row of numbers.
    while (true) {
        const auto pos = in.tellg();
        if (!std::getline(in, line)) {
            throw std::runtime_error(path + ": missing matrix rows");
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            in.seekg(pos);
            break;
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "n_rows") {
            n_rows = std::stol(value);
        } else if (key == "n_cols") {
            n_cols = std::stol(value);
        } else if (key == "spec_hash") {
            gram.spec_hash = value;
        } else if (key == "noise_kind") {
            gram.noise_kind = value;
        } else if (key == "noise_strength") {
            gram.noise_strength = std::stod(value);
        } else if (key == "seed") {
            gram.seed = std::stoull(value);
        } else if (key == "row_samples") {
            gram.row_samples = value;
        } else if (key == "col_samples") {
            gram.col_samples = value;
        }
        // Unknown keys are ignored so the header stays extendable.
    }
    if (n_rows < 0 || n_cols < 0 || gram.spec_hash.empty()) {
        throw std::runtime_error(path + ": corrupt header, need n_rows, n_cols and spec_hash");
    }
    gram.values.resize(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        if (!std::getline(in, line)) {
            throw std::runtime_error(path + ": expected " + std::to_string(n_rows) +
                                     " rows, got " + std::to_string(r));
        }
        std::istringstream row(line);
        for (Eigen::Index c = 0; c < n_cols; ++c) {
            if (!(row >> gram.values(r, c))) {
                throw std::runtime_error(path + ": row " + std::to_string(r) + " has fewer than " +
                                         std::to_string(n_cols) + " values");
            }
        }
    }
    return gram;
}

GramMatrix load_gram(const std::string& path, const FeatureMapSpec& spec,
                     const sim::NoiseModel& noise) {
    GramMatrix gram = load_gram(path);
    const std::string expected = config_hash(spec, noise);
    if (gram.spec_hash != expected) {
        throw std::runtime_error(path + ": spec hash " + gram.spec_hash +
                                 " does not match expected " + expected);
    }
    return gram;
}

std::uint64_t kernel_eval_count() { return g_kernel_evals.load(std::memory_order_relaxed); }

void reset_kernel_eval_count() { g_kernel_evals.store(0, std::memory_order_relaxed); }

}  // namespace qsvr::kernel
