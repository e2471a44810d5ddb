#pragma once

#include "qsvr/simulator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qsvr::kernel {

// Data-encoding circuit layout: one qubit per feature, a layer of RZ gates and
// a layer of RX gates (each encoding angle_scale * x_q), then an IsingZZ layer
// whose angle on pair (a, b) is angle_scale^2 * x_a * x_b.
struct FeatureMapSpec {
    int n_features = 0;
    double angle_scale = 3.14159265358979323846;
    std::vector<std::pair<int, int>> entanglers;

    // Ring pattern (0,1),(1,2),...,(n-1,0) with the default angle scale.
    static FeatureMapSpec ring(int n_features, double angle_scale = 3.14159265358979323846);

    void validate() const;
};

struct GramMatrix {
    Eigen::MatrixXd values;
    std::string row_samples;
    std::string col_samples;
    std::string spec_hash;
    std::string noise_kind = "none";
    double noise_strength = 0.0;
    std::optional<std::uint64_t> seed;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

struct ClassKernelStats {
    int label = 0;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
};

// Hash over everything that determines kernel values: feature-map layout,
// angle scale and the noise configuration. Persisted Grams carry it so a file
// cannot be silently reused under an incompatible setup.
std::string config_hash(const FeatureMapSpec& spec, const sim::NoiseModel& noise);

// Gate sequence of U(x) for a normalized feature vector x.
std::vector<sim::Gate> build_feature_map(const std::vector<double>& x,
                                         const FeatureMapSpec& spec);

// Fidelity kernel via the inversion test: runs U(x_j) followed by the adjoint
// circuit of U(x_i) and returns the all-zero-state probability.
double kernel_value(const std::vector<double>& x_i, const std::vector<double>& x_j,
                    const FeatureMapSpec& spec,
                    const sim::NoiseModel& noise = sim::NoiseModel::ideal());

// Encoding states U(x)|0...0> for a sample batch. For ideal kernels,
// kappa(a, b) = |<phi(a)|phi(b)>|^2, so cached states turn repeated kernel
// rows into plain inner products.
std::vector<sim::StateVector> embedding_states(const std::vector<std::vector<double>>& samples,
                                               const FeatureMapSpec& spec);

// kappa(anchor_i, x) for every cached anchor state. Ideal kernels only.
Eigen::VectorXd kernel_row(const std::vector<sim::StateVector>& anchors,
                           const std::vector<double>& x, const FeatureMapSpec& spec);

// Self-Gram over one sample set. Only the upper triangle plus diagonal is
// evaluated; the lower triangle is mirrored, so K_ij = K_ji holds exactly.
GramMatrix gram(const std::vector<std::vector<double>>& samples, const FeatureMapSpec& spec,
                const sim::NoiseModel& noise = sim::NoiseModel::ideal(),
                const std::string& sample_set_id = "");

// Cross-Gram: entry (r, c) = kernel_value(rows[r], cols[c]).
GramMatrix gram(const std::vector<std::vector<double>>& rows,
                const std::vector<std::vector<double>>& cols, const FeatureMapSpec& spec,
                const sim::NoiseModel& noise = sim::NoiseModel::ideal(),
                const std::string& row_set_id = "", const std::string& col_set_id = "");

GramMatrix transposed(const GramMatrix& gram);

// Per-class mean and standard deviation of the kernel values, grouped by the
// label of each row. Population standard deviation.
std::vector<ClassKernelStats> kernel_class_stats(const GramMatrix& gram,
                                                 const std::vector<int>& row_labels);

void save_gram(const GramMatrix& gram, const std::string& path);
GramMatrix load_gram(const std::string& path);
// Loading with a configuration rejects files whose spec_hash does not match.
GramMatrix load_gram(const std::string& path, const FeatureMapSpec& spec,
                     const sim::NoiseModel& noise);

// Total kernel circuit evaluations since process start (or the last reset).
// Used by the experiment runner to audit per-run cost.
std::uint64_t kernel_eval_count();
void reset_kernel_eval_count();

}  // namespace qsvr::kernel
