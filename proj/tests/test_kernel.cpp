#include "qsvr/kernel.hpp"

#include "oracle_dense.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace qsvr;
using kernel::FeatureMapSpec;
using sim::ChannelKind;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE_BEGIN("kernel");

TEST_CASE("feature map spec validation") {
    CHECK_THROWS_AS(FeatureMapSpec::ring(1), std::invalid_argument);
    FeatureMapSpec spec = FeatureMapSpec::ring(3);
    spec.entanglers.push_back({0, 3});
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.entanglers.back() = {2, 2};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("build_feature_map emits RZ, RX then IsingZZ layers with exact angles") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(5, 2.0);
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
    const auto gates = kernel::build_feature_map(x, spec);
    REQUIRE(gates.size() == 15);
    for (int q = 0; q < 5; ++q) {
        CHECK(gates[static_cast<std::size_t>(q)].kind == sim::GateKind::RZ);
        CHECK(gates[static_cast<std::size_t>(q)].qubit0 == q);
        CHECK(gates[static_cast<std::size_t>(q)].angle == 2.0 * x[static_cast<std::size_t>(q)]);
        CHECK(gates[static_cast<std::size_t>(q + 5)].kind == sim::GateKind::RX);
        CHECK(gates[static_cast<std::size_t>(q + 5)].angle ==
              2.0 * x[static_cast<std::size_t>(q)]);
    }
    for (int k = 0; k < 5; ++k) {
        const auto& gate = gates[static_cast<std::size_t>(10 + k)];
        const auto& pair = spec.entanglers[static_cast<std::size_t>(k)];
        CHECK(gate.kind == sim::GateKind::IsingZZ);
        CHECK(gate.qubit0 == pair.first);
        CHECK(gate.qubit1 == pair.second);
        CHECK(gate.angle == 4.0 * x[static_cast<std::size_t>(pair.first)] *
                                x[static_cast<std::size_t>(pair.second)]);
    }
    CHECK_THROWS_AS(kernel::build_feature_map({0.1, 0.2}, spec), std::invalid_argument);
}

TEST_CASE("build_feature_map of the zero vector acts as the identity") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(3);
    const auto gates = kernel::build_feature_map({0.0, 0.0, 0.0}, spec);
    const auto state = sim::run_circuit(gates, 3);
    CHECK(sim::all_zero_probability(state) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noiseless kernel is 1 on the diagonal and symmetric") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(4);
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = support::random_sample(4, rng);
        const auto b = support::random_sample(4, rng);
        CHECK(kernel::kernel_value(a, a, spec) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(kernel::kernel_value(a, b, spec) ==
              doctest::Approx(kernel::kernel_value(b, a, spec)).epsilon(1e-10));
    }
}

TEST_CASE("a fixed noisy pair matches the dense-matrix oracle") {
    FeatureMapSpec spec = FeatureMapSpec::ring(2);
    const std::vector<double> a{0.3, 0.8};
    const std::vector<double> b{0.6, 0.1};
    const auto noise = sim::NoiseModel::with(sim::make_channel(ChannelKind::BitFlip, 0.2));
    const double value = kernel::kernel_value(a, b, spec, noise);
    CHECK(value == doctest::Approx(oracle::kernel_value(a, b, spec, noise)).epsilon(1e-10));
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
}

TEST_CASE("noisy kernel values match the dense oracle on random 2- and 3-qubit instances") {
    Rng rng(67);
    const ChannelKind kinds[] = {ChannelKind::AmplitudeDamping, ChannelKind::BitFlip,
                                 ChannelKind::Depolarizing,     ChannelKind::Miscalibration,
                                 ChannelKind::PhaseDamping,     ChannelKind::PhaseFlip};
    for (int trial = 0; trial < 18; ++trial) {
        const int dims = 2 + static_cast<int>(rng.below(2));
        const FeatureMapSpec spec = FeatureMapSpec::ring(dims);
        const auto a = support::random_sample(dims, rng);
        const auto b = support::random_sample(dims, rng);
        const ChannelKind kind = kinds[trial % 6];
        const double strength =
            kind == ChannelKind::Miscalibration ? rng.uniform(0.0, 2.0 * kPi) : rng.uniform();
        const auto noise = sim::NoiseModel::with(sim::make_channel(kind, strength));
        CHECK(kernel::kernel_value(a, b, spec, noise) ==
              doctest::Approx(oracle::kernel_value(a, b, spec, noise)).epsilon(1e-10));
    }
}

TEST_CASE("ideal kernel values match the dense oracle too") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const int dims = 2 + static_cast<int>(rng.below(2));
        const FeatureMapSpec spec = FeatureMapSpec::ring(dims);
        const auto a = support::random_sample(dims, rng);
        const auto b = support::random_sample(dims, rng);
        CHECK(kernel::kernel_value(a, b, spec) ==
              doctest::Approx(oracle::kernel_value(a, b, spec, sim::NoiseModel::ideal()))
                  .epsilon(1e-10));
    }
}

TEST_CASE("self-Gram of identical samples is all ones") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(3);
    const std::vector<std::vector<double>> samples(4, {0.2, 0.5, 0.9});
    const auto gram = kernel::gram(samples, spec);
    CHECK((gram.values.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("noiseless self-Gram: symmetric, unit diagonal, PSD, entries in range") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(5);
    Rng rng(73);
    const auto samples = support::random_samples(20, 5, rng);
    const auto gram = kernel::gram(samples, spec, sim::NoiseModel::ideal(), "random20");
    CHECK((gram.values - gram.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
        CHECK(std::abs(gram.values(i, i) - 1.0) < 1e-10);
    }
    CHECK(gram.values.minCoeff() >= -1e-12);
    CHECK(gram.values.maxCoeff() <= 1.0 + 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram.values, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
}

TEST_CASE("ideal Gram fast path agrees with per-entry inversion-test values") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(4);
    Rng rng(79);
    const auto rows = support::random_samples(5, 4, rng);
    const auto cols = support::random_samples(3, 4, rng);
    const auto cross = kernel::gram(rows, cols, spec);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            CHECK(cross.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) ==
                  doctest::Approx(kernel::kernel_value(rows[r], cols[c], spec)).epsilon(1e-12));
        }
    }
}

TEST_CASE("small noisy self-Gram equals entry-wise oracle values and stays in range") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(2);
    Rng rng(83);
    const auto samples = support::random_samples(3, 2, rng);
    const auto noise = sim::NoiseModel::with(sim::make_channel(ChannelKind::AmplitudeDamping, 0.3));
    const auto gram = kernel::gram(samples, spec, noise);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i; j < 3; ++j) {
            const double expected = oracle::kernel_value(samples[i], samples[j], spec, noise);
            CHECK(gram.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
                  doctest::Approx(expected).epsilon(1e-10));
            CHECK(gram.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) ==
                  gram.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    }
    CHECK(gram.values.minCoeff() >= -1e-12);
    CHECK(gram.values.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("noisy Gram entries stay in [0,1] across the experiment grid channels") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(3);
    Rng rng(89);
    const auto samples = support::random_samples(4, 3, rng);
    const ChannelKind kinds[] = {ChannelKind::AmplitudeDamping, ChannelKind::BitFlip,
                                 ChannelKind::Depolarizing,     ChannelKind::PhaseDamping,
                                 ChannelKind::PhaseFlip};
    for (ChannelKind kind : kinds) {
        for (double strength : {0.01, 0.2, 0.5}) {
            const auto gram =
                kernel::gram(samples, spec, sim::NoiseModel::with(sim::make_channel(kind, strength)));
            CHECK(gram.values.minCoeff() >= -1e-12);
            CHECK(gram.values.maxCoeff() <= 1.0 + 1e-12);
        }
    }
    for (double strength : {0.0, kPi / 3.0, kPi, 2.0 * kPi}) {
        const auto gram = kernel::gram(
            samples, spec,
            sim::NoiseModel::with(sim::make_channel(ChannelKind::Miscalibration, strength)));
        CHECK(gram.values.minCoeff() >= -1e-12);
        CHECK(gram.values.maxCoeff() <= 1.0 + 1e-12);
    }
}

TEST_CASE("kernel values under miscalibration are 2pi-periodic in the overrotation") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(3);
    Rng rng(97);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = support::random_sample(3, rng);
        const auto b = support::random_sample(3, rng);
        const double p = rng.uniform(0.0, 2.0 * kPi);
        const double at_p = kernel::kernel_value(
            a, b, spec, sim::NoiseModel::with(sim::make_channel(ChannelKind::Miscalibration, p)));
        const double at_p_plus = kernel::kernel_value(
            a, b, spec,
            sim::NoiseModel::with(sim::make_channel(ChannelKind::Miscalibration, p + 2.0 * kPi)));
        CHECK(at_p == doctest::Approx(at_p_plus).epsilon(1e-10));
    }
}

TEST_CASE("depolarizing noise drives kernel values toward 1/2^n") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(5);
    const std::vector<double> a{0.12, 0.93, 0.41, 0.66, 0.28};
    const std::vector<double> b{0.81, 0.05, 0.57, 0.33, 0.74};
    const double mixed = 1.0 / 32.0;
    double previous_gap = std::abs(kernel::kernel_value(a, b, spec) - mixed);
    for (double p : {0.1, 0.3, 0.5}) {
        const auto noise = sim::NoiseModel::with(sim::make_channel(ChannelKind::Depolarizing, p));
        const double gap = std::abs(kernel::kernel_value(a, b, spec, noise) - mixed);
        CHECK(gap <= previous_gap + 1e-12);
        previous_gap = gap;
    }
}

TEST_CASE("kernel_class_stats: constant matrix and hand-computed case") {
    kernel::GramMatrix gram;
    gram.values = Eigen::MatrixXd::Constant(4, 3, 0.5);
    const auto constant = kernel::kernel_class_stats(gram, {0, 1, 0, 1});
    REQUIRE(constant.size() == 2);
    CHECK(constant[0].mean == doctest::Approx(0.5));
    CHECK(constant[0].stddev == doctest::Approx(0.0));
    CHECK(constant[1].mean == doctest::Approx(0.5));

    kernel::GramMatrix small;
    small.values.resize(2, 2);
    small.values << 0.1, 0.3, 0.5, 0.7;
    const auto stats = kernel::kernel_class_stats(small, {0, 1});
    CHECK(stats[0].mean == doctest::Approx(0.2));
    CHECK(stats[1].mean == doctest::Approx(0.6));
    CHECK(stats[0].stddev == doctest::Approx(0.1));

    CHECK_THROWS_AS(kernel::kernel_class_stats(small, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(kernel::kernel_class_stats(small, {0}), std::invalid_argument);
}

TEST_CASE("gram persistence round-trips bit-exactly and verifies the hash") {
    const FeatureMapSpec spec = FeatureMapSpec::ring(3);
    Rng rng(101);
    kernel::GramMatrix gram;
    gram.values.resize(10, 10);
    for (Eigen::Index r = 0; r < 10; ++r) {
        for (Eigen::Index c = 0; c < 10; ++c) {
            gram.values(r, c) = rng.uniform();
        }
    }
    gram.spec_hash = kernel::config_hash(spec, sim::NoiseModel::ideal());
    gram.noise_kind = "none";
    gram.seed = 7;
    gram.row_samples = "rows";
    gram.col_samples = "cols";

    const std::string path = temp_path("qsvr_gram_test.txt");
    kernel::save_gram(gram, path);
    const auto loaded = kernel::load_gram(path);
    CHECK((loaded.values.array() == gram.values.array()).all());
    CHECK(loaded.spec_hash == gram.spec_hash);
    CHECK(loaded.seed == gram.seed);
    CHECK(loaded.row_samples == "rows");

    // Verification against the generating configuration passes, a different
    // configuration is rejected.
    CHECK_NOTHROW(kernel::load_gram(path, spec, sim::NoiseModel::ideal()));
    const auto other = sim::NoiseModel::with(sim::make_channel(ChannelKind::BitFlip, 0.1));
    CHECK_THROWS_AS(kernel::load_gram(path, spec, other), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("load_gram rejects empty and truncated files") {
    const std::string path = temp_path("qsvr_gram_corrupt.txt");
    {
        std::ofstream out(path);
    }
    CHECK_THROWS_AS(kernel::load_gram(path), std::runtime_error);
    {
        std::ofstream out(path);
        out << "n_rows=3\nn_cols=3\nspec_hash=abc\nnoise_kind=none\nnoise_strength=0\n";
        out << "0.1 0.2 0.3\n0.4 0.5\n";  // second row truncated
    }
    CHECK_THROWS_AS(kernel::load_gram(path), std::runtime_error);
    CHECK_THROWS_AS(kernel::load_gram(temp_path("qsvr_gram_missing.txt")), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("config hash distinguishes feature maps and noise settings") {
    const FeatureMapSpec spec_a = FeatureMapSpec::ring(3);
    const FeatureMapSpec spec_b = FeatureMapSpec::ring(3, 1.0);
    const auto ideal = sim::NoiseModel::ideal();
    const auto noisy = sim::NoiseModel::with(sim::make_channel(ChannelKind::PhaseFlip, 0.2));
    CHECK(kernel::config_hash(spec_a, ideal) != kernel::config_hash(spec_b, ideal));
    CHECK(kernel::config_hash(spec_a, ideal) != kernel::config_hash(spec_a, noisy));
    CHECK(kernel::config_hash(spec_a, ideal) == kernel::config_hash(spec_a, ideal));
}

TEST_SUITE_END();
