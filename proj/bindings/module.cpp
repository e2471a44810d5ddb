#include "qsvr/attacks.hpp"
#include "qsvr/data.hpp"
#include "qsvr/eval.hpp"
#include "qsvr/experiment.hpp"
#include "qsvr/kernel.hpp"
#include "qsvr/simulator.hpp"
#include "qsvr/svr.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qsvr;

namespace {

sim::NoiseModel noise_from(const std::optional<sim::KrausChannel>& channel) {
    return channel ? sim::NoiseModel::with(*channel) : sim::NoiseModel::ideal();
}

}  // namespace

PYBIND11_MODULE(_qsvr, m) {
    m.doc() = "Quantum-kernel SVR anomaly detection workbench";

    // --- simulator ---
    py::enum_<sim::ChannelKind>(m, "ChannelKind")
        .value("amplitude_damping", sim::ChannelKind::AmplitudeDamping)
        .value("bitflip", sim::ChannelKind::BitFlip)
        .value("depolarizing", sim::ChannelKind::Depolarizing)
        .value("miscalibration", sim::ChannelKind::Miscalibration)
        .value("phase_damping", sim::ChannelKind::PhaseDamping)
        .value("phaseflip", sim::ChannelKind::PhaseFlip);

    py::enum_<sim::RotationAxis>(m, "RotationAxis")
        .value("x", sim::RotationAxis::X)
        .value("y", sim::RotationAxis::Y)
        .value("z", sim::RotationAxis::Z);

    py::class_<sim::Gate>(m, "Gate")
        .def_static("rz", &sim::Gate::rz, py::arg("qubit"), py::arg("angle"))
        .def_static("rx", &sim::Gate::rx, py::arg("qubit"), py::arg("angle"))
        .def_static("ising_zz", &sim::Gate::ising_zz, py::arg("qubit_a"), py::arg("qubit_b"),
                    py::arg("angle"))
        .def_readonly("angle", &sim::Gate::angle);

    py::class_<sim::StateVector>(m, "StateVector")
        .def_readonly("n_qubits", &sim::StateVector::n_qubits)
        .def_readonly("amplitudes", &sim::StateVector::amplitudes)
        .def("norm_error", &sim::StateVector::norm_error);

    py::class_<sim::DensityMatrix>(m, "DensityMatrix")
        .def_readonly("n_qubits", &sim::DensityMatrix::n_qubits)
        .def_readonly("matrix", &sim::DensityMatrix::matrix)
        .def("trace_error", &sim::DensityMatrix::trace_error)
        .def("hermiticity_error", &sim::DensityMatrix::hermiticity_error)
        .def("min_eigenvalue", &sim::DensityMatrix::min_eigenvalue);

    py::class_<sim::KrausChannel>(m, "KrausChannel")
        .def_readonly("kind", &sim::KrausChannel::kind)
        .def_readonly("strength", &sim::KrausChannel::strength)
        .def_readonly("elements", &sim::KrausChannel::elements);

    py::class_<sim::ChannelValidation>(m, "ChannelValidation")
        .def_readonly("complete", &sim::ChannelValidation::complete)
        .def_readonly("residual", &sim::ChannelValidation::residual);

    m.def("make_channel", &sim::make_channel, py::arg("kind"), py::arg("strength"),
          py::arg("rotation_axis") = std::nullopt);
    m.def("validate_channel", &sim::validate_channel, py::arg("channel"));
    m.def("phase_damping_to_flip_prob", &sim::phase_damping_to_flip_prob, py::arg("lam"));
    m.def(
        "run_circuit",
        [](const std::vector<sim::Gate>& gates, int n_qubits,
           const std::optional<sim::KrausChannel>& channel) {
            return sim::run_circuit(gates, n_qubits, noise_from(channel));
        },
        py::arg("gates"), py::arg("n_qubits"), py::arg("channel") = std::nullopt);
    m.def("all_zero_probability",
          [](const sim::SimState& state) { return sim::all_zero_probability(state); },
          py::arg("state"));

    // --- kernel ---
    py::class_<kernel::FeatureMapSpec>(m, "FeatureMapSpec")
        .def(py::init<>())
        .def_static("ring", &kernel::FeatureMapSpec::ring, py::arg("n_features"),
                    py::arg("angle_scale") = 3.14159265358979323846)
        .def_readwrite("n_features", &kernel::FeatureMapSpec::n_features)
        .def_readwrite("angle_scale", &kernel::FeatureMapSpec::angle_scale)
        .def_readwrite("entanglers", &kernel::FeatureMapSpec::entanglers);

    py::class_<kernel::GramMatrix>(m, "GramMatrix")
        .def_readonly("values", &kernel::GramMatrix::values)
        .def_readonly("spec_hash", &kernel::GramMatrix::spec_hash)
        .def_readonly("noise_kind", &kernel::GramMatrix::noise_kind)
        .def_readonly("noise_strength", &kernel::GramMatrix::noise_strength);

    py::class_<kernel::ClassKernelStats>(m, "ClassKernelStats")
        .def_readonly("label", &kernel::ClassKernelStats::label)
        .def_readonly("mean", &kernel::ClassKernelStats::mean)
        .def_readonly("stddev", &kernel::ClassKernelStats::stddev)
        .def_readonly("count", &kernel::ClassKernelStats::count);

    m.def("build_feature_map", &kernel::build_feature_map, py::arg("x"), py::arg("spec"));
    m.def(
        "kernel_value",
        [](const std::vector<double>& x_i, const std::vector<double>& x_j,
           const kernel::FeatureMapSpec& spec, const std::optional<sim::KrausChannel>& channel) {
            return kernel::kernel_value(x_i, x_j, spec, noise_from(channel));
        },
        py::arg("x_i"), py::arg("x_j"), py::arg("spec"), py::arg("channel") = std::nullopt);
    m.def(
        "gram",
        [](const std::vector<std::vector<double>>& samples, const kernel::FeatureMapSpec& spec,
           const std::optional<sim::KrausChannel>& channel) {
            return kernel::gram(samples, spec, noise_from(channel));
        },
        py::arg("samples"), py::arg("spec"), py::arg("channel") = std::nullopt);
    m.def(
        "gram_cross",
        [](const std::vector<std::vector<double>>& rows,
           const std::vector<std::vector<double>>& cols, const kernel::FeatureMapSpec& spec,
           const std::optional<sim::KrausChannel>& channel) {
            return kernel::gram(rows, cols, spec, noise_from(channel));
        },
        py::arg("rows"), py::arg("cols"), py::arg("spec"), py::arg("channel") = std::nullopt);
    m.def("kernel_class_stats", &kernel::kernel_class_stats, py::arg("gram"),
          py::arg("row_labels"));
    m.def("save_gram", &kernel::save_gram, py::arg("gram"), py::arg("path"));
    m.def("load_gram", py::overload_cast<const std::string&>(&kernel::load_gram),
          py::arg("path"));

    // --- svr ---
    py::class_<svr::SvrConfig>(m, "SvrConfig")
        .def(py::init<>())
        .def_readwrite("C", &svr::SvrConfig::C)
        .def_readwrite("tube_epsilon", &svr::SvrConfig::tube_epsilon)
        .def_readwrite("kkt_tolerance", &svr::SvrConfig::kkt_tolerance)
        .def_readwrite("max_iterations", &svr::SvrConfig::max_iterations)
        .def_readwrite("threshold_quantile", &svr::SvrConfig::threshold_quantile);

    py::class_<svr::SvrModel>(m, "SvrModel")
        .def_readonly("beta", &svr::SvrModel::beta)
        .def_readonly("bias", &svr::SvrModel::bias)
        .def_readonly("iterations", &svr::SvrModel::iterations)
        .def_readonly("kkt_violation", &svr::SvrModel::kkt_violation)
        .def_readonly("converged", &svr::SvrModel::converged);

    py::class_<svr::AnomalyDetector>(m, "AnomalyDetector")
        .def_readonly("threshold", &svr::AnomalyDetector::threshold)
        .def_readonly("train_scores", &svr::AnomalyDetector::train_scores)
        .def_readonly("warnings", &svr::AnomalyDetector::warnings)
        .def_readonly("models", &svr::AnomalyDetector::models);

    py::class_<svr::ClassificationResult>(m, "ClassificationResult")
        .def_readonly("labels", &svr::ClassificationResult::labels)
        .def_readonly("normal_ratio", &svr::ClassificationResult::normal_ratio)
        .def_readonly("anomaly_ratio", &svr::ClassificationResult::anomaly_ratio);

    m.def("solve_dual", &svr::solve_dual, py::arg("gram"), py::arg("targets"), py::arg("config"));
    m.def("predict", &svr::predict, py::arg("model"), py::arg("kernel_row"));
    m.def(
        "fit_detector",
        [](const std::vector<std::vector<double>>& train, const kernel::FeatureMapSpec& spec,
           const std::optional<sim::KrausChannel>& channel, const svr::SvrConfig& config) {
            return svr::fit_detector(train, spec, noise_from(channel), config);
        },
        py::arg("train_features"), py::arg("spec"), py::arg("channel") = std::nullopt,
        py::arg("config") = svr::SvrConfig{});
    m.def("anomaly_score", &svr::anomaly_score, py::arg("detector"), py::arg("x"));
    m.def(
        "anomaly_scores",
        [](const svr::AnomalyDetector& detector,
           const std::vector<std::vector<double>>& samples) {
            return svr::anomaly_scores(detector, samples);
        },
        py::arg("detector"), py::arg("samples"));
    m.def("classify", &svr::classify, py::arg("detector"), py::arg("scores"),
          py::arg("true_labels"));

    // --- attacks ---
    py::class_<attacks::AttackConfig>(m, "AttackConfig")
        .def(py::init<>())
        .def_readwrite("epsilon", &attacks::AttackConfig::epsilon)
        .def_readwrite("iterations", &attacks::AttackConfig::iterations)
        .def_readwrite("alpha", &attacks::AttackConfig::alpha)
        .def_readwrite("fd_step", &attacks::AttackConfig::fd_step)
        .def_readwrite("restarts", &attacks::AttackConfig::restarts)
        .def_readwrite("seed", &attacks::AttackConfig::seed)
        .def_readwrite("record_trace", &attacks::AttackConfig::record_trace);

    py::class_<attacks::AdversarialSample>(m, "AdversarialSample")
        .def_readonly("original", &attacks::AdversarialSample::original)
        .def_readonly("perturbed", &attacks::AdversarialSample::perturbed)
        .def_readonly("label", &attacks::AdversarialSample::label)
        .def_readonly("score_trace", &attacks::AdversarialSample::score_trace);

    m.def("input_gradient", &attacks::input_gradient, py::arg("detector"), py::arg("x"),
          py::arg("label"), py::arg("fd_step") = 1e-4);
    m.def("pgd_attack", &attacks::pgd_attack, py::arg("detector"), py::arg("x"), py::arg("label"),
          py::arg("config"));
    m.def("build_adversarial_set", &attacks::build_adversarial_set, py::arg("detector"),
          py::arg("samples"), py::arg("labels"), py::arg("config"));
    m.def("adversarial_retrain", &attacks::adversarial_retrain, py::arg("train_features"),
          py::arg("spec"), py::arg("svr_config"), py::arg("attack_config"));

    // --- data ---
    py::class_<data::Dataset>(m, "Dataset")
        .def_readwrite("features", &data::Dataset::features)
        .def_readwrite("labels", &data::Dataset::labels)
        .def_readwrite("feature_names", &data::Dataset::feature_names)
        .def_readwrite("name", &data::Dataset::name)
        .def("feature_rows",
             py::overload_cast<>(&data::Dataset::feature_rows, py::const_));

    py::enum_<data::SplitPolicy>(m, "SplitPolicy")
        .value("simulation", data::SplitPolicy::Simulation)
        .value("hardware", data::SplitPolicy::Hardware);

    py::class_<data::Split>(m, "Split")
        .def_readonly("train", &data::Split::train)
        .def_readonly("test", &data::Split::test);

    py::class_<data::PcaModel>(m, "PcaModel")
        .def_readonly("mean", &data::PcaModel::mean)
        .def_readonly("components", &data::PcaModel::components)
        .def_readonly("explained_variance", &data::PcaModel::explained_variance)
        .def_readonly("padded", &data::PcaModel::padded);

    py::class_<data::Normalizer>(m, "Normalizer")
        .def_readonly("mins", &data::Normalizer::mins)
        .def_readonly("maxs", &data::Normalizer::maxs)
        .def_readonly("constant_features", &data::Normalizer::constant_features);

    m.def("load_csv", &data::load_csv, py::arg("path"), py::arg("label_column") = "label");
    m.def("save_csv", &data::save_csv, py::arg("dataset"), py::arg("path"));
    m.def("fit_pca", &data::fit_pca, py::arg("features"), py::arg("k") = 5);
    m.def("pca_transform", &data::transform, py::arg("model"), py::arg("features"));
    m.def("fit_minmax", &data::fit_minmax, py::arg("train_features"));
    m.def("normalize", &data::normalize, py::arg("normalizer"), py::arg("features"));
    m.def("toy_generate", &data::toy_generate, py::arg("n_normal"), py::arg("n_anomaly"),
          py::arg("seed"));
    m.def("make_splits", &data::make_splits, py::arg("dataset"), py::arg("policy"),
          py::arg("seed"));

    // --- eval ---
    py::class_<eval::KsResult>(m, "KsResult")
        .def_readonly("statistic", &eval::KsResult::statistic)
        .def_readonly("p_value", &eval::KsResult::p_value);

    py::class_<eval::DatasetDiagnostics>(m, "DatasetDiagnostics")
        .def_readonly("min_ks_p_value", &eval::DatasetDiagnostics::min_ks_p_value)
        .def_readonly("max_feature_variance", &eval::DatasetDiagnostics::max_feature_variance);

    m.def(
        "auc",
        [](const std::vector<double>& scores, const std::vector<int>& labels) {
            return eval::auc({scores, labels});
        },
        py::arg("scores"), py::arg("labels"));
    m.def("ks_two_sample", &eval::ks_two_sample, py::arg("a"), py::arg("b"));
    m.def("dataset_diagnostics", &eval::dataset_diagnostics, py::arg("test"));
}
