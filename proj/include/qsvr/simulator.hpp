#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qsvr::sim {

using Complex = std::complex<double>;

// 2x2 complex matrix in row-major order: {m00, m01, m10, m11}.
using Mat2 = std::array<Complex, 4>;

inline constexpr double kStateTolerance = 1e-10;
inline constexpr double kPsdFloor = -1e-9;

// Pure n-qubit state. Basis index bit q (least significant bit is qubit 0)
// holds the computational value of qubit q.
struct StateVector {
    int n_qubits = 0;
    std::vector<Complex> amplitudes;

    static StateVector zero_state(int n_qubits);

    std::size_t dim() const { return amplitudes.size(); }
    // Deviation of sum |a_k|^2 from 1.
    double norm_error() const;
};

// Mixed n-qubit state as a dense 2^n x 2^n matrix, row-major.
struct DensityMatrix {
    int n_qubits = 0;
    std::vector<Complex> matrix;

    static DensityMatrix zero_state(int n_qubits);
    static DensityMatrix from_pure(const StateVector& psi);

    std::size_t dim() const { return std::size_t{1} << n_qubits; }
    Complex& at(std::size_t r, std::size_t c) { return matrix[r * dim() + c]; }
    const Complex& at(std::size_t r, std::size_t c) const { return matrix[r * dim() + c]; }

    double trace_error() const;
    double hermiticity_error() const;
    // Smallest eigenvalue; the positive-semidefiniteness check compares it
    // against kPsdFloor.
    double min_eigenvalue() const;
};

enum class GateKind { RZ, RX, IsingZZ };

struct Gate {
    GateKind kind;
    int qubit0 = 0;
    int qubit1 = -1;  // second qubit, IsingZZ only
    double angle = 0.0;

    static Gate rz(int qubit, double angle) { return {GateKind::RZ, qubit, -1, angle}; }
    static Gate rx(int qubit, double angle) { return {GateKind::RX, qubit, -1, angle}; }
    static Gate ising_zz(int qubit_a, int qubit_b, double angle);

    bool is_two_qubit() const { return kind == GateKind::IsingZZ; }
    // Inverse rotation: same generator, negated angle.
    Gate adjoint() const { return {kind, qubit0, qubit1, -angle}; }
};

enum class ChannelKind {
    AmplitudeDamping,
    BitFlip,
    Depolarizing,
    Miscalibration,
    PhaseDamping,
    PhaseFlip,
};

enum class RotationAxis { X, Y, Z };

std::string to_string(ChannelKind kind);
std::string to_string(GateKind kind);
ChannelKind channel_kind_from_string(const std::string& name);

// Single-qubit noise process in operator-sum form: rho -> sum_i E_i rho E_i^dag.
struct KrausChannel {
    ChannelKind kind;
    double strength = 0.0;
    std::vector<Mat2> elements;
    // Overrotation axis, miscalibration only.
    std::optional<RotationAxis> rotation_axis;
};

struct ChannelValidation {
    bool complete = false;
    // max |(sum_i E_i^dag E_i - I)_{rc}|
    double residual = 0.0;
};

enum class NoisePlacement {
    // Incoherent channels act on every qubit touched by a gate, right after
    // the gate. Miscalibration instead folds its overrotation into the angle
    // of every rotation gate, IsingZZ included.
    AfterEachGate,
};

struct NoiseModel {
    std::optional<KrausChannel> channel;
    NoisePlacement placement = NoisePlacement::AfterEachGate;

    static NoiseModel ideal() { return {}; }
    static NoiseModel with(KrausChannel ch) { return {std::move(ch), NoisePlacement::AfterEachGate}; }

    bool is_ideal() const { return !channel.has_value(); }
    bool is_coherent() const {
        return channel && channel->kind == ChannelKind::Miscalibration;
    }
};

using SimState = std::variant<StateVector, DensityMatrix>;

// 2x2 unitary of R_axis(angle) = exp(-i * angle * sigma_axis / 2).
Mat2 rotation_matrix(RotationAxis axis, double angle);

// Builds the operation elements for one of the six channel kinds.
// strength is a probability/damping in [0,1] for the incoherent channels and
// an overrotation in radians for miscalibration. rotation_axis applies to
// miscalibration only (default Z).
KrausChannel make_channel(ChannelKind kind, double strength,
                          std::optional<RotationAxis> rotation_axis = std::nullopt);

// Checks the completeness relation sum_i E_i^dag E_i = I.
ChannelValidation validate_channel(const KrausChannel& channel);

// Phase-flip probability that reproduces a phase-damping channel of the given
// damping: p = (1 - sqrt(1 - lambda)) / 2.
double phase_damping_to_flip_prob(double lambda);

void apply_gate(StateVector& state, const Gate& gate);
void apply_gate(DensityMatrix& rho, const Gate& gate);

// rho -> sum_i E_i rho E_i^dag with the channel elements embedded on `qubit`.
void apply_channel(DensityMatrix& rho, const KrausChannel& channel, int qubit);

// Simulates the gate list from |0...0>. Ideal runs stay on the pure-state
// path and return a StateVector; any noise model with a channel returns a
// DensityMatrix. Deterministic: no sampling anywhere.
SimState run_circuit(const std::vector<Gate>& gates, int n_qubits,
                     const NoiseModel& noise = NoiseModel::ideal());

double all_zero_probability(const StateVector& state);
double all_zero_probability(const DensityMatrix& rho);
double all_zero_probability(const SimState& state);

}  // namespace qsvr::sim
