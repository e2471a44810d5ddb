#include "qsvr/simulator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace qsvr::sim {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_qubit(int qubit, int n_qubits) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(n_qubits) + " qubits");
    }
}

// Left-multiplies the 2x2 matrix u, embedded on `qubit`, into a pure state.
void left_apply(std::vector<Complex>& amps, int qubit, const Mat2& u) {
    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + stride;
            const Complex a0 = amps[i0];
            const Complex a1 = amps[i1];
            amps[i0] = u[0] * a0 + u[1] * a1;
            amps[i1] = u[2] * a0 + u[3] * a1;
        }
    }
}

// rho -> U rho with U embedded on `qubit` (acts on the row index).
void left_apply_rows(DensityMatrix& rho, int qubit, const Mat2& u) {
    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = rho.dim();
    for (std::size_t r0 = 0; r0 < dim; ++r0) {
        if (r0 & stride) {
            continue;
        }
        const std::size_t r1 = r0 + stride;
        for (std::size_t c = 0; c < dim; ++c) {
            const Complex a0 = rho.at(r0, c);
            const Complex a1 = rho.at(r1, c);
            rho.at(r0, c) = u[0] * a0 + u[1] * a1;
            rho.at(r1, c) = u[2] * a0 + u[3] * a1;
        }
    }
}

// rho -> rho U^dag with U embedded on `qubit` (acts on the column index).
void right_apply_cols(DensityMatrix& rho, int qubit, const Mat2& u) {
    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = rho.dim();
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c0 = 0; c0 < dim; ++c0) {
            if (c0 & stride) {
                continue;
            }
            const std::size_t c1 = c0 + stride;
            const Complex a0 = rho.at(r, c0);
            const Complex a1 = rho.at(r, c1);
            rho.at(r, c0) = a0 * std::conj(u[0]) + a1 * std::conj(u[1]);
            rho.at(r, c1) = a0 * std::conj(u[2]) + a1 * std::conj(u[3]);
        }
    }
}

// Phase factors of IsingZZ(theta) = exp(-i theta Z(x)Z / 2): basis states with
// equal bits on the two qubits pick up exp(-i theta/2), unequal bits the
// conjugate phase.
void apply_ising_zz(std::vector<Complex>& amps, int qubit_a, int qubit_b, double theta) {
    const Complex even = std::exp(-kI * (theta / 2.0));
    const Complex odd = std::exp(kI * (theta / 2.0));
    const std::size_t mask_a = std::size_t{1} << qubit_a;
    const std::size_t mask_b = std::size_t{1} << qubit_b;
    for (std::size_t k = 0; k < amps.size(); ++k) {
        const bool parity = (bool(k & mask_a)) != (bool(k & mask_b));
        amps[k] *= parity ? odd : even;
    }
}

void apply_ising_zz(DensityMatrix& rho, int qubit_a, int qubit_b, double theta) {
    const Complex even = std::exp(-kI * (theta / 2.0));
    const Complex odd = std::exp(kI * (theta / 2.0));
    const std::size_t mask_a = std::size_t{1} << qubit_a;
    const std::size_t mask_b = std::size_t{1} << qubit_b;
    const std::size_t dim = rho.dim();
    for (std::size_t r = 0; r < dim; ++r) {
        const bool pr = (bool(r & mask_a)) != (bool(r & mask_b));
        const Complex phase_r = pr ? odd : even;
        for (std::size_t c = 0; c < dim; ++c) {
            const bool pc = (bool(c & mask_a)) != (bool(c & mask_b));
            rho.at(r, c) *= phase_r * std::conj(pc ? odd : even);
        }
    }
}

Mat2 gate_matrix(const Gate& gate) {
    switch (gate.kind) {
        case GateKind::RZ:
            return rotation_matrix(RotationAxis::Z, gate.angle);
        case GateKind::RX:
            return rotation_matrix(RotationAxis::X, gate.angle);
        case GateKind::IsingZZ:
            break;
    }
    throw std::logic_error("gate_matrix called for a two-qubit gate");
}

void check_strength_unit_interval(ChannelKind kind, double strength) {
    if (!(strength >= 0.0 && strength <= 1.0)) {
        throw std::invalid_argument("strength " + std::to_string(strength) + " for " +
                                    to_string(kind) + " must lie in [0, 1]");
    }
}

}  // namespace

StateVector StateVector::zero_state(int n_qubits) {
    if (n_qubits < 1) {
        throw std::invalid_argument("n_qubits must be positive");
    }
    if (n_qubits > 20) {
        throw std::invalid_argument("exact pure-state simulation is capped at 20 qubits, got " +
                                    std::to_string(n_qubits));
    }
    StateVector state;
    state.n_qubits = n_qubits;
    state.amplitudes.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    state.amplitudes[0] = Complex{1.0, 0.0};
    return state;
}

double StateVector::norm_error() const {
    double sum = 0.0;
    for (const Complex& a : amplitudes) {
        sum += std::norm(a);
    }
    return std::abs(sum - 1.0);
}

DensityMatrix DensityMatrix::zero_state(int n_qubits) {
    if (n_qubits < 1) {
        throw std::invalid_argument("n_qubits must be positive");
    }
    if (n_qubits > 12) {
        throw std::invalid_argument("exact mixed-state simulation is capped at 12 qubits, got " +
                                    std::to_string(n_qubits));
    }
    DensityMatrix rho;
    rho.n_qubits = n_qubits;
    rho.matrix.assign((std::size_t{1} << n_qubits) * (std::size_t{1} << n_qubits),
                      Complex{0.0, 0.0});
    rho.matrix[0] = Complex{1.0, 0.0};
    return rho;
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
    DensityMatrix rho;
    rho.n_qubits = psi.n_qubits;
    const std::size_t dim = psi.dim();
    rho.matrix.resize(dim * dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            rho.matrix[r * dim + c] = psi.amplitudes[r] * std::conj(psi.amplitudes[c]);
        }
    }
    return rho;
}

double DensityMatrix::trace_error() const {
    Complex tr{0.0, 0.0};
    for (std::size_t k = 0; k < dim(); ++k) {
        tr += at(k, k);
    }
    return std::abs(tr - Complex{1.0, 0.0});
}

double DensityMatrix::hermiticity_error() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t c = r; c < dim(); ++c) {
            worst = std::max(worst, std::abs(at(r, c) - std::conj(at(c, r))));
        }
    }
    return worst;
}

double DensityMatrix::min_eigenvalue() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            m(r, c) = at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Gate Gate::ising_zz(int qubit_a, int qubit_b, double angle) {
    if (qubit_a == qubit_b) {
        throw std::invalid_argument("IsingZZ requires two distinct qubits");
    }
    return {GateKind::IsingZZ, qubit_a, qubit_b, angle};
}

std::string to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::AmplitudeDamping: return "amplitude_damping";
        case ChannelKind::BitFlip: return "bitflip";
        case ChannelKind::Depolarizing: return "depolarizing";
        case ChannelKind::Miscalibration: return "miscalibration";
        case ChannelKind::PhaseDamping: return "phase_damping";
        case ChannelKind::PhaseFlip: return "phaseflip";
    }
    return "unknown";
}

std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::RZ: return "RZ";
        case GateKind::RX: return "RX";
        case GateKind::IsingZZ: return "IsingZZ";
    }
    return "unknown";
}

ChannelKind channel_kind_from_string(const std::string& name) {
    if (name == "amplitude_damping") return ChannelKind::AmplitudeDamping;
    if (name == "bitflip") return ChannelKind::BitFlip;
    if (name == "depolarizing") return ChannelKind::Depolarizing;
    if (name == "miscalibration") return ChannelKind::Miscalibration;
    if (name == "phase_damping") return ChannelKind::PhaseDamping;
    if (name == "phaseflip") return ChannelKind::PhaseFlip;
    throw std::invalid_argument("unknown channel kind: " + name);
}

Mat2 rotation_matrix(RotationAxis axis, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    switch (axis) {
        case RotationAxis::X:
            return {Complex{c, 0.0}, Complex{0.0, -s}, Complex{0.0, -s}, Complex{c, 0.0}};
        case RotationAxis::Y:
            return {Complex{c, 0.0}, Complex{-s, 0.0}, Complex{s, 0.0}, Complex{c, 0.0}};
        case RotationAxis::Z:
            return {std::exp(-kI * (angle / 2.0)), Complex{0.0, 0.0}, Complex{0.0, 0.0},
                    std::exp(kI * (angle / 2.0))};
    }
    throw std::logic_error("invalid rotation axis");
}

KrausChannel make_channel(ChannelKind kind, double strength,
                          std::optional<RotationAxis> rotation_axis) {
    if (rotation_axis && kind != ChannelKind::Miscalibration) {
        throw std::invalid_argument("rotation_axis is only meaningful for miscalibration");
    }
    KrausChannel channel;
    channel.kind = kind;
    channel.strength = strength;
    switch (kind) {
        case ChannelKind::AmplitudeDamping: {
            check_strength_unit_interval(kind, strength);
            const double keep = std::sqrt(1.0 - strength);
            const double decay = std::sqrt(strength);
            channel.elements = {
                Mat2{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{keep}},
                Mat2{Complex{0.0}, Complex{decay}, Complex{0.0}, Complex{0.0}},
            };
            break;
        }
        case ChannelKind::BitFlip: {
            check_strength_unit_interval(kind, strength);
            const double stay = std::sqrt(1.0 - strength);
            const double flip = std::sqrt(strength);
            channel.elements = {
                Mat2{Complex{stay}, Complex{0.0}, Complex{0.0}, Complex{stay}},
                Mat2{Complex{0.0}, Complex{flip}, Complex{flip}, Complex{0.0}},
            };
            break;
        }
        case ChannelKind::Depolarizing: {
            check_strength_unit_interval(kind, strength);
            const double stay = std::sqrt(1.0 - strength);
            const double err = std::sqrt(strength / 3.0);
            channel.elements = {
                Mat2{Complex{stay}, Complex{0.0}, Complex{0.0}, Complex{stay}},
                Mat2{Complex{0.0}, Complex{err}, Complex{err}, Complex{0.0}},
                Mat2{Complex{0.0}, -kI * err, kI * err, Complex{0.0}},
                Mat2{Complex{err}, Complex{0.0}, Complex{0.0}, Complex{-err}},
            };
            break;
        }
        case ChannelKind::Miscalibration: {
            if (!std::isfinite(strength)) {
                throw std::invalid_argument("miscalibration overrotation must be finite");
            }
            const RotationAxis axis = rotation_axis.value_or(RotationAxis::Z);
            channel.rotation_axis = axis;
            channel.elements = {rotation_matrix(axis, strength)};
            break;
        }
        case ChannelKind::PhaseDamping: {
            check_strength_unit_interval(kind, strength);
            channel.elements = {
                Mat2{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{std::sqrt(1.0 - strength)}},
                Mat2{Complex{0.0}, Complex{0.0}, Complex{0.0}, Complex{std::sqrt(strength)}},
            };
            break;
        }
        case ChannelKind::PhaseFlip: {
            check_strength_unit_interval(kind, strength);
            const double stay = std::sqrt(1.0 - strength);
            const double flip = std::sqrt(strength);
            channel.elements = {
                Mat2{Complex{stay}, Complex{0.0}, Complex{0.0}, Complex{stay}},
                Mat2{Complex{flip}, Complex{0.0}, Complex{0.0}, Complex{-flip}},
            };
            break;
        }
    }
    return channel;
}

ChannelValidation validate_channel(const KrausChannel& channel) {
    if (channel.elements.empty()) {
        throw std::invalid_argument("channel has no operation elements");
    }
    // sum_i E_i^dag E_i, accumulated entry-wise for 2x2 elements.
    Mat2 sum{Complex{0.0}, Complex{0.0}, Complex{0.0}, Complex{0.0}};
    for (const Mat2& e : channel.elements) {
        // (E^dag E)_{rc} = sum_k conj(E_{kr}) E_{kc}
        sum[0] += std::conj(e[0]) * e[0] + std::conj(e[2]) * e[2];
        sum[1] += std::conj(e[0]) * e[1] + std::conj(e[2]) * e[3];
        sum[2] += std::conj(e[1]) * e[0] + std::conj(e[3]) * e[2];
        sum[3] += std::conj(e[1]) * e[1] + std::conj(e[3]) * e[3];
    }
    double residual = 0.0;
    residual = std::max(residual, std::abs(sum[0] - Complex{1.0}));
    residual = std::max(residual, std::abs(sum[1]));
    residual = std::max(residual, std::abs(sum[2]));
    residual = std::max(residual, std::abs(sum[3] - Complex{1.0}));
    return {residual <= kStateTolerance, residual};
}

double phase_damping_to_flip_prob(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("phase damping lambda must lie in [0, 1]");
    }
    return (1.0 - std::sqrt(1.0 - lambda)) / 2.0;
}

void apply_gate(StateVector& state, const Gate& gate) {
    check_qubit(gate.qubit0, state.n_qubits);
    if (gate.is_two_qubit()) {
        check_qubit(gate.qubit1, state.n_qubits);
        apply_ising_zz(state.amplitudes, gate.qubit0, gate.qubit1, gate.angle);
        return;
    }
    left_apply(state.amplitudes, gate.qubit0, gate_matrix(gate));
}

void apply_gate(DensityMatrix& rho, const Gate& gate) {
    check_qubit(gate.qubit0, rho.n_qubits);
    if (gate.is_two_qubit()) {
        check_qubit(gate.qubit1, rho.n_qubits);
        apply_ising_zz(rho, gate.qubit0, gate.qubit1, gate.angle);
        return;
    }
    const Mat2 u = gate_matrix(gate);
    left_apply_rows(rho, gate.qubit0, u);
    right_apply_cols(rho, gate.qubit0, u);
}

void apply_channel(DensityMatrix& rho, const KrausChannel& channel, int qubit) {
    check_qubit(qubit, rho.n_qubits);
    const ChannelValidation validation = validate_channel(channel);
    if (!validation.complete) {
        throw std::invalid_argument("channel fails completeness, residual " +
                                    std::to_string(validation.residual));
    }
    if (channel.elements.size() == 1) {
        // Single unitary element: plain conjugation, no accumulation needed.
        left_apply_rows(rho, qubit, channel.elements[0]);
        right_apply_cols(rho, qubit, channel.elements[0]);
        return;
    }

    // Precompute the superoperator on one qubit's 2x2 block,
    //   S[(r,c)][(r',c')] = sum_i E_i[r][r'] conj(E_i[c][c']),
    // then map every block of rho in a single pass.
    Complex super[4][4] = {};
    for (const Mat2& e : channel.elements) {
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                for (int rp = 0; rp < 2; ++rp) {
                    for (int cp = 0; cp < 2; ++cp) {
                        super[r * 2 + c][rp * 2 + cp] +=
                            e[r * 2 + rp] * std::conj(e[c * 2 + cp]);
                    }
                }
            }
        }
    }

    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = rho.dim();
    for (std::size_t r0 = 0; r0 < dim; ++r0) {
        if (r0 & stride) {
            continue;
        }
        const std::size_t r1 = r0 + stride;
        for (std::size_t c0 = 0; c0 < dim; ++c0) {
            if (c0 & stride) {
                continue;
            }
            const std::size_t c1 = c0 + stride;
            const Complex block[4] = {rho.at(r0, c0), rho.at(r0, c1), rho.at(r1, c0),
                                      rho.at(r1, c1)};
            for (int out = 0; out < 4; ++out) {
                Complex acc{0.0, 0.0};
                for (int in = 0; in < 4; ++in) {
                    acc += super[out][in] * block[in];
                }
                (out == 0 ? rho.at(r0, c0)
                          : out == 1 ? rho.at(r0, c1)
                                     : out == 2 ? rho.at(r1, c0) : rho.at(r1, c1)) = acc;
            }
        }
    }
}

SimState run_circuit(const std::vector<Gate>& gates, int n_qubits, const NoiseModel& noise) {
    if (noise.is_ideal()) {
        StateVector state = StateVector::zero_state(n_qubits);
        for (const Gate& gate : gates) {
            apply_gate(state, gate);
        }
        return state;
    }

    DensityMatrix rho = DensityMatrix::zero_state(n_qubits);
    if (noise.is_coherent()) {
        const double over = noise.channel->strength;
        for (Gate gate : gates) {
            gate.angle += over;
            apply_gate(rho, gate);
        }
        return rho;
    }

    const KrausChannel& channel = *noise.channel;
    for (const Gate& gate : gates) {
        apply_gate(rho, gate);
        apply_channel(rho, channel, gate.qubit0);
        if (gate.is_two_qubit()) {
            apply_channel(rho, channel, gate.qubit1);
        }
    }
    return rho;
}

double all_zero_probability(const StateVector& state) {
    return std::norm(state.amplitudes[0]);
}

double all_zero_probability(const DensityMatrix& rho) {
    return rho.matrix[0].real();
}

double all_zero_probability(const SimState& state) {
    return std::visit([](const auto& s) { return all_zero_probability(s); }, state);
}

}  // namespace qsvr::sim
