#pragma once

#include "qsvr/rng.hpp"
#include "qsvr/simulator.hpp"

#include <Eigen/Dense>

#include <vector>

namespace support {

// Random density matrix: rho = A A^dag / tr(A A^dag) is Hermitian, PSD and
// trace one for any complex A.
inline qsvr::sim::DensityMatrix random_density(int n_qubits, qsvr::Rng& rng) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
    Eigen::MatrixXcd a(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            a(r, c) = std::complex<double>(rng.normal(), rng.normal());
        }
    }
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace().real();

    qsvr::sim::DensityMatrix out;
    out.n_qubits = n_qubits;
    out.matrix.resize(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = rho(r, c);
        }
    }
    return out;
}

inline std::vector<double> random_sample(int dims, qsvr::Rng& rng) {
    std::vector<double> x(static_cast<std::size_t>(dims));
    for (double& v : x) {
        v = rng.uniform();
    }
    return x;
}

inline std::vector<std::vector<double>> random_samples(int count, int dims, qsvr::Rng& rng) {
    std::vector<std::vector<double>> samples;
    samples.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        samples.push_back(random_sample(dims, rng));
    }
    return samples;
}

inline std::vector<qsvr::sim::Gate> random_circuit(int n_qubits, int n_gates, qsvr::Rng& rng) {
    using qsvr::sim::Gate;
    std::vector<Gate> gates;
    for (int g = 0; g < n_gates; ++g) {
        const int qubit = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_qubits)));
        const double angle = rng.uniform(-3.14159265358979, 3.14159265358979);
        switch (rng.below(3)) {
            case 0:
                gates.push_back(Gate::rz(qubit, angle));
                break;
            case 1:
                gates.push_back(Gate::rx(qubit, angle));
                break;
            default: {
                int other = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_qubits)));
                if (other == qubit) {
                    other = (qubit + 1) % n_qubits;
                }
                gates.push_back(Gate::ising_zz(qubit, other, angle));
                break;
            }
        }
    }
    return gates;
}

inline double max_abs_diff(const qsvr::sim::DensityMatrix& a, const Eigen::MatrixXcd& b) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
        for (Eigen::Index c = 0; c < b.cols(); ++c) {
            worst = std::max(worst, std::abs(a.at(static_cast<std::size_t>(r),
                                                  static_cast<std::size_t>(c)) -
                                             b(r, c)));
        }
    }
    return worst;
}

inline double max_abs_diff(const qsvr::sim::DensityMatrix& a, const qsvr::sim::DensityMatrix& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.matrix.size(); ++k) {
        worst = std::max(worst, std::abs(a.matrix[k] - b.matrix[k]));
    }
    return worst;
}

}  // namespace support
