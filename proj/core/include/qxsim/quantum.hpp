#pragma once

#include <Eigen/Dense>

#include "qxsim/xparam.hpp"

namespace qxsim {

/// X parameters rescaled to the photon-flux (ladder operator) basis,
/// x = X sqrt(|w_k / w_j|), so squared magnitudes count photon flux.
struct QuantumXMatrix {
    ModeSet modes;
    int n_ports = 0;
    Eigen::MatrixXcd entries;

    int flat(int port, int mode_idx) const { return (port - 1) * modes.m + mode_idx; }
    cplx at(int p_out, int j_idx, int q_in, int k_idx) const {
        return entries(flat(p_out, j_idx), flat(q_in, k_idx));
    }
};

QuantumXMatrix to_quantum(const XMatrix& x);
XMatrix from_quantum(const QuantumXMatrix& x);

/// Commutation residuals, one per (port p, mode j):
///   sum_{q,k} sgn(w_k) |x_{p,wj;q,wk}|^2 - sgn(w_j).
/// Zero (to numerical precision) for lossless circuits.
Eigen::MatrixXd commutation_residuals(const QuantumXMatrix& x);
double max_commutation_residual(const QuantumXMatrix& x);

/// Quantum efficiency of the (out, in) pair: |x_out,in|^2 over the noise from
/// all input modes; throws on an isolated (all-zero) output row.
double quantum_efficiency(const QuantumXMatrix& x, int p_out, int n_idx, int q_in,
                          int l_idx);

/// Ideal phase-insensitive amplifier quantum efficiency at power gain G.
double qe_ideal(double gain_linear);

/// Per-mode noise delivered by the device's internal dissipation, referenced
/// to the vacuum-limited input at (ref_port, ref_mode).
struct NoiseReport {
    ModeSet modes;
    int n_ports = 0;
    double temperature = 0.0;
    int ref_port = 1;
    int ref_mode_idx = 0;

    Eigen::MatrixXd p_dut;    // (ports x m) noise power density to the port, W/Hz
    double p_in = 0.0;        // available input noise power density, W/Hz
    Eigen::MatrixXd n_ratio;  // (ports x m) photon-flux noise ratio N

    // Photon-flux loss-channel sums split by sgn(w_k) (T = 0 dilation
    // weights); these close the lossy commutation relation.
    Eigen::MatrixXd g_pos, g_neg;

    // Optional per-device power contributions [W/Hz], (ports*m) x devices.
    Eigen::MatrixXd device_contributions;
    std::vector<std::size_t> device_elements;

    double n_at(int port, int mode_idx) const { return n_ratio(port - 1, mode_idx); }
};

/// Propagates every internal noise source (lossy capacitors, resistors) to
/// the ports through the linearized system via adjoint solves.
NoiseReport noise_ratio(const LinearizedSystem& sys, double temperature,
                        int ref_port = 1, int ref_mode_idx = -1,
                        bool store_device_contributions = false);
NoiseReport noise_ratio(const Circuit& circuit, const PumpSolution& pump,
                        const ModeSet& modes, double temperature);

/// Eq-with-loss quantum efficiency: the noise ratio joins the denominator.
double qe_with_loss(const QuantumXMatrix& x, const NoiseReport& report, int p_out,
                    int n_idx, int q_in, int l_idx);

/// Commutation residuals with dissipation: internal loss channels enter as
/// extra (vacuum-filled) ports with sgn(w_k)-weighted photon-flux gains.
Eigen::MatrixXd lossy_commutation_residuals(const QuantumXMatrix& x,
                                            const NoiseReport& report);
double max_lossy_commutation_residual(const QuantumXMatrix& x, const NoiseReport& report);

/// QE normalized by the ideal-amplifier QE at the same gain.
double normalized_qe(const QuantumXMatrix& x, int p_out, int n_idx, int q_in, int l_idx,
                     const NoiseReport* report = nullptr);

}  // namespace qxsim
