#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qxsim/circuit.hpp"
#include "qxsim/mna.hpp"

namespace qxsim {

/// Single-tone pump drive: peak Norton current at the source port (the port's
/// Z0 acts as the source impedance, so about half the current enters a
/// matched line).
struct PumpSpec {
    double omega_p = 0.0;    // rad/s
    double current = 0.0;    // amperes, peak
    int source_port = 1;
    int n_harmonics = 8;     // pump harmonics kept in the balance
    double phase = 0.0;      // radians
};

struct HbOptions {
    double tol = 1e-9;       // scaled Kirchhoff residual, relative to drive
    int max_iterations = 40;
    bool continuation = true;          // source stepping on Newton failure
    bool force_continuation = false;   // skip the direct attempt (testing aid)
    int max_continuation_legs = 64;
    // Restrict unknowns to odd pump harmonics when every active drive sits at
    // an odd harmonic; exact for half-wave-symmetric circuits and verified
    // against the full residual after convergence.
    bool exploit_half_wave_symmetry = true;
};

/// Periodic steady state of the pumped circuit. Phasors are peak-valued:
/// x(t) = X0 + sum_h Re[X_h exp(i h w_p t)]. Column h of each matrix holds
/// the phasor at h*w_p (column 0 = DC, identically zero for pure AC drives).
struct PumpSolution {
    double omega_p = 0.0;
    int n_harmonics = 0;
    double drive_current = 0.0;

    Eigen::MatrixXcd node_phasors;      // mna unknowns x (n_harmonics+1)
    Eigen::MatrixXcd junction_phases;   // junctions x (n_harmonics+1), radians
    std::vector<std::size_t> junction_elements;  // element indices, row order
    std::vector<double> junction_ic;             // amperes, row order

    bool converged = false;
    bool overdriven = false;            // some |phi_1| >= pi/2
    int iterations = 0;
    std::vector<double> residual_history;
    double max_phase_amplitude = 0.0;   // max_t |phi_j(t)| over junctions

    /// Double-sided Fourier coefficients of Ic_j cos(phi_j(t)) for indices
    /// 0..max_index (negative indices are conjugates). Indices beyond
    /// 2*n_harmonics are truncated to zero. These are the junction
    /// conversion blocks consumed by the spectral linearization.
    Eigen::MatrixXcd cos_coefficients(int max_index) const;

    /// Peak phasor of phi_j at harmonic h.
    cplx phase_phasor(int junction_row, int h) const { return junction_phases(junction_row, h); }
};

/// Fourier coefficients (peak phasors, index 0..N) of ic*sin(phi(t)) for a
/// phase with peak phasors phi[0..N]; oversampled time sampling + DFT.
std::vector<cplx> jj_current_spectrum(const std::vector<cplx>& phase_phasors, double ic);

/// Same for ic*cos(phi(t)) up to max_index: the per-harmonic derivative
/// blocks dI_m/dphi_n of the sin nonlinearity.
std::vector<cplx> jj_cos_spectrum(const std::vector<cplx>& phase_phasors, double ic,
                                  int max_index);

/// Harmonic balance with Newton iteration on the spectral residual; junction
/// phases and node voltage phasors are the unknown basis. Non-convergence is
/// reported on the returned solution (best iterate + residual history), not
/// thrown.
PumpSolution solve_pump(const Circuit& circuit, const PumpSpec& spec,
                        const HbOptions& options = {});

struct PowerBalance {
    double delivered = 0.0;   // by all active sources, all harmonics [W]
    double dissipated = 0.0;  // lossy elements + port terminations [W]
};

/// Time-averaged power bookkeeping for a converged solution; `delivered` and
/// `dissipated` agree within ~10x solver tolerance for valid solutions.
PowerBalance harmonic_power_balance(const Circuit& circuit, const PumpSpec& spec,
                                    const PumpSolution& sol);

/// JSON dump of the solution (node phasors per harmonic) for debugging and
/// cross-checks against the transient integrator.
std::string pump_solution_to_json(const Circuit& circuit, const PumpSolution& sol);

}  // namespace qxsim
