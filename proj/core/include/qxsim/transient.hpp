#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "qxsim/circuit.hpp"
#include "qxsim/hb.hpp"

namespace qxsim {

/// Small-scale adaptive trapezoidal integrator used as an independent
/// verification oracle. Lossy capacitors and Touchstone attachments are
/// rejected; circuit size is capped.
struct TransientConfig {
    double stop_time = 0.0;        // seconds
    double max_phase_step = 0.01;  // radians per junction per step, in (0, pi/5]
    double max_step = 0.0;         // seconds; 0 -> min drive period / 64

    struct Drive {
        double omega = 0.0;      // rad/s
        double amplitude = 0.0;  // amperes, peak (Norton at the port)
        double phase = 0.0;      // radians
        int port = 1;
    };
    std::vector<Drive> drives;

    double output_dt = 0.0;  // uniform output spacing; 0 -> max_step / 2
    int max_nodes = 400;
};

struct TransientResult {
    double dt = 0.0;
    std::vector<double> time;        // uniform grid
    Eigen::MatrixXd node_voltages;   // samples x (node_count - 1)
    long accepted_steps = 0;
    long rejected_steps = 0;

    double port_voltage(const Circuit& c, int port, std::size_t sample) const;
};

TransientResult transient_solve(const Circuit& circuit, const TransientConfig& config);

struct SignalSpec {
    double omega = 0.0;
    double amplitude = 0.0;  // amperes, peak (Norton)
    int input_port = 1;
    int output_port = 2;
    // projection window length; longer windows suppress leakage from the
    // idler tones nearest the signal
    double window_periods = 25.0;
    double drift_tol = 1e-3;
};

struct TdGainResult {
    cplx gain;                // X_{out,ws; in,ws} estimate
    double window_drift = 0.0;  // relative projection drift between windows
    double settle_time = 0.0;
    double total_time = 0.0;
};

/// Three-run protocol: pump only, then pump + signal at two signal phases;
/// the pump-only waveform is subtracted and the residual projected at the
/// signal frequency over trailing windows.
TdGainResult extract_gain_td(const Circuit& circuit, const PumpSpec& pump,
                             const SignalSpec& signal, const TransientConfig& base = {});

void write_waveform_csv(const Circuit& circuit, const TransientResult& r, std::ostream& os);

}  // namespace qxsim
