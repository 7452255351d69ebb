#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qxsim/circuit.hpp"
#include "qxsim/errors.hpp"
#include "qxsim/hb.hpp"

namespace qxsim {

enum class ExitCode : int {
    Ok = 0,
    ConfigError = 2,
    SolverError = 3,
    IoError = 4,
};

/// Carries an exit code plus a machine-readable JSON description.
class SweepError : public Error {
public:
    SweepError(ExitCode code, const std::string& what) : Error(what), code_(code) {}
    ExitCode code() const { return code_; }
    std::string to_json() const;

private:
    ExitCode code_;
};

struct SweepConfig {
    // circuit source: exactly one of preset / netlist_path
    std::string preset;        // "uniform" | "floquet"
    std::string netlist_path;

    double pump_f_ghz = 0.0;   // 0 -> preset value
    double pump_current = 0.0; // amperes, peak; 0 -> preset value
    int pump_port = 1;
    int n_harmonics = 8;
    double hb_tol = 1e-9;

    double f_start_ghz = 3.5;
    double f_stop_ghz = 9.5;
    int f_count = 131;
    double f0_ghz = 6.0;       // fixed frequency for convergence reports

    int modes = 10;
    double tan_delta = -1.0;   // < 0: keep per-element values
    double temperature = 0.0;  // kelvin
    double pump_rescale_coeff = 0.0;  // I_P *= (1 + coeff * tan_delta)

    int workers = 0;           // 0 -> hardware concurrency
    std::vector<std::string> outputs = {"gain", "qe"};

    std::string to_json(bool pretty = false) const;
    static SweepConfig from_json(const std::string& text);
    std::uint64_t hash() const;  // FNV-1a over the canonical serialization
};

struct SweepRow {
    double f_signal_ghz = 0.0;
    double gain_db = 0.0;
    double idler_gain_db = 0.0;
    double s11_db = 0.0;
    double qe = 0.0;
    double qe_normalized = 0.0;
    double noise_ratio = 0.0;
    double comm_residual_max = 0.0;
    bool ok = false;
    std::string error;
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepRow> rows;
    bool pump_converged = false;
    int pump_iterations = 0;
    double pump_residual = 0.0;
    double pump_seconds = 0.0;
    double total_seconds = 0.0;
    int failures = 0;
};

/// Resolve the circuit and pump from a config (preset or netlist, overrides
/// applied). Exposed for the CLI and tests.
struct ResolvedSetup {
    Circuit circuit;
    PumpSpec pump;
};
ResolvedSetup resolve_setup(const SweepConfig& config);

/// One pump solve, then an X-matrix and metrics per signal frequency,
/// parallel over frequencies. Failed frequencies are flagged in their rows.
SweepResult run_sweep(const SweepConfig& config);

/// Write gain.csv (+ sweep.json) with the reproducibility header.
void write_sweep_outputs(const SweepResult& result, const std::string& out_dir);
std::string sweep_csv(const SweepResult& result, bool include_timestamp = true);

struct ConvergenceRow {
    int m = 0;
    double gain_db = 0.0;
    double qe = 0.0;
    double qe_normalized = 0.0;
    bool converged_vs_previous = false;  // |dQE| < 1e-3
};

/// Quantum efficiency at f0 for each mode count in `m_list` (ascending).
std::vector<ConvergenceRow> report_convergence(const SweepConfig& config,
                                               const std::vector<int>& m_list);

std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace qxsim
