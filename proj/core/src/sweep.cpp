#include "qxsim/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "qxsim/jtwpa.hpp"
#include "qxsim/netlist.hpp"
#include "qxsim/quantum.hpp"
#include "qxsim/xparam.hpp"

namespace qxsim {

using nlohmann::json;

std::string SweepError::to_json() const {
    json j;
    j["error"] = what();
    j["exit_code"] = static_cast<int>(code());
    return j.dump();
}

std::string SweepConfig::to_json(bool pretty) const {
    json j;
    j["circuit"]["preset"] = preset;
    j["circuit"]["netlist"] = netlist_path;
    j["pump"]["f_GHz"] = pump_f_ghz;
    j["pump"]["current_A"] = pump_current;
    j["pump"]["port"] = pump_port;
    j["pump"]["harmonics"] = n_harmonics;
    j["pump"]["tol"] = hb_tol;
    j["signal"]["f_start_GHz"] = f_start_ghz;
    j["signal"]["f_stop_GHz"] = f_stop_ghz;
    j["signal"]["count"] = f_count;
    j["signal"]["f0_GHz"] = f0_ghz;
    j["modes"] = modes;
    j["tan_delta"] = tan_delta;
    j["temperature_K"] = temperature;
    j["pump_rescale_coeff"] = pump_rescale_coeff;
    j["workers"] = workers;
    j["outputs"] = outputs;
    return pretty ? j.dump(2) : j.dump();
}

SweepConfig SweepConfig::from_json(const std::string& text) {
    SweepConfig c;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SweepError(ExitCode::ConfigError, std::string("bad config JSON: ") + e.what());
    }
    try {
        if (j.contains("circuit")) {
            c.preset = j["circuit"].value("preset", "");
            c.netlist_path = j["circuit"].value("netlist", "");
        }
        if (j.contains("pump")) {
            c.pump_f_ghz = j["pump"].value("f_GHz", 0.0);
            c.pump_current = j["pump"].value("current_A", 0.0);
            c.pump_port = j["pump"].value("port", 1);
            c.n_harmonics = j["pump"].value("harmonics", 8);
            c.hb_tol = j["pump"].value("tol", 1e-9);
        }
        if (j.contains("signal")) {
            c.f_start_ghz = j["signal"].value("f_start_GHz", 3.5);
            c.f_stop_ghz = j["signal"].value("f_stop_GHz", 9.5);
            c.f_count = j["signal"].value("count", 131);
            c.f0_ghz = j["signal"].value("f0_GHz", 6.0);
        }
        c.modes = j.value("modes", 10);
        c.tan_delta = j.value("tan_delta", -1.0);
        c.temperature = j.value("temperature_K", 0.0);
        c.pump_rescale_coeff = j.value("pump_rescale_coeff", 0.0);
        c.workers = j.value("workers", 0);
        if (j.contains("outputs")) c.outputs = j["outputs"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw SweepError(ExitCode::ConfigError, std::string("bad config field: ") + e.what());
    }
    return c;
}

std::uint64_t SweepConfig::hash() const {
    std::string s = to_json();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

ResolvedSetup resolve_setup(const SweepConfig& config) {
    if (config.preset.empty() == config.netlist_path.empty()) {
        throw SweepError(ExitCode::ConfigError,
                         "exactly one of circuit.preset / circuit.netlist is required");
    }
    if (config.f_count < 1) throw SweepError(ExitCode::ConfigError, "signal.count must be >= 1");
    if (config.modes < 2) throw SweepError(ExitCode::ConfigError, "modes must be >= 2");

    ResolvedSetup out;
    PumpSpec pump;
    try {
        if (!config.preset.empty()) {
            JtwpaPreset p = preset_by_name(config.preset);
            out.circuit = config.preset == "floquet" ? build_floquet_jtwpa(p.params)
                                                     : build_uniform_jtwpa(p.params);
            pump.omega_p = p.pump_omega;
            pump.current = p.pump_current;
            pump.source_port = p.pump_port;
        } else {
            out.circuit = load_netlist(config.netlist_path);
        }
    } catch (const IoError& e) {
        throw SweepError(ExitCode::IoError, e.what());
    } catch (const Error& e) {
        throw SweepError(ExitCode::ConfigError, e.what());
    }

    if (config.pump_f_ghz > 0.0) pump.omega_p = 2.0 * constants::pi * config.pump_f_ghz * 1e9;
    if (config.pump_current > 0.0) pump.current = config.pump_current;
    pump.source_port = config.pump_port;
    pump.n_harmonics = config.n_harmonics;
    if (pump.omega_p <= 0.0) {
        throw SweepError(ExitCode::ConfigError, "pump.f_GHz is required for netlist circuits");
    }

    double td = config.tan_delta;
    if (td >= 0.0) out.circuit = with_tan_delta(out.circuit, td);
    if (config.pump_rescale_coeff != 0.0 && td > 0.0) {
        pump.current *= 1.0 + config.pump_rescale_coeff * td;
    }
    out.pump = pump;
    return out;
}

namespace {

bool circuit_has_loss(const Circuit& c) { return !enumerate_noise_sources(c).empty(); }

SweepRow evaluate_point(const Circuit& circuit, const PumpSolution& pump, double f_ghz,
                        int m, double temperature, bool lossy,
                        const Eigen::MatrixXcd& cos_coef) {
    SweepRow row;
    row.f_signal_ghz = f_ghz;
    try {
        ModeSet ms = mode_frequencies(2.0 * constants::pi * f_ghz * 1e9, pump.omega_p, m);
        LinearizedSystem sys(circuit, pump, ms, &cos_coef);
        XMatrix x = sys.xmatrix();
        QuantumXMatrix qx = to_quantum(x);
        const int s = ms.signal_index();

        row.gain_db = signal_gain_db(x);
        row.idler_gain_db = idler_gain_db(x);
        row.s11_db = input_match_db(x);
        if (lossy) {
            NoiseReport rep = noise_ratio(sys, temperature);
            row.qe = qe_with_loss(qx, rep, 2, s, 1, s);
            row.noise_ratio = rep.n_at(2, s);
            row.comm_residual_max = max_lossy_commutation_residual(qx, rep);
        } else {
            row.qe = quantum_efficiency(qx, 2, s, 1, s);
            row.noise_ratio = 0.0;
            row.comm_residual_max = max_commutation_residual(qx);
        }
        row.qe_normalized = row.qe / qe_ideal(std::norm(qx.at(2, s, 1, s)));
        row.ok = true;
    } catch (const Error& e) {
        row.ok = false;
        row.error = e.what();
        row.gain_db = row.idler_gain_db = row.s11_db = row.qe = row.qe_normalized =
            row.noise_ratio = row.comm_residual_max = std::nan("");
    }
    return row;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    ResolvedSetup setup = resolve_setup(config);

    SweepResult result;
    result.config = config;

    HbOptions hb;
    hb.tol = config.hb_tol;
    PumpSolution pump = solve_pump(setup.circuit, setup.pump, hb);
    auto t1 = std::chrono::steady_clock::now();
    result.pump_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.pump_converged = pump.converged;
    result.pump_iterations = pump.iterations;
    result.pump_residual = pump.residual_history.back();
    if (!pump.converged) {
        throw SweepError(ExitCode::SolverError,
                         "pump harmonic balance did not converge (residual " +
                             std::to_string(result.pump_residual) + " after " +
                             std::to_string(pump.iterations) + " iterations)");
    }

    const bool lossy = circuit_has_loss(setup.circuit) || config.temperature > 0.0;
    const Eigen::MatrixXcd cos_coef = pump.cos_coefficients(2 * std::max(1, config.modes - 1));

    result.rows.resize(config.f_count);
    std::atomic<int> next{0};
    int n_workers = config.workers > 0
                        ? config.workers
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min(n_workers, config.f_count));

    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= config.f_count) return;
            double f = config.f_count == 1
                           ? config.f_start_ghz
                           : config.f_start_ghz + (config.f_stop_ghz - config.f_start_ghz) *
                                                      i / (config.f_count - 1);
            result.rows[i] = evaluate_point(setup.circuit, pump, f, config.modes,
                                            config.temperature, lossy, cos_coef);
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (const auto& r : result.rows) {
        if (!r.ok) ++result.failures;
    }
    result.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string sweep_csv(const SweepResult& result, bool include_timestamp) {
    std::string out;
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(result.config.hash()));
    out += "# qxsim-version: 0.1.0\n";
    out += "# config-hash: " + std::string(hash) + "\n";
    out += "# config: " + result.config.to_json() + "\n";
    if (include_timestamp) {
        std::time_t now = std::time(nullptr);
        char ts[64];
        std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out += "# timestamp: " + std::string(ts) + "\n";
        out += "# wall-seconds: " + fmt(result.total_seconds) + "\n";
    }
    out += "# pump-converged: " + std::string(result.pump_converged ? "true" : "false") + "\n";
    out += "f_signal_GHz,gain_dB,idler_gain_dB,s11_dB,qe,qe_normalized,noise_ratio,comm_residual_max\n";
    for (const auto& r : result.rows) {
        out += fmt(r.f_signal_ghz) + "," + fmt(r.gain_db) + "," + fmt(r.idler_gain_db) + "," +
               fmt(r.s11_db) + "," + fmt(r.qe) + "," + fmt(r.qe_normalized) + "," +
               fmt(r.noise_ratio) + "," + fmt(r.comm_residual_max) + "\n";
    }
    return out;
}

void write_sweep_outputs(const SweepResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    std::ofstream csv(out_dir + "/gain.csv");
    if (!csv) throw SweepError(ExitCode::IoError, "cannot write " + out_dir + "/gain.csv");
    csv << sweep_csv(result);

    json j;
    j["config"] = json::parse(result.config.to_json());
    j["pump"] = {{"converged", result.pump_converged},
                 {"iterations", result.pump_iterations},
                 {"residual", result.pump_residual},
                 {"seconds", result.pump_seconds}};
    j["total_seconds"] = result.total_seconds;
    j["failures"] = result.failures;
    json rows = json::array();
    for (const auto& r : result.rows) {
        json row;
        row["f_signal_GHz"] = r.f_signal_ghz;
        row["ok"] = r.ok;
        if (r.ok) {
            row["gain_dB"] = r.gain_db;
            row["idler_gain_dB"] = r.idler_gain_db;
            row["s11_dB"] = r.s11_db;
            row["qe"] = r.qe;
            row["qe_normalized"] = r.qe_normalized;
            row["noise_ratio"] = r.noise_ratio;
            row["comm_residual_max"] = r.comm_residual_max;
        } else {
            row["error"] = r.error;
        }
        rows.push_back(row);
    }
    j["rows"] = rows;
    std::ofstream js(out_dir + "/sweep.json");
    if (!js) throw SweepError(ExitCode::IoError, "cannot write " + out_dir + "/sweep.json");
    js << j.dump(2) << '\n';
}

std::vector<ConvergenceRow> report_convergence(const SweepConfig& config,
                                               const std::vector<int>& m_list) {
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        if (m_list[i] < 2 || (i > 0 && m_list[i] <= m_list[i - 1])) {
            throw SweepError(ExitCode::ConfigError,
                             "mode list must be ascending with every entry >= 2");
        }
    }
    ResolvedSetup setup = resolve_setup(config);
    HbOptions hb;
    hb.tol = config.hb_tol;
    PumpSolution pump = solve_pump(setup.circuit, setup.pump, hb);
    if (!pump.converged) {
        throw SweepError(ExitCode::SolverError, "pump harmonic balance did not converge");
    }

    const bool lossy = circuit_has_loss(setup.circuit) || config.temperature > 0.0;
    std::vector<ConvergenceRow> rows;
    double prev_qe = 0.0;
    for (int m : m_list) {
        const Eigen::MatrixXcd cc = pump.cos_coefficients(2 * std::max(1, m - 1));
        SweepRow r = evaluate_point(setup.circuit, pump, config.f0_ghz, m,
                                    config.temperature, lossy, cc);
        if (!r.ok) throw SweepError(ExitCode::SolverError, "m=" + std::to_string(m) + ": " + r.error);
        ConvergenceRow c;
        c.m = m;
        c.gain_db = r.gain_db;
        c.qe = r.qe;
        c.qe_normalized = r.qe_normalized;
        c.converged_vs_previous = !rows.empty() && std::abs(r.qe - prev_qe) < 1e-3;
        prev_qe = r.qe;
        rows.push_back(c);
    }
    return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::string out = "m,gain_dB,qe,qe_normalized,converged\n";
    for (const auto& r : rows) {
        out += std::to_string(r.m) + "," + fmt(r.gain_db) + "," + fmt(r.qe) + "," +
               fmt(r.qe_normalized) + "," + (r.converged_vs_previous ? "true" : "false") + "\n";
    }
    return out;
}

}  // namespace qxsim
