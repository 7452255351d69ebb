// Command-line driver: presets, sweeps, convergence tables, and the
// analytic compression model.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qxsim/compression.hpp"
#include "qxsim/hb.hpp"
#include "qxsim/mna.hpp"
#include "qxsim/netlist.hpp"
#include "qxsim/quantum.hpp"
#include "qxsim/sweep.hpp"
#include "qxsim/version.hpp"
#include "qxsim/xparam.hpp"

using namespace qxsim;

namespace {

int fail(const SweepError& e) {
    std::cerr << e.to_json() << std::endl;
    return static_cast<int>(e.code());
}

int fail(ExitCode code, const std::string& msg) { return fail(SweepError(code, msg)); }

struct SweepCli {
    std::string config_path;
    std::string preset;
    std::string netlist;
    std::optional<int> modes;
    std::optional<double> tan_delta;
    std::optional<double> pump_f_ghz;
    std::optional<double> pump_current_ua;
    std::optional<double> pump_rescale;
    std::optional<double> f_start, f_stop;
    std::optional<int> f_count;
    std::optional<double> f0;
    std::optional<int> harmonics;
    std::optional<double> temperature;
    std::optional<int> workers;
    std::string out_dir = "out";
    std::string dump_pump;
    std::string export_xmatrix;
};

SweepConfig make_config(const SweepCli& cli) {
    SweepConfig cfg;
    if (!cli.config_path.empty()) {
        std::ifstream f(cli.config_path);
        if (!f) throw SweepError(ExitCode::IoError, "cannot open config '" + cli.config_path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        cfg = SweepConfig::from_json(ss.str());
    }
    // command line wins over the config file
    if (!cli.preset.empty()) cfg.preset = cli.preset;
    if (!cli.netlist.empty()) {
        cfg.netlist_path = cli.netlist;
        if (!cli.preset.empty()) {
            throw SweepError(ExitCode::ConfigError, "--preset and --netlist are exclusive");
        }
        cfg.preset.clear();
    }
    if (cli.modes) cfg.modes = *cli.modes;
    if (cli.tan_delta) cfg.tan_delta = *cli.tan_delta;
    if (cli.pump_f_ghz) cfg.pump_f_ghz = *cli.pump_f_ghz;
    if (cli.pump_current_ua) cfg.pump_current = *cli.pump_current_ua * 1e-6;
    if (cli.pump_rescale) cfg.pump_rescale_coeff = *cli.pump_rescale;
    if (cli.f_start) cfg.f_start_ghz = *cli.f_start;
    if (cli.f_stop) cfg.f_stop_ghz = *cli.f_stop;
    if (cli.f_count) cfg.f_count = *cli.f_count;
    if (cli.f0) cfg.f0_ghz = *cli.f0;
    if (cli.harmonics) cfg.n_harmonics = *cli.harmonics;
    if (cli.temperature) cfg.temperature = *cli.temperature;
    if (cli.workers) cfg.workers = *cli.workers;
    return cfg;
}

void add_sweep_flags(CLI::App* app, SweepCli& cli, bool include_modes = true) {
    app->add_option("--config", cli.config_path, "JSON config file");
    app->add_option("--preset", cli.preset, "uniform|floquet");
    app->add_option("--netlist", cli.netlist, "netlist file instead of a preset");
    if (include_modes) app->add_option("--modes", cli.modes, "number of signal/idler modes m");
    app->add_option("--tan-delta", cli.tan_delta, "global dielectric loss tangent override");
    app->add_option("--pump-f-ghz", cli.pump_f_ghz, "pump frequency [GHz]");
    app->add_option("--pump-current-ua", cli.pump_current_ua, "pump peak current [uA]");
    app->add_option("--pump-rescale-coeff", cli.pump_rescale,
                    "I_P *= (1 + coeff * tan_delta)");
    app->add_option("--f-start", cli.f_start, "signal grid start [GHz]");
    app->add_option("--f-stop", cli.f_stop, "signal grid stop [GHz]");
    app->add_option("--f-count", cli.f_count, "signal grid point count");
    app->add_option("--f0", cli.f0, "fixed frequency for convergence reports [GHz]");
    app->add_option("--harmonics", cli.harmonics, "pump harmonics in the balance");
    app->add_option("--temperature", cli.temperature, "noise temperature [K]");
    app->add_option("--workers", cli.workers, "sweep worker threads (0 = hardware)");
    app->add_option("--out", cli.out_dir, "output directory");
}

int run_sweep_cmd(const SweepCli& cli) {
    SweepConfig cfg = make_config(cli);
    SweepResult result = run_sweep(cfg);
    write_sweep_outputs(result, cli.out_dir);

    if (!cli.dump_pump.empty() || !cli.export_xmatrix.empty()) {
        ResolvedSetup setup = resolve_setup(cfg);
        HbOptions hb;
        hb.tol = cfg.hb_tol;
        PumpSolution pump = solve_pump(setup.circuit, setup.pump, hb);
        if (!cli.dump_pump.empty()) {
            std::ofstream f(cli.dump_pump);
            f << pump_solution_to_json(setup.circuit, pump) << '\n';
        }
        if (!cli.export_xmatrix.empty()) {
            ModeSet ms = mode_frequencies(2.0 * constants::pi * cfg.f0_ghz * 1e9,
                                          setup.pump.omega_p, cfg.modes);
            XMatrix x = linearized_xmatrix(setup.circuit, pump, ms);
            std::ofstream fj(cli.export_xmatrix + ".json");
            fj << xmatrix_to_json(x) << '\n';
            std::ofstream fc(cli.export_xmatrix + ".csv");
            fc << xmatrix_to_csv(x);
        }
    }

    std::printf("sweep: %d points (%d failed), pump %.2f s, total %.2f s -> %s/gain.csv\n",
                cfg.f_count, result.failures, result.pump_seconds, result.total_seconds,
                cli.out_dir.c_str());
    if (result.failures > 0) {
        throw SweepError(ExitCode::SolverError,
                         std::to_string(result.failures) +
                             " frequency points failed; partial results written");
    }
    return 0;
}

int run_convergence_cmd(const SweepCli& cli, const std::string& modes_list) {
    SweepConfig cfg = make_config(cli);
    std::vector<int> ms;
    std::stringstream ss(modes_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) ms.push_back(std::stoi(tok));
    auto rows = report_convergence(cfg, ms);
    std::string csv = convergence_csv(rows);
    std::filesystem::create_directories(cli.out_dir);
    std::ofstream f(cli.out_dir + "/convergence.csv");
    f << csv;
    std::cout << csv;
    return 0;
}

int run_compression_cmd(double g0_db, double pump_dbm, double start_dbm, double stop_dbm,
                        int count, const std::string& out_path) {
    double g0 = std::pow(10.0, g0_db / 10.0);
    double pp = std::pow(10.0, (pump_dbm - 30.0) / 10.0);
    CompressionCurve curve;
    curve.g0 = g0;
    curve.pump_power = pp;
    for (int i = 0; i < count; ++i) {
        double dbm = start_dbm + (stop_dbm - start_dbm) * i / std::max(1, count - 1);
        double ps = std::pow(10.0, (dbm - 30.0) / 10.0);
        curve.samples.emplace_back(ps, pump_depletion_gain(g0, ps, pp));
    }
    double p1 = p1db(curve);
    double p1_closed = p1db_analytic(g0, pp);
    std::printf("P1dB = %.4f dBm (closed form %.4f dBm)\n",
                10.0 * std::log10(p1 * 1e3), 10.0 * std::log10(p1_closed * 1e3));
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        write_compression_csv(curve, f);
    }
    return 0;
}

int run_dump_mna_cmd(const std::string& netlist, double f_ghz, const std::string& out_path) {
    Circuit c = load_netlist(netlist);
    AdmittanceSystem sys = assemble_linear(c, 2.0 * constants::pi * f_ghz * 1e9);
    if (out_path.empty()) {
        dump_matrix_market(sys.matrix, std::cout);
    } else {
        std::ofstream f(out_path);
        dump_matrix_market(sys.matrix, f);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qxsim: frequency-domain simulator for pumped Josephson circuits"};
    app.set_version_flag("--version", std::string(version_string));
    app.require_subcommand(1);

    SweepCli sweep_cli;
    auto* sweep_cmd = app.add_subcommand("sweep", "pump + X-parameter sweep over signal frequency");
    add_sweep_flags(sweep_cmd, sweep_cli);
    sweep_cmd->add_option("--dump-pump", sweep_cli.dump_pump, "write pump solution JSON");
    sweep_cmd->add_option("--export-xmatrix", sweep_cli.export_xmatrix,
                          "write X matrix (json+csv) at --f0");

    SweepCli conv_cli;
    std::string modes_list = "2,4,6,8,10";
    auto* conv_cmd = app.add_subcommand("convergence", "QE vs mode count at a fixed frequency");
    add_sweep_flags(conv_cmd, conv_cli, /*include_modes=*/false);
    conv_cmd->add_option("--modes", modes_list, "comma-separated mode counts");

    double g0_db = 20.0, pump_dbm = -70.0, start_dbm = -140.0, stop_dbm = -90.0;
    int comp_count = 101;
    std::string comp_out;
    auto* comp_cmd = app.add_subcommand("compression", "analytic pump-depletion compression");
    comp_cmd->add_option("--g0-db", g0_db, "small-signal gain [dB]");
    comp_cmd->add_option("--pump-dbm", pump_dbm, "available pump power [dBm]");
    comp_cmd->add_option("--start-dbm", start_dbm, "signal power grid start [dBm]");
    comp_cmd->add_option("--stop-dbm", stop_dbm, "signal power grid stop [dBm]");
    comp_cmd->add_option("--count", comp_count, "grid points");
    comp_cmd->add_option("--out", comp_out, "CSV output path");

    std::string mna_netlist, mna_out;
    double mna_f_ghz = 6.0;
    auto* mna_cmd = app.add_subcommand("dump-mna", "matrix-market dump of the assembled MNA system");
    mna_cmd->add_option("--netlist", mna_netlist, "netlist file")->required();
    mna_cmd->add_option("--freq-ghz", mna_f_ghz, "assembly frequency [GHz]");
    mna_cmd->add_option("--out", mna_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_cli);
        if (conv_cmd->parsed()) return run_convergence_cmd(conv_cli, modes_list);
        if (comp_cmd->parsed()) {
            return run_compression_cmd(g0_db, pump_dbm, start_dbm, stop_dbm, comp_count, comp_out);
        }
        if (mna_cmd->parsed()) return run_dump_mna_cmd(mna_netlist, mna_f_ghz, mna_out);
    } catch (const SweepError& e) {
        return fail(e);
    } catch (const IoError& e) {
        return fail(ExitCode::IoError, e.what());
    } catch (const SingularSystemError& e) {
        return fail(ExitCode::SolverError, e.what());
    } catch (const ParseError& e) {
        return fail(ExitCode::ConfigError, e.what());
    } catch (const ValidationError& e) {
        return fail(ExitCode::ConfigError, e.what());
    } catch (const Error& e) {
        return fail(ExitCode::SolverError, e.what());
    }
    return 0;
}
