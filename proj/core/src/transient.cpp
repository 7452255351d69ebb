#include "qxsim/transient.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "qxsim/errors.hpp"

namespace qxsim {

namespace {

constexpr double kPhi0 = constants::reduced_flux_quantum;
using Triplet = Eigen::Triplet<double>;

struct Stepper {
    const Circuit& circuit;
    const TransientConfig& cfg;

    int n_nodes;       // excluding ground
    int n_unknowns;    // nodes + ideal voltage-source branches
    std::vector<int> vsrc_branch;  // per element, -1 if none

    // element working sets
    struct CapState { int a, b; double c; double v = 0.0, i = 0.0; };
    struct IndState { int a, b; double l; double v = 0.0, i = 0.0; };
    struct JjState { int a, b; double ic; double phi = 0.0, v = 0.0; };
    struct ResEntry { int a, b; double g; };
    struct SourceEntry {  // netlist sources
        int a, b, branch;
        SourceKind kind;
        double amplitude, omega, phase, rs;
    };
    std::vector<CapState> caps;
    std::vector<IndState> inds;
    std::vector<JjState> jjs;
    std::vector<ResEntry> ress;
    std::vector<SourceEntry> srcs;

    explicit Stepper(const Circuit& c, const TransientConfig& config)
        : circuit(c), cfg(config), n_nodes(c.node_count - 1) {
        if (n_nodes + 1 > cfg.max_nodes) {
            throw ValidationError("transient oracle: circuit exceeds the node cap (" +
                                  std::to_string(cfg.max_nodes) + ")");
        }
        int next = n_nodes;
        vsrc_branch.assign(c.elements.size(), -1);
        for (std::size_t i = 0; i < c.elements.size(); ++i) {
            const auto& e = c.elements[i];
            int a = e.nodes.size() > 0 ? e.nodes[0] - 1 : -1;
            int b = e.nodes.size() > 1 ? e.nodes[1] - 1 : -1;
            if (e.is<Capacitor>()) {
                const auto& cap = e.as<Capacitor>();
                if (cap.tan_delta != 0.0) {
                    throw ValidationError(
                        "transient oracle does not model lossy capacitors (tan_delta > 0)");
                }
                caps.push_back({a, b, cap.c});
            } else if (e.is<Inductor>()) {
                inds.push_back({a, b, e.as<Inductor>().l});
            } else if (e.is<JosephsonJunction>()) {
                jjs.push_back({a, b, e.as<JosephsonJunction>().ic});
            } else if (e.is<Resistor>()) {
                ress.push_back({a, b, 1.0 / e.as<Resistor>().r});
            } else if (e.is<Source>()) {
                const auto& s = e.as<Source>();
                SourceEntry se{a, b, -1, s.kind, s.amplitude, s.omega, s.phase,
                               s.source_impedance};
                if (s.kind == SourceKind::Voltage && s.source_impedance == 0.0) {
                    se.branch = next++;
                } else if (s.kind == SourceKind::Voltage) {
                    // Thevenin -> Norton
                    se.kind = SourceKind::Current;
                    se.amplitude = s.amplitude / s.source_impedance;
                    ress.push_back({a, b, 1.0 / s.source_impedance});
                } else if (s.source_impedance > 0.0) {
                    ress.push_back({a, b, 1.0 / s.source_impedance});
                }
                srcs.push_back(se);
            } else {
                throw ValidationError(
                    "transient oracle supports only lumped R, L, C, JJ, and sources");
            }
        }
        for (const auto& p : c.ports) {
            ress.push_back({p.positive - 1, p.negative - 1, 1.0 / p.z0});
        }
        n_unknowns = next;
    }

    // Norton drive currents at time t (ports + netlist current sources).
    void drive(double t, Eigen::VectorXd& rhs) const {
        for (const auto& d : cfg.drives) {
            const Port& p = circuit.port(d.port);
            double cur = d.amplitude * std::cos(d.omega * t + d.phase);
            if (p.positive > 0) rhs[p.positive - 1] += cur;
            if (p.negative > 0) rhs[p.negative - 1] -= cur;
        }
        for (const auto& s : srcs) {
            if (s.kind != SourceKind::Current) continue;
            double cur = s.amplitude * std::cos(s.omega * t + s.phase);
            if (s.a >= 0) rhs[s.a] += cur;
            if (s.b >= 0) rhs[s.b] -= cur;
        }
    }

    double node_v(const Eigen::VectorXd& x, int n) const { return n >= 0 ? x[n] : 0.0; }
    double vdiff(const Eigen::VectorXd& x, int a, int b) const {
        return node_v(x, a) - node_v(x, b);
    }

    /// One trapezoidal step of size h from state (v_now). Returns false when
    /// the inner Newton fails to converge.
    bool step(double t_now, double h, Eigen::VectorXd& x, double& dphi_max) {
        Eigen::VectorXd rhs0 = Eigen::VectorXd::Zero(n_unknowns);

        // constant part of the companion currents
        for (const auto& c : caps) {
            double g = 2.0 * c.c / h;
            double ieq = -g * c.v - c.i;
            if (c.a >= 0) rhs0[c.a] -= ieq;
            if (c.b >= 0) rhs0[c.b] += ieq;
        }
        for (const auto& l : inds) {
            double g = h / (2.0 * l.l);
            double ieq = l.i + g * l.v;
            if (l.a >= 0) rhs0[l.a] -= ieq;
            if (l.b >= 0) rhs0[l.b] += ieq;
        }
        drive(t_now + h, rhs0);
        for (const auto& s : srcs) {
            if (s.branch < 0) continue;
            rhs0[s.branch] = s.amplitude * std::cos(s.omega * (t_now + h) + s.phase);
        }

        Eigen::VectorXd xn = x;  // predictor: previous solution
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        bool analyzed = false;

        for (int iter = 0; iter < 30; ++iter) {
            std::vector<Triplet> trips;
            Eigen::VectorXd rhs = rhs0;

            auto put_g = [&](int a, int b, double g) {
                if (a >= 0) trips.emplace_back(a, a, g);
                if (b >= 0) trips.emplace_back(b, b, g);
                if (a >= 0 && b >= 0) {
                    trips.emplace_back(a, b, -g);
                    trips.emplace_back(b, a, -g);
                }
            };

            for (const auto& r : ress) put_g(r.a, r.b, r.g);
            for (const auto& c : caps) put_g(c.a, c.b, 2.0 * c.c / h);
            for (const auto& l : inds) put_g(l.a, l.b, h / (2.0 * l.l));
            for (const auto& s : srcs) {
                if (s.branch < 0) continue;
                if (s.a >= 0) {
                    trips.emplace_back(s.a, s.branch, 1.0);
                    trips.emplace_back(s.branch, s.a, 1.0);
                }
                if (s.b >= 0) {
                    trips.emplace_back(s.b, s.branch, -1.0);
                    trips.emplace_back(s.branch, s.b, -1.0);
                }
            }

            // junction linearization around the current iterate
            for (const auto& j : jjs) {
                double v_new = vdiff(xn, j.a, j.b);
                double phi_new = j.phi + h / (2.0 * kPhi0) * (v_new + j.v);
                double geq = j.ic * std::cos(phi_new) * h / (2.0 * kPhi0);
                double i_lin = j.ic * std::sin(phi_new) - geq * v_new;
                put_g(j.a, j.b, geq);
                if (j.a >= 0) rhs[j.a] -= i_lin;
                if (j.b >= 0) rhs[j.b] += i_lin;
            }

            Eigen::SparseMatrix<double> m(n_unknowns, n_unknowns);
            m.setFromTriplets(trips.begin(), trips.end());
            if (!analyzed) {
                lu.analyzePattern(m);
                analyzed = true;
            }
            lu.factorize(m);
            if (lu.info() != Eigen::Success) return false;
            Eigen::VectorXd x_next = lu.solve(rhs);
            if (!x_next.allFinite()) return false;

            double dv = (x_next - xn).lpNorm<Eigen::Infinity>();
            double scale = std::max(1e-9, x_next.lpNorm<Eigen::Infinity>());
            xn = x_next;
            if (dv < 1e-12 + 1e-10 * scale) break;
            if (iter == 29) return false;
        }

        dphi_max = 0.0;
        for (const auto& j : jjs) {
            double v_new = vdiff(xn, j.a, j.b);
            double dphi = h / (2.0 * kPhi0) * (v_new + j.v);
            dphi_max = std::max(dphi_max, std::abs(dphi));
        }
        x = xn;
        return true;
    }

    void commit(double h, const Eigen::VectorXd& x) {
        for (auto& c : caps) {
            double v_new = vdiff(x, c.a, c.b);
            c.i = 2.0 * c.c / h * (v_new - c.v) - c.i;
            c.v = v_new;
        }
        for (auto& l : inds) {
            double v_new = vdiff(x, l.a, l.b);
            l.i = l.i + h / (2.0 * l.l) * (v_new + l.v);
            l.v = v_new;
        }
        for (auto& j : jjs) {
            double v_new = vdiff(x, j.a, j.b);
            j.phi += h / (2.0 * kPhi0) * (v_new + j.v);
            j.v = v_new;
        }
    }
};

}  // namespace

double TransientResult::port_voltage(const Circuit& c, int port, std::size_t sample) const {
    const Port& p = c.port(port);
    double v = 0.0;
    if (p.positive > 0) v += node_voltages(sample, p.positive - 1);
    if (p.negative > 0) v -= node_voltages(sample, p.negative - 1);
    return v;
}

TransientResult transient_solve(const Circuit& circuit, const TransientConfig& config) {
    circuit.validate();
    if (!(config.stop_time > 0.0)) throw ValidationError("transient: stop_time must be > 0");
    if (!(config.max_phase_step > 0.0) || config.max_phase_step > constants::pi / 5.0) {
        throw ValidationError("transient: max_phase_step must be in (0, pi/5]");
    }

    double w_max = 0.0;
    for (const auto& d : config.drives) w_max = std::max(w_max, d.omega);
    for (const auto& e : circuit.elements) {
        if (e.is<Source>()) w_max = std::max(w_max, e.as<Source>().omega);
    }
    double h_max = config.max_step > 0.0
                       ? config.max_step
                       : (w_max > 0.0 ? (2.0 * constants::pi / w_max) / 64.0
                                      : config.stop_time / 1024.0);
    const double h_min = h_max * 1e-9;

    Stepper st(circuit, config);

    TransientResult out;
    out.dt = config.output_dt > 0.0 ? config.output_dt : h_max / 2.0;
    std::size_t n_out = static_cast<std::size_t>(config.stop_time / out.dt) + 1;
    out.time.resize(n_out);
    for (std::size_t i = 0; i < n_out; ++i) out.time[i] = i * out.dt;
    out.node_voltages.setZero(n_out, st.n_nodes);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(st.n_unknowns);
    Eigen::VectorXd x_prev = x;
    double t = 0.0, h = h_max;
    std::size_t out_idx = 1;  // index 0 holds the zero initial condition

    while (t < config.stop_time && out_idx < n_out) {
        h = std::min(h, config.stop_time - t);
        Eigen::VectorXd x_try = x;
        double dphi = 0.0;
        bool ok = st.step(t, h, x_try, dphi);
        if (!ok || dphi > config.max_phase_step) {
            ++out.rejected_steps;
            h *= 0.5;
            if (h < h_min) {
                throw Error("transient: step-size underflow at t = " + std::to_string(t));
            }
            continue;
        }
        st.commit(h, x_try);
        x_prev = x;
        x = x_try;
        double t_new = t + h;
        // linear interpolation onto the uniform output grid
        while (out_idx < n_out && out.time[out_idx] <= t_new + 1e-30) {
            double a = (out.time[out_idx] - t) / h;
            for (int n = 0; n < st.n_nodes; ++n) {
                out.node_voltages(out_idx, n) = (1.0 - a) * x_prev[n] + a * x[n];
            }
            ++out_idx;
        }
        t = t_new;
        ++out.accepted_steps;
        if (dphi < 0.4 * config.max_phase_step) h = std::min(h * 1.25, h_max);
    }
    return out;
}

TdGainResult extract_gain_td(const Circuit& circuit, const PumpSpec& pump,
                             const SignalSpec& signal, const TransientConfig& base) {
    const double t_pump = pump.omega_p > 0.0 ? 2.0 * constants::pi / pump.omega_p : 0.0;
    const double t_sig = 2.0 * constants::pi / signal.omega;

    TransientConfig cfg = base;
    if (cfg.stop_time <= 0.0) {
        cfg.stop_time = std::max(50.0 * t_pump, 0.0) + 3.2 * signal.window_periods * t_sig;
    }
    // identical step cap and output grid across the three runs so the
    // pump-only waveform subtracts sample-aligned
    const double w_hi = std::max(pump.current != 0.0 ? pump.omega_p : 0.0, signal.omega);
    if (cfg.max_step <= 0.0) cfg.max_step = (2.0 * constants::pi / w_hi) / 64.0;
    if (cfg.output_dt <= 0.0) cfg.output_dt = cfg.max_step / 2.0;
    cfg.drives.clear();
    if (pump.current != 0.0) {
        cfg.drives.push_back({pump.omega_p, pump.current, pump.phase, pump.source_port});
    }

    // run 1: pump only
    TransientConfig cfg_p = cfg;
    TransientResult pump_only = transient_solve(circuit, cfg_p);

    auto run_with_phase = [&](double phase) {
        TransientConfig c2 = cfg;
        c2.drives.push_back({signal.omega, signal.amplitude, phase, signal.input_port});
        return transient_solve(circuit, c2);
    };
    TransientResult r0 = run_with_phase(0.0);
    TransientResult r90 = run_with_phase(constants::pi / 2.0);

    // project the residual (pump-subtracted) output voltage over the two
    // trailing 10-signal-period windows
    const double w_len = signal.window_periods * t_sig;
    std::size_t n = std::min({pump_only.time.size(), r0.time.size(), r90.time.size()});
    std::size_t win = static_cast<std::size_t>(w_len / r0.dt);
    if (n < 2 * win + 2) throw ValidationError("extract_gain_td: stop_time too short");

    // Hann-windowed projection: suppresses leakage from pump-harmonic
    // remnants that imperfect pump-waveform cancellation leaves behind
    auto residual_projection = [&](const TransientResult& r, std::size_t i0, std::size_t i1) {
        cplx acc = 0.0;
        double wsum = 0.0;
        for (std::size_t i = i0; i <= i1; ++i) {
            double u = static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
            double w = 0.5 - 0.5 * std::cos(2.0 * constants::pi * u);
            double v = r.port_voltage(circuit, signal.output_port, i) -
                       pump_only.port_voltage(circuit, signal.output_port, i);
            acc += w * v * std::exp(cplx(0.0, -signal.omega * r.time[i]));
            wsum += w;
        }
        return 2.0 * acc / wsum;
    };

    std::size_t end = n - 1;
    cplx e0_b = residual_projection(r0, end - win, end);
    cplx e0_a = residual_projection(r0, end - 2 * win, end - win);
    cplx e90_b = residual_projection(r90, end - win, end);

    TdGainResult out;
    out.window_drift = std::abs(e0_b - e0_a) / std::max(std::abs(e0_b), 1e-300);
    out.settle_time = r0.time[end - 2 * win];
    out.total_time = r0.time[end];
    if (out.window_drift > signal.drift_tol) {
        throw Error("extract_gain_td: insufficient settling (window drift " +
                    std::to_string(out.window_drift) + ")");
    }

    const Port& pin = circuit.port(signal.input_port);
    const Port& pout = circuit.port(signal.output_port);
    cplx a = signal.amplitude * std::sqrt(pin.z0) / 2.0;
    cplx v = (e0_b - e90_b) / (cplx(1.0, 0.0) - cplx(0.0, 1.0));
    out.gain = v / std::sqrt(pout.z0) / a;
    return out;
}

void write_waveform_csv(const Circuit& circuit, const TransientResult& r, std::ostream& os) {
    os << "t_s";
    for (int n = 1; n < circuit.node_count; ++n) os << ",v_" << circuit.node_label(n);
    os << '\n';
    char buf[48];
    for (std::size_t i = 0; i < r.time.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g", r.time[i]);
        os << buf;
        for (int n = 0; n < r.node_voltages.cols(); ++n) {
            std::snprintf(buf, sizeof(buf), ",%.9g", r.node_voltages(i, n));
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace qxsim
