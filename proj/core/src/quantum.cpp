#include "qxsim/quantum.hpp"

#include <cmath>

#include "qxsim/errors.hpp"

namespace qxsim {

namespace {

double coth_factor(double omega_abs, double temperature) {
    if (temperature <= 0.0) return 1.0;
    double x = constants::hbar * omega_abs / (2.0 * constants::boltzmann_k * temperature);
    return 1.0 / std::tanh(x);
}

}  // namespace

QuantumXMatrix to_quantum(const XMatrix& x) {
    QuantumXMatrix q;
    q.modes = x.modes;
    q.n_ports = x.n_ports;
    q.entries = x.entries;
    const int m = x.modes.m;
    for (int j = 0; j < m; ++j) {
        double wj = std::abs(x.modes.freqs[j]);
        if (wj == 0.0) throw ValidationError("to_quantum: zero mode frequency");
        for (int k = 0; k < m; ++k) {
            double wk = std::abs(x.modes.freqs[k]);
            double scale = std::sqrt(wk / wj);
            for (int p = 0; p < x.n_ports; ++p) {
                for (int qq = 0; qq < x.n_ports; ++qq) {
                    q.entries(p * m + j, qq * m + k) *= scale;
                }
            }
        }
    }
    return q;
}

XMatrix from_quantum(const QuantumXMatrix& x) {
    XMatrix out;
    out.modes = x.modes;
    out.n_ports = x.n_ports;
    out.entries = x.entries;
    const int m = x.modes.m;
    for (int j = 0; j < m; ++j) {
        double wj = std::abs(x.modes.freqs[j]);
        for (int k = 0; k < m; ++k) {
            double wk = std::abs(x.modes.freqs[k]);
            double scale = std::sqrt(wj / wk);
            for (int p = 0; p < x.n_ports; ++p) {
                for (int qq = 0; qq < x.n_ports; ++qq) {
                    out.entries(p * m + j, qq * m + k) *= scale;
                }
            }
        }
    }
    return out;
}

Eigen::MatrixXd commutation_residuals(const QuantumXMatrix& x) {
    const int m = x.modes.m;
    Eigen::MatrixXd r(x.n_ports, m);
    for (int p = 1; p <= x.n_ports; ++p) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int q = 1; q <= x.n_ports; ++q) {
                for (int k = 0; k < m; ++k) {
                    acc += x.modes.sign(k) * std::norm(x.at(p, j, q, k));
                }
            }
            r(p - 1, j) = acc - x.modes.sign(j);
        }
    }
    return r;
}

double max_commutation_residual(const QuantumXMatrix& x) {
    return commutation_residuals(x).cwiseAbs().maxCoeff();
}

double quantum_efficiency(const QuantumXMatrix& x, int p_out, int n_idx, int q_in,
                          int l_idx) {
    double denom = 0.0;
    for (int q = 1; q <= x.n_ports; ++q) {
        for (int k = 0; k < x.modes.m; ++k) denom += std::norm(x.at(p_out, n_idx, q, k));
    }
    if (denom <= 0.0) {
        throw ValidationError("quantum_efficiency: isolated output mode (zero denominator)");
    }
    return std::norm(x.at(p_out, n_idx, q_in, l_idx)) / denom;
}

double qe_ideal(double gain_linear) {
    if (std::abs(gain_linear) < 1.0) return 1.0;
    return 1.0 / (2.0 - 1.0 / gain_linear);
}

NoiseReport noise_ratio(const LinearizedSystem& sys, double temperature, int ref_port,
                        int ref_mode_idx, bool store_device_contributions) {
    const ModeSet& modes = sys.modes();
    const Circuit& circuit = sys.circuit();
    const int m = modes.m;
    const int np = static_cast<int>(circuit.ports.size());
    if (ref_mode_idx < 0) ref_mode_idx = modes.signal_index();

    NoiseReport rep;
    rep.modes = modes;
    rep.n_ports = np;
    rep.temperature = temperature;
    rep.ref_port = ref_port;
    rep.ref_mode_idx = ref_mode_idx;
    rep.p_dut = Eigen::MatrixXd::Zero(np, m);
    rep.n_ratio = Eigen::MatrixXd::Zero(np, m);
    rep.g_pos = Eigen::MatrixXd::Zero(np, m);
    rep.g_neg = Eigen::MatrixXd::Zero(np, m);

    auto sources = enumerate_noise_sources(circuit);
    if (store_device_contributions) {
        rep.device_contributions = Eigen::MatrixXd::Zero(np * m, sources.size());
        for (const auto& s : sources) rep.device_elements.push_back(s.element_index);
    }

    const double w_ref = std::abs(modes.freqs[ref_mode_idx]);
    rep.p_in = constants::hbar * w_ref * coth_factor(w_ref, temperature) / 2.0;

    const MnaLayout& layout = sys.layout();
    const int bs = sys.block_size();

    for (int p = 1; p <= np; ++p) {
        const double z0 = circuit.port(p).z0;
        for (int n = 0; n < m; ++n) {
            if (sources.empty()) continue;
            Eigen::VectorXcd w = sys.adjoint_voltage_solution(p, n);
            const double w_out = std::abs(modes.freqs[n]);
            double p_dut = 0.0;
            for (std::size_t d = 0; d < sources.size(); ++d) {
                const auto& src = sources[d];
                int ia = layout.node_unknown(src.node_a);
                int ib = layout.node_unknown(src.node_b);
                double dev_power = 0.0;
                for (int k = 0; k < m; ++k) {
                    cplx z = 0.0;
                    if (ia >= 0) z += w[k * bs + ia];
                    if (ib >= 0) z -= w[k * bs + ib];
                    double z2 = std::norm(z);
                    if (z2 == 0.0) continue;
                    const double wk = std::abs(modes.freqs[k]);
                    dev_power += z2 * src.current_psd(wk, temperature) / z0;
                    // T=0 dilation weight for the commutation closure
                    double g = 4.0 * z2 * src.admittance(wk).real() * wk / (z0 * w_out);
                    if (modes.freqs[k] > 0.0) rep.g_pos(p - 1, n) += g;
                    else rep.g_neg(p - 1, n) += g;
                }
                p_dut += dev_power;
                if (store_device_contributions) {
                    rep.device_contributions((p - 1) * m + n, d) = dev_power;
                }
            }
            rep.p_dut(p - 1, n) = p_dut;
            rep.n_ratio(p - 1, n) =
                (p_dut / (constants::hbar * w_out)) / (rep.p_in / (constants::hbar * w_ref));
        }
    }
    return rep;
}

NoiseReport noise_ratio(const Circuit& circuit, const PumpSolution& pump,
                        const ModeSet& modes, double temperature) {
    LinearizedSystem sys(circuit, pump, modes);
    return noise_ratio(sys, temperature);
}

double qe_with_loss(const QuantumXMatrix& x, const NoiseReport& report, int p_out,
                    int n_idx, int q_in, int l_idx) {
    double denom = report.n_at(p_out, n_idx);
    for (int q = 1; q <= x.n_ports; ++q) {
        for (int k = 0; k < x.modes.m; ++k) denom += std::norm(x.at(p_out, n_idx, q, k));
    }
    if (denom <= 0.0) {
        throw ValidationError("qe_with_loss: isolated output mode (zero denominator)");
    }
    return std::norm(x.at(p_out, n_idx, q_in, l_idx)) / denom;
}

Eigen::MatrixXd lossy_commutation_residuals(const QuantumXMatrix& x,
                                            const NoiseReport& report) {
    Eigen::MatrixXd r = commutation_residuals(x);
    // each internal loss channel at mode k contributes sgn(w_k) times its
    // photon-flux conversion gain, summed here as g_pos - g_neg
    for (int p = 0; p < x.n_ports; ++p) {
        for (int j = 0; j < x.modes.m; ++j) {
            r(p, j) += report.g_pos(p, j) - report.g_neg(p, j);
        }
    }
    return r;
}

double max_lossy_commutation_residual(const QuantumXMatrix& x, const NoiseReport& report) {
    return lossy_commutation_residuals(x, report).cwiseAbs().maxCoeff();
}

double normalized_qe(const QuantumXMatrix& x, int p_out, int n_idx, int q_in, int l_idx,
                     const NoiseReport* report) {
    double qe = report ? qe_with_loss(x, *report, p_out, n_idx, q_in, l_idx)
                       : quantum_efficiency(x, p_out, n_idx, q_in, l_idx);
    double gain = std::norm(x.at(p_out, n_idx, q_in, l_idx));
    return qe / qe_ideal(gain);
}

}  // namespace qxsim
