#include "qxsim/xparam.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qxsim/errors.hpp"

namespace qxsim {

namespace {
constexpr double kPhi0 = constants::reduced_flux_quantum;
}

LinearizedSystem::LinearizedSystem(const Circuit& circuit, const PumpSolution& pump,
                                   const ModeSet& modes,
                                   const Eigen::MatrixXcd* precomputed_cos)
    : circuit_(&circuit),
      modes_(modes),
      layout_(circuit, AssembleOptions{JjTreatment::Open, true}),
      pump_drive_(pump.drive_current) {
    bs_ = layout_.unknown_count();
    const int m = modes_.m;

    std::vector<Eigen::Triplet<cplx>> trips;
    for (int k = 0; k < m; ++k) {
        layout_.stamp(modes_.freqs[k], trips, k * bs_, k * bs_);
    }

    // junction conversion blocks: coupling from mode k to mode n through the
    // 2(n-k)-th cosine coefficient, with d(phi)/dV = 1/(i w_k phi0)
    const Eigen::MatrixXcd cc = precomputed_cos
                                    ? *precomputed_cos
                                    : pump.cos_coefficients(2 * std::max(1, m - 1));
    for (std::size_t row = 0; row < pump.junction_elements.size(); ++row) {
        const auto& e = circuit.elements[pump.junction_elements[row]];
        const int ia = layout_.node_unknown(e.nodes[0]);
        const int ib = layout_.node_unknown(e.nodes[1]);
        for (int n = 0; n < m; ++n) {
            for (int k = 0; k < m; ++k) {
                int d = 2 * (n - k);
                cplx c = std::abs(d) < cc.cols() ? cc(row, std::abs(d)) : cplx(0.0);
                if (d < 0) c = std::conj(c);
                if (c == cplx(0.0)) continue;
                const cplx g = c / (cplx(0.0, modes_.freqs[k]) * kPhi0);
                if (ia >= 0) trips.emplace_back(n * bs_ + ia, k * bs_ + ia, g);
                if (ia >= 0 && ib >= 0) {
                    trips.emplace_back(n * bs_ + ia, k * bs_ + ib, -g);
                    trips.emplace_back(n * bs_ + ib, k * bs_ + ia, -g);
                }
                if (ib >= 0) trips.emplace_back(n * bs_ + ib, k * bs_ + ib, g);
            }
        }
    }

    Eigen::SparseMatrix<cplx> a(m * bs_, m * bs_);
    a.setFromTriplets(trips.begin(), trips.end());
    lu_ = std::make_unique<FactorizedSystem>(a);
    if (!lu_->factorization_ok()) {
        throw SingularSystemError(
            "linearized mode system is singular: the operating point sits at a "
            "parametric-oscillation threshold");
    }
}

Eigen::VectorXcd LinearizedSystem::solve(const Eigen::VectorXcd& rhs) const {
    try {
        return lu_->solve(rhs);
    } catch (const SingularSystemError&) {
        throw SingularSystemError(
            "linearized mode system is singular or near-singular: the operating point "
            "sits at a parametric-oscillation threshold");
    }
}

XMatrix LinearizedSystem::xmatrix() const {
    const int m = modes_.m;
    const int np = static_cast<int>(circuit_->ports.size());
    XMatrix x;
    x.modes = modes_;
    x.n_ports = np;
    x.pump_drive = pump_drive_;
    x.entries.resize(np * m, np * m);

    for (int q = 1; q <= np; ++q) {
        const Port& pq = circuit_->port(q);
        for (int k = 0; k < m; ++k) {
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m * bs_);
            layout_.add_port_wave_injection(rhs, pq, 1.0, k * bs_);
            Eigen::VectorXcd sol = solve(rhs);
            for (int p = 1; p <= np; ++p) {
                const Port& pp = circuit_->port(p);
                for (int j = 0; j < m; ++j) {
                    cplx v = layout_.voltage(sol, pp.positive, pp.negative, j * bs_);
                    cplx b = v / std::sqrt(pp.z0);
                    if (p == q && j == k) b -= 1.0;
                    x.entries(x.flat(p, j), x.flat(q, k)) = b;
                }
            }
        }
    }
    return x;
}

Eigen::VectorXcd LinearizedSystem::adjoint_voltage_solution(int port, int mode_n_idx) const {
    const Port& p = circuit_->port(port);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(modes_.m * bs_);
    int ia = layout_.node_unknown(p.positive);
    int ib = layout_.node_unknown(p.negative);
    if (ia >= 0) c[mode_n_idx * bs_ + ia] += 1.0;
    if (ib >= 0) c[mode_n_idx * bs_ + ib] -= 1.0;
    return lu_->solve_transposed(c);
}

cplx LinearizedSystem::transimpedance(std::size_t element_index, int mode_k_idx, int port,
                                      int mode_n_idx) const {
    const auto& e = circuit_->elements.at(element_index);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(modes_.m * bs_);
    layout_.add_current_injection(rhs, e.nodes[0], e.nodes[1], 1.0, mode_k_idx * bs_);
    Eigen::VectorXcd sol = solve(rhs);
    const Port& p = circuit_->port(port);
    return layout_.voltage(sol, p.positive, p.negative, mode_n_idx * bs_);
}

XMatrix linearized_xmatrix(const Circuit& circuit, const PumpSolution& pump,
                           const ModeSet& modes) {
    return LinearizedSystem(circuit, pump, modes).xmatrix();
}

double signal_gain_db(const XMatrix& x) {
    int s = x.modes.signal_index();
    return 10.0 * std::log10(std::norm(x.at(2, s, 1, s)));
}

double idler_gain_db(const XMatrix& x) {
    int s = x.modes.signal_index();
    int i = x.modes.index_of_k(-1);
    return 10.0 * std::log10(std::norm(x.at(2, i, 1, s)));
}

double input_match_db(const XMatrix& x) {
    int s = x.modes.signal_index();
    return 20.0 * std::log10(std::abs(x.at(1, s, 1, s)));
}

std::string xmatrix_to_json(const XMatrix& x) {
    nlohmann::json j;
    j["m"] = x.modes.m;
    j["n_ports"] = x.n_ports;
    j["omega_s"] = x.modes.omega_s;
    j["omega_p"] = x.modes.omega_p;
    j["mode_frequencies_Hz"] = [&] {
        std::vector<double> f;
        for (double w : x.modes.freqs) f.push_back(w / (2.0 * constants::pi));
        return f;
    }();
    nlohmann::json entries = nlohmann::json::array();
    for (int p = 1; p <= x.n_ports; ++p) {
        for (int j_idx = 0; j_idx < x.modes.m; ++j_idx) {
            for (int q = 1; q <= x.n_ports; ++q) {
                for (int k = 0; k < x.modes.m; ++k) {
                    cplx v = x.at(p, j_idx, q, k);
                    entries.push_back({{"out_port", p},
                                       {"out_mode", x.modes.k_of_index(j_idx)},
                                       {"in_port", q},
                                       {"in_mode", x.modes.k_of_index(k)},
                                       {"re", v.real()},
                                       {"im", v.imag()}});
                }
            }
        }
    }
    j["entries"] = entries;
    return j.dump(2);
}

std::string xmatrix_to_csv(const XMatrix& x) {
    std::ostringstream os;
    os << "out_port,out_mode,out_freq_Hz,in_port,in_mode,in_freq_Hz,re,im\n";
    char buf[160];
    for (int p = 1; p <= x.n_ports; ++p) {
        for (int j_idx = 0; j_idx < x.modes.m; ++j_idx) {
            for (int q = 1; q <= x.n_ports; ++q) {
                for (int k = 0; k < x.modes.m; ++k) {
                    cplx v = x.at(p, j_idx, q, k);
                    std::snprintf(buf, sizeof(buf), "%d,%d,%.12g,%d,%d,%.12g,%.12g,%.12g\n",
                                  p, x.modes.k_of_index(j_idx),
                                  x.modes.freqs[j_idx] / (2.0 * constants::pi), q,
                                  x.modes.k_of_index(k),
                                  x.modes.freqs[k] / (2.0 * constants::pi), v.real(),
                                  v.imag());
                    os << buf;
                }
            }
        }
    }
    return os.str();
}

}  // namespace qxsim
