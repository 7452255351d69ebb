#include "qxsim/mna.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <ostream>

#include "qxsim/errors.hpp"

namespace qxsim {

cplx capacitor_admittance(double c, double tan_delta, double omega) {
    if (omega == 0.0) return {0.0, 0.0};
    // loss term tracks sgn(w) so Y(-w) = conj(Y(w)) and Re(Y) >= 0 everywhere
    double sgn = omega > 0.0 ? 1.0 : -1.0;
    return cplx(0.0, omega * c) / cplx(1.0, sgn * tan_delta);
}

MnaLayout::MnaLayout(const Circuit& circuit, const AssembleOptions& options)
    : circuit_(&circuit), options_(options), n_nodes_(circuit.node_count - 1) {
    int next = n_nodes_;
    branch_of_.assign(circuit.elements.size(), -1);
    for (std::size_t i = 0; i < circuit.elements.size(); ++i) {
        const auto& e = circuit.elements[i];
        if (e.is<Inductor>()) {
            branch_of_[i] = next++;
        } else if (e.is<JosephsonJunction>()) {
            if (options.jj == JjTreatment::LinearInductor) branch_of_[i] = next++;
        } else if (e.is<Source>()) {
            if (e.as<Source>().kind == SourceKind::Voltage) branch_of_[i] = next++;
        } else if (e.is<TouchstoneElement>()) {
            branch_of_[i] = next;
            next += static_cast<int>(e.nodes.size());
        }
    }
    unknown_count_ = next;
}

void MnaLayout::stamp(double omega, std::vector<Eigen::Triplet<cplx>>& out,
                      int row_off, int col_off) const {
    const double w = std::abs(omega);
    const bool conj = omega < 0.0;
    auto put = [&](int r, int c, cplx v) {
        if (r < 0 || c < 0 || v == cplx(0.0, 0.0)) return;
        out.emplace_back(row_off + r, col_off + c, conj ? std::conj(v) : v);
    };
    auto put_y = [&](NodeId a, NodeId b, cplx y) {
        int ia = node_unknown(a), ib = node_unknown(b);
        put(ia, ia, y);
        put(ib, ib, y);
        put(ia, ib, -y);
        put(ib, ia, -y);
    };
    auto put_branch = [&](NodeId a, NodeId b, int br, cplx series_z) {
        int ia = node_unknown(a), ib = node_unknown(b);
        put(ia, br, 1.0);
        put(ib, br, -1.0);
        put(br, ia, 1.0);
        put(br, ib, -1.0);
        put(br, br, -series_z);
    };

    const auto& elems = circuit_->elements;
    for (std::size_t i = 0; i < elems.size(); ++i) {
        const auto& e = elems[i];
        if (e.is<Capacitor>()) {
            const auto& cap = e.as<Capacitor>();
            put_y(e.nodes[0], e.nodes[1], capacitor_admittance(cap.c, cap.tan_delta, w));
        } else if (e.is<Resistor>()) {
            put_y(e.nodes[0], e.nodes[1], 1.0 / e.as<Resistor>().r);
        } else if (e.is<Inductor>()) {
            put_branch(e.nodes[0], e.nodes[1], branch_of_[i],
                       cplx(0.0, w * e.as<Inductor>().l));
        } else if (e.is<JosephsonJunction>()) {
            if (options_.jj == JjTreatment::LinearInductor) {
                put_branch(e.nodes[0], e.nodes[1], branch_of_[i],
                           cplx(0.0, w * josephson_inductance(e.as<JosephsonJunction>().ic)));
            }
        } else if (e.is<Source>()) {
            const auto& s = e.as<Source>();
            if (s.kind == SourceKind::Voltage) {
                put_branch(e.nodes[0], e.nodes[1], branch_of_[i], cplx(s.source_impedance, 0.0));
            } else if (s.source_impedance > 0.0) {
                put_y(e.nodes[0], e.nodes[1], 1.0 / s.source_impedance);
            }
        } else if (e.is<TouchstoneElement>()) {
            const auto& t = e.as<TouchstoneElement>();
            const int np = static_cast<int>(e.nodes.size());
            const double zr = t.data->z_ref();
            Eigen::MatrixXcd s = t.data->s_at(w);
            int br0 = branch_of_[i];
            for (int r = 0; r < np; ++r) {
                // wave row: (V_r - Zr I_r) - sum_j S_rj (V_j + Zr I_j) = 0
                for (int j = 0; j < np; ++j) {
                    cplx dv = (r == j ? 1.0 : 0.0) - s(r, j);
                    cplx di = -zr * ((r == j ? 1.0 : 0.0) + s(r, j));
                    put(br0 + r, node_unknown(e.nodes[j]), dv);
                    put(br0 + r, br0 + j, di);
                }
                put(node_unknown(e.nodes[r]), br0 + r, 1.0);  // KCL: I_r into the multiport
            }
        }
    }

    if (options_.include_port_terminations) {
        for (const auto& p : circuit_->ports) {
            put_y(p.positive, p.negative, 1.0 / p.z0);
        }
    }
}

void MnaLayout::add_current_injection(Eigen::VectorXcd& rhs, NodeId a, NodeId b, cplx i,
                                      int row_off) const {
    int ia = node_unknown(a), ib = node_unknown(b);
    if (ia >= 0) rhs[row_off + ia] += i;
    if (ib >= 0) rhs[row_off + ib] -= i;
}

void MnaLayout::add_port_wave_injection(Eigen::VectorXcd& rhs, const Port& p, cplx a,
                                        int row_off) const {
    add_current_injection(rhs, p.positive, p.negative, 2.0 * a / std::sqrt(p.z0), row_off);
}

cplx MnaLayout::voltage(const Eigen::VectorXcd& x, NodeId a, NodeId b, int row_off) const {
    cplx v = 0.0;
    int ia = node_unknown(a), ib = node_unknown(b);
    if (ia >= 0) v += x[row_off + ia];
    if (ib >= 0) v -= x[row_off + ib];
    return v;
}

AdmittanceSystem::AdmittanceSystem(const Circuit& c, double w, const AssembleOptions& opt)
    : omega(w), layout(c, opt) {
    std::vector<Eigen::Triplet<cplx>> trips;
    layout.stamp(w, trips);
    matrix.resize(layout.unknown_count(), layout.unknown_count());
    matrix.setFromTriplets(trips.begin(), trips.end());
}

AdmittanceSystem assemble_linear(const Circuit& circuit, double omega,
                                 const AssembleOptions& options) {
    circuit.validate();
    return AdmittanceSystem(circuit, omega, options);
}

FactorizedSystem::FactorizedSystem(const Eigen::SparseMatrix<cplx>& m) : matrix_(m) {
    matrix_.makeCompressed();
    lu_.compute(matrix_);
    ok_ = lu_.info() == Eigen::Success;
}

void FactorizedSystem::check(const Eigen::VectorXcd& x, const Eigen::VectorXcd& rhs) const {
    double bn = rhs.lpNorm<Eigen::Infinity>();
    if (bn == 0.0) return;
    double rn = (matrix_ * x - rhs).lpNorm<Eigen::Infinity>();
    if (!(rn <= 1e-7 * bn) || !x.allFinite()) {
        throw SingularSystemError(
            "linear system is singular or near-singular (relative residual " +
            std::to_string(rn / bn) + "); the circuit may sit at an ideal lossless "
            "resonance or a parametric-oscillation threshold");
    }
}

Eigen::VectorXcd FactorizedSystem::solve(const Eigen::VectorXcd& rhs) const {
    if (!ok_) throw SingularSystemError("sparse LU factorization failed (structurally or numerically singular system)");
    Eigen::VectorXcd x = lu_.solve(rhs);
    check(x, rhs);
    return x;
}

Eigen::MatrixXcd FactorizedSystem::solve(const Eigen::MatrixXcd& rhs) const {
    if (!ok_) throw SingularSystemError("sparse LU factorization failed (structurally or numerically singular system)");
    Eigen::MatrixXcd x(rhs.rows(), rhs.cols());
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
        Eigen::VectorXcd col = lu_.solve(rhs.col(c).eval());
        check(col, rhs.col(c));
        x.col(c) = col;
    }
    return x;
}

Eigen::VectorXcd FactorizedSystem::solve_transposed(const Eigen::VectorXcd& rhs) const {
    if (!ok_) throw SingularSystemError("sparse LU factorization failed (structurally or numerically singular system)");
    Eigen::VectorXcd x = lu_.transpose().solve(rhs);
    if (!x.allFinite()) throw SingularSystemError("transposed solve produced non-finite values");
    return x;
}

Eigen::MatrixXcd solve_linear_sparams(const Circuit& circuit, double omega) {
    if (circuit.ports.empty()) throw ValidationError("solve_linear_sparams needs at least one port");
    AssembleOptions opt;
    opt.jj = JjTreatment::LinearInductor;
    opt.include_port_terminations = true;
    AdmittanceSystem sys = assemble_linear(circuit, omega, opt);
    FactorizedSystem lu(sys.matrix);

    const int np = static_cast<int>(circuit.ports.size());
    Eigen::MatrixXcd s(np, np);
    for (int q = 0; q < np; ++q) {
        const Port& pq = circuit.port(q + 1);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(sys.layout.unknown_count());
        sys.layout.add_port_wave_injection(rhs, pq, 1.0);
        Eigen::VectorXcd x;
        try {
            x = lu.solve(rhs);
        } catch (const SingularSystemError& err) {
            throw SingularSystemError(std::string(err.what()) + "; " + describe_singularity(sys));
        }
        for (int p = 0; p < np; ++p) {
            const Port& pp = circuit.port(p + 1);
            cplx v = sys.layout.voltage(x, pp.positive, pp.negative);
            s(p, q) = v / std::sqrt(pp.z0) - (p == q ? 1.0 : 0.0);
        }
    }
    return s;
}

cplx NoiseSource::admittance(double omega) const {
    if (is_capacitor) return capacitor_admittance(c, tan_delta, std::abs(omega));
    return cplx(1.0 / r, 0.0);
}

double NoiseSource::current_psd(double omega, double temperature) const {
    const double w = std::abs(omega);
    if (w == 0.0) return 0.0;
    double re_y = admittance(w).real();
    double quantum = constants::hbar * w / 2.0;
    if (temperature > 0.0) {
        double x = constants::hbar * w / (2.0 * constants::boltzmann_k * temperature);
        quantum *= 1.0 / std::tanh(x);
    }
    return 4.0 * quantum * re_y;
}

std::vector<NoiseSource> enumerate_noise_sources(const Circuit& circuit) {
    std::vector<NoiseSource> out;
    for (std::size_t i = 0; i < circuit.elements.size(); ++i) {
        const auto& e = circuit.elements[i];
        NoiseSource ns;
        ns.element_index = i;
        if (e.is<Capacitor>()) {
            const auto& cap = e.as<Capacitor>();
            if (cap.tan_delta <= 0.0) continue;
            ns.is_capacitor = true;
            ns.c = cap.c;
            ns.tan_delta = cap.tan_delta;
        } else if (e.is<Resistor>()) {
            ns.r = e.as<Resistor>().r;
        } else if (e.is<Source>()) {
            const auto& s = e.as<Source>();
            if (s.source_impedance <= 0.0) continue;
            ns.r = s.source_impedance;
        } else {
            continue;
        }
        ns.node_a = e.nodes[0];
        ns.node_b = e.nodes[1];
        out.push_back(ns);
    }
    return out;
}

void dump_matrix_market(const Eigen::SparseMatrix<cplx>& m, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate complex general\n";
    os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(m, k); it; ++it) {
            os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' '
               << it.value().imag() << '\n';
        }
    }
}

std::string describe_singularity(const AdmittanceSystem& sys) {
    const int n = static_cast<int>(sys.matrix.rows());
    if (n > 800) return "system too large for null-space analysis";
    Eigen::MatrixXcd dense(sys.matrix);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense, Eigen::ComputeFullV);
    Eigen::VectorXcd v = svd.matrixV().col(n - 1);
    double vmax = v.cwiseAbs().maxCoeff();
    std::string nodes = "offending node set: {";
    bool first = true;
    for (int i = 0; i < sys.layout.node_count(); ++i) {
        if (std::abs(v[i]) >= 0.2 * vmax) {
            if (!first) nodes += ", ";
            nodes += sys.layout.circuit().node_label(i + 1);
            first = false;
        }
    }
    return nodes + "}";
}

}  // namespace qxsim
