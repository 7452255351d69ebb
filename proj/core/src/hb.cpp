#include "qxsim/hb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qxsim/errors.hpp"

namespace qxsim {

namespace {

using Triplet = Eigen::Triplet<cplx>;
constexpr double kPhi0 = constants::reduced_flux_quantum;

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Time-sampling / DFT helper on a common fundamental period.
struct FourierGrid {
    int n_t = 0;
    std::vector<cplx> w;  // w[n] = exp(+i 2 pi n / n_t)

    explicit FourierGrid(int samples) : n_t(samples), w(samples) {
        for (int n = 0; n < n_t; ++n) {
            double a = 2.0 * constants::pi * n / n_t;
            w[n] = {std::cos(a), std::sin(a)};
        }
    }

    cplx rot(long long h, int n) const {
        long long idx = (h * n) % n_t;
        if (idx < 0) idx += n_t;
        return w[static_cast<std::size_t>(idx)];
    }

    // x(t_n) from double-sided coefficients at the given signed harmonics
    void synthesize(const std::vector<int>& harmonics, const std::vector<cplx>& coef,
                    std::vector<double>& out) const {
        out.assign(n_t, 0.0);
        for (std::size_t i = 0; i < harmonics.size(); ++i) {
            int h = harmonics[i];
            cplx c = coef[i];
            for (int n = 0; n < n_t; ++n) out[n] += (c * rot(h, n)).real();
        }
    }

    cplx analyze(const std::vector<double>& samples, int h) const {
        cplx acc = 0.0;
        for (int n = 0; n < n_t; ++n) acc += samples[n] * std::conj(rot(h, n));
        return acc / static_cast<double>(n_t);
    }
};

std::vector<cplx> double_sided_from_peak(const std::vector<cplx>& peak,
                                         std::vector<int>& harmonics) {
    // peak[h], h = 0..N; returns coefficients at signed harmonics -N..N
    const int n = static_cast<int>(peak.size()) - 1;
    harmonics.clear();
    std::vector<cplx> coef;
    for (int h = -n; h <= n; ++h) {
        harmonics.push_back(h);
        if (h == 0) coef.push_back(cplx(peak[0].real(), 0.0));
        else if (h > 0) coef.push_back(0.5 * peak[h]);
        else coef.push_back(0.5 * std::conj(peak[-h]));
    }
    return coef;
}

struct Drive {
    int harmonic = 0;            // signed
    bool is_branch = false;      // voltage source drive on a branch row
    NodeId a = 0, b = 0;         // current injection nodes
    int branch_row = -1;
    cplx coeff;                  // double-sided amplitude (peak/2 at +h)
};

/// One harmonic-balance problem instance: fixed skeleton + per-iterate
/// junction nonlinearity.
class HbProblem {
public:
    HbProblem(const Circuit& circuit, const PumpSpec& spec, const HbOptions& opt)
        : circuit_(circuit),
          spec_(spec),
          opt_(opt),
          layout_(circuit, AssembleOptions{JjTreatment::Open, true}),
          grid_(next_pow2(std::max(64, 8 * spec.n_harmonics + 8))) {
        n_mna_ = layout_.unknown_count();
        collect_junctions();
        collect_drives();
        choose_harmonics();
        nb_ = n_mna_ + n_j_;
        n_total_ = nb_ * static_cast<int>(harmonics_.size());
        build_row_scales();
        build_skeleton();
        build_rhs();
    }

    const std::vector<int>& harmonics() const { return harmonics_; }
    int block_count() const { return static_cast<int>(harmonics_.size()); }
    int total_unknowns() const { return n_total_; }
    int n_junctions() const { return n_j_; }

    // ---- residual / Jacobian ----------------------------------------------

    struct JunctionEval {
        // sin-current double-sided coefficients at the block harmonics
        Eigen::MatrixXcd i_coef;   // n_j x blocks
        // cos coefficients 0..2*N_h (negative = conjugate)
        Eigen::MatrixXcd c_coef;   // n_j x (2*N_h+1)
    };

    void eval_junctions(const Eigen::VectorXcd& x, bool with_cos, JunctionEval& je) const {
        const int B = block_count();
        je.i_coef.resize(n_j_, B);
        if (with_cos) je.c_coef.resize(n_j_, 2 * spec_.n_harmonics + 1);
        std::vector<double> phi(grid_.n_t), sin_s(grid_.n_t), cos_s(grid_.n_t);
        for (int j = 0; j < n_j_; ++j) {
            // phase samples from this junction's phasors
            for (int n = 0; n < grid_.n_t; ++n) phi[n] = 0.0;
            for (int bi = 0; bi < B; ++bi) {
                cplx c = x[col_phi(bi, j)];
                int h = harmonics_[bi];
                for (int n = 0; n < grid_.n_t; ++n) phi[n] += (c * grid_.rot(h, n)).real();
            }
            for (int n = 0; n < grid_.n_t; ++n) {
                sin_s[n] = ic_[j] * std::sin(phi[n]);
                if (with_cos) cos_s[n] = ic_[j] * std::cos(phi[n]);
            }
            for (int bi = 0; bi < B; ++bi) je.i_coef(j, bi) = grid_.analyze(sin_s, harmonics_[bi]);
            if (with_cos) {
                for (int d = 0; d <= 2 * spec_.n_harmonics; ++d) {
                    je.c_coef(j, d) = grid_.analyze(cos_s, d);
                }
            }
        }
    }

    Eigen::VectorXcd residual(const Eigen::VectorXcd& x, double gamma,
                              const JunctionEval& je) const {
        Eigen::VectorXcd f = skeleton_ * x - gamma * rhs_;
        const int B = block_count();
        for (int j = 0; j < n_j_; ++j) {
            for (int bi = 0; bi < B; ++bi) {
                cplx i = je.i_coef(j, bi);
                int ra = jj_row_a_[j], rb = jj_row_b_[j];
                if (ra >= 0) f[bi * nb_ + ra] += i * kcl_scale_;
                if (rb >= 0) f[bi * nb_ + rb] -= i * kcl_scale_;
            }
        }
        return f;
    }

    double norm(const Eigen::VectorXcd& f) const { return f.lpNorm<Eigen::Infinity>(); }

    Eigen::SparseMatrix<cplx> jacobian(const JunctionEval& je) const {
        std::vector<Triplet> trips = skeleton_trips_;
        const int B = block_count();
        trips.reserve(trips.size() + static_cast<std::size_t>(n_j_) * B * B * 2);
        for (int j = 0; j < n_j_; ++j) {
            int ra = jj_row_a_[j], rb = jj_row_b_[j];
            for (int bi = 0; bi < B; ++bi) {
                for (int bj = 0; bj < B; ++bj) {
                    int d = harmonics_[bi] - harmonics_[bj];
                    cplx c = cos_coef(je, j, d) * kcl_scale_;
                    if (ra >= 0) trips.emplace_back(bi * nb_ + ra, col_phi(bj, j), c);
                    if (rb >= 0) trips.emplace_back(bi * nb_ + rb, col_phi(bj, j), -c);
                }
            }
        }
        Eigen::SparseMatrix<cplx> m(n_total_, n_total_);
        m.setFromTriplets(trips.begin(), trips.end());
        return m;
    }

    void enforce_conjugacy(Eigen::VectorXcd& x) const {
        const int B = block_count();
        for (int bi = 0; bi < B; ++bi) {
            int h = harmonics_[bi];
            if (h <= 0) continue;
            auto it = std::find(harmonics_.begin(), harmonics_.end(), -h);
            if (it == harmonics_.end()) continue;
            int bj = static_cast<int>(std::distance(harmonics_.begin(), it));
            for (int u = 0; u < nb_; ++u) {
                cplx v = 0.5 * (x[bi * nb_ + u] + std::conj(x[bj * nb_ + u]));
                x[bi * nb_ + u] = v;
                x[bj * nb_ + u] = std::conj(v);
            }
        }
    }

    /// Residual of the even-harmonic blocks that were omitted under the
    /// half-wave-symmetry restriction (their linear parts vanish with zero
    /// phasors; only junction currents could leak in).
    double omitted_harmonic_residual(const Eigen::VectorXcd& x) const {
        if (!restricted_) return 0.0;
        const int B = block_count();
        std::vector<double> phi(grid_.n_t), sin_s(grid_.n_t);
        double worst = 0.0;
        for (int j = 0; j < n_j_; ++j) {
            for (int n = 0; n < grid_.n_t; ++n) phi[n] = 0.0;
            for (int bi = 0; bi < B; ++bi) {
                cplx c = x[col_phi(bi, j)];
                for (int n = 0; n < grid_.n_t; ++n) phi[n] += (c * grid_.rot(harmonics_[bi], n)).real();
            }
            for (int n = 0; n < grid_.n_t; ++n) sin_s[n] = ic_[j] * std::sin(phi[n]);
            for (int h = 2; h <= spec_.n_harmonics; h += 2) {
                worst = std::max(worst, std::abs(grid_.analyze(sin_s, h)) * kcl_scale_);
            }
        }
        return worst;
    }

    // ---- solution export ---------------------------------------------------

    PumpSolution make_solution(const Eigen::VectorXcd& x) const {
        PumpSolution s;
        s.omega_p = spec_.omega_p;
        s.n_harmonics = spec_.n_harmonics;
        s.drive_current = spec_.current;
        s.node_phasors = Eigen::MatrixXcd::Zero(n_mna_, spec_.n_harmonics + 1);
        s.junction_phases = Eigen::MatrixXcd::Zero(n_j_, spec_.n_harmonics + 1);
        s.junction_elements = jj_elems_;
        s.junction_ic = ic_;
        const int B = block_count();
        for (int bi = 0; bi < B; ++bi) {
            int h = harmonics_[bi];
            if (h <= 0) continue;  // negative blocks are conjugates
            for (int u = 0; u < n_mna_; ++u) s.node_phasors(u, h) = 2.0 * x[bi * nb_ + u];
            for (int j = 0; j < n_j_; ++j) s.junction_phases(j, h) = 2.0 * x[col_phi(bi, j)];
        }
        // operating-point diagnostics
        std::vector<double> phi(grid_.n_t);
        double max_amp = 0.0, max_fund = 0.0;
        for (int j = 0; j < n_j_; ++j) {
            for (int n = 0; n < grid_.n_t; ++n) phi[n] = 0.0;
            for (int bi = 0; bi < B; ++bi) {
                cplx c = x[col_phi(bi, j)];
                for (int n = 0; n < grid_.n_t; ++n) phi[n] += (c * grid_.rot(harmonics_[bi], n)).real();
            }
            for (int n = 0; n < grid_.n_t; ++n) max_amp = std::max(max_amp, std::abs(phi[n]));
            max_fund = std::max(max_fund, std::abs(s.junction_phases(j, 1)));
        }
        s.max_phase_amplitude = max_amp;
        s.overdriven = max_fund >= constants::pi / 2.0;
        return s;
    }

    double drive_scale() const { return i_scale_; }

private:
    int col_phi(int block, int j) const { return block * nb_ + n_mna_ + j; }

    cplx cos_coef(const JunctionEval& je, int j, int d) const {
        int a = std::abs(d);
        if (a > 2 * spec_.n_harmonics) return 0.0;
        cplx c = je.c_coef(j, a);
        return d < 0 ? std::conj(c) : c;
    }

    void collect_junctions() {
        for (std::size_t i = 0; i < circuit_.elements.size(); ++i) {
            const auto& e = circuit_.elements[i];
            if (!e.is<JosephsonJunction>()) continue;
            jj_elems_.push_back(i);
            ic_.push_back(e.as<JosephsonJunction>().ic);
            jj_row_a_.push_back(layout_.node_unknown(e.nodes[0]));
            jj_row_b_.push_back(layout_.node_unknown(e.nodes[1]));
        }
        n_j_ = static_cast<int>(jj_elems_.size());
    }

    void collect_drives() {
        if (spec_.current != 0.0) {
            const Port& p = circuit_.port(spec_.source_port);
            Drive d;
            d.harmonic = 1;
            d.a = p.positive;
            d.b = p.negative;
            d.coeff = 0.5 * std::polar(spec_.current, spec_.phase);
            drives_.push_back(d);
        }
        // netlist sources participate when they sit on a pump harmonic
        for (std::size_t i = 0; i < circuit_.elements.size(); ++i) {
            const auto& e = circuit_.elements[i];
            if (!e.is<Source>()) continue;
            const auto& s = e.as<Source>();
            if (s.amplitude == 0.0 || s.omega <= 0.0) continue;
            double ratio = s.omega / spec_.omega_p;
            int h = static_cast<int>(std::lround(ratio));
            if (h < 1 || h > spec_.n_harmonics) continue;
            if (std::abs(ratio - h) > 1e-9) continue;
            Drive d;
            d.harmonic = h;
            d.coeff = 0.5 * std::polar(s.amplitude, s.phase);
            if (s.kind == SourceKind::Voltage) {
                d.is_branch = true;
                d.branch_row = layout_.branch_unknown(i);
            } else {
                d.a = e.nodes[0];
                d.b = e.nodes[1];
            }
            drives_.push_back(d);
        }
    }

    void choose_harmonics() {
        bool all_odd = true;
        for (const auto& d : drives_) all_odd = all_odd && (d.harmonic % 2 != 0);
        restricted_ = opt_.exploit_half_wave_symmetry && all_odd;
        for (int h = 1; h <= spec_.n_harmonics; ++h) {
            if (restricted_ && h % 2 == 0) continue;
            harmonics_.push_back(h);
            harmonics_.push_back(-h);
        }
        std::sort(harmonics_.begin(), harmonics_.end());
    }

    void build_row_scales() {
        double drive_amp = 1e-12;
        for (const auto& d : drives_) drive_amp = std::max(drive_amp, std::abs(d.coeff) * 2.0);
        i_scale_ = drive_amp;
        kcl_scale_ = 1.0 / i_scale_;
        branch_scale_ = 1.0 / (i_scale_ * 50.0);
    }

    double local_row_scale(int r) const {
        if (r < layout_.node_count()) return kcl_scale_;
        if (r < n_mna_) return branch_scale_;
        return 1.0;  // phase rows are already in radians
    }

    void build_skeleton() {
        const int B = block_count();
        for (int bi = 0; bi < B; ++bi) {
            const double w = harmonics_[bi] * spec_.omega_p;
            std::vector<Triplet> block;
            layout_.stamp(w, block, 0, 0);
            for (const auto& t : block) {
                skeleton_trips_.emplace_back(bi * nb_ + t.row(), bi * nb_ + t.col(),
                                             t.value() * local_row_scale(t.row()));
            }
            // phase link rows: phi - (Va - Vb)/(i w phi0) = 0
            const cplx inv_jwphi0 = 1.0 / (cplx(0.0, w) * kPhi0);
            for (int j = 0; j < n_j_; ++j) {
                int row = bi * nb_ + n_mna_ + j;
                skeleton_trips_.emplace_back(row, col_phi(bi, j), 1.0);
                if (jj_row_a_[j] >= 0) skeleton_trips_.emplace_back(row, bi * nb_ + jj_row_a_[j], -inv_jwphi0);
                if (jj_row_b_[j] >= 0) skeleton_trips_.emplace_back(row, bi * nb_ + jj_row_b_[j], inv_jwphi0);
            }
        }
        skeleton_.resize(n_total_, n_total_);
        skeleton_.setFromTriplets(skeleton_trips_.begin(), skeleton_trips_.end());
    }

    void build_rhs() {
        rhs_ = Eigen::VectorXcd::Zero(n_total_);
        const int B = block_count();
        for (const auto& d : drives_) {
            for (int bi = 0; bi < B; ++bi) {
                int h = harmonics_[bi];
                if (h != d.harmonic && h != -d.harmonic) continue;
                cplx c = h > 0 ? d.coeff : std::conj(d.coeff);
                if (d.is_branch) {
                    rhs_[bi * nb_ + d.branch_row] += c * branch_scale_;
                } else {
                    int ia = layout_.node_unknown(d.a), ib = layout_.node_unknown(d.b);
                    if (ia >= 0) rhs_[bi * nb_ + ia] += c * kcl_scale_;
                    if (ib >= 0) rhs_[bi * nb_ + ib] -= c * kcl_scale_;
                }
            }
        }
    }

    const Circuit& circuit_;
    PumpSpec spec_;
    HbOptions opt_;
    MnaLayout layout_;
    FourierGrid grid_;

    int n_mna_ = 0, n_j_ = 0, nb_ = 0, n_total_ = 0;
    std::vector<std::size_t> jj_elems_;
    std::vector<double> ic_;
    std::vector<int> jj_row_a_, jj_row_b_;
    std::vector<int> harmonics_;  // signed, sorted
    bool restricted_ = false;
    std::vector<Drive> drives_;
    double i_scale_ = 1.0, kcl_scale_ = 1.0, branch_scale_ = 1.0;

    std::vector<Triplet> skeleton_trips_;
    Eigen::SparseMatrix<cplx> skeleton_;
    Eigen::VectorXcd rhs_;
};

/// Newton with step-halving line search at fixed drive fraction gamma.
/// Returns true on convergence; x holds the best iterate either way.
bool newton_leg(const HbProblem& prob, double gamma, double tol, int max_iter,
                Eigen::VectorXcd& x, std::vector<double>& history, int& used_iters) {
    HbProblem::JunctionEval je;
    prob.eval_junctions(x, true, je);
    Eigen::VectorXcd f = prob.residual(x, gamma, je);
    double res = prob.norm(f);
    history.push_back(res);
    if (res < tol) return true;

    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    bool analyzed = false;

    for (int it = 0; it < max_iter; ++it) {
        ++used_iters;
        Eigen::SparseMatrix<cplx> jac = prob.jacobian(je);
        if (!analyzed) {
            lu.analyzePattern(jac);
            analyzed = true;
        }
        lu.factorize(jac);
        if (lu.info() != Eigen::Success) return false;
        Eigen::VectorXcd dx = lu.solve(-f);
        if (!dx.allFinite()) return false;

        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 7; ++half, lambda *= 0.5) {
            Eigen::VectorXcd xt = x + lambda * dx;
            prob.enforce_conjugacy(xt);
            HbProblem::JunctionEval jt;
            prob.eval_junctions(xt, false, jt);
            Eigen::VectorXcd ft = prob.residual(xt, gamma, jt);
            double rt = prob.norm(ft);
            if (rt < res || rt < tol) {
                x = std::move(xt);
                res = rt;
                accepted = true;
                break;
            }
        }
        history.push_back(res);
        if (!accepted) return false;
        if (res < tol) return true;
        prob.eval_junctions(x, true, je);
        f = prob.residual(x, gamma, je);
    }
    return false;
}

}  // namespace

std::vector<cplx> jj_current_spectrum(const std::vector<cplx>& phase_phasors, double ic) {
    const int n = static_cast<int>(phase_phasors.size()) - 1;
    if (n < 0) throw ValidationError("jj_current_spectrum: empty phasor list");
    FourierGrid grid(next_pow2(std::max(64, 8 * n + 8)));
    std::vector<int> harmonics;
    auto coef = double_sided_from_peak(phase_phasors, harmonics);
    std::vector<double> phi;
    grid.synthesize(harmonics, coef, phi);
    std::vector<double> cur(grid.n_t);
    for (int i = 0; i < grid.n_t; ++i) cur[i] = ic * std::sin(phi[i]);
    std::vector<cplx> out(n + 1);
    out[0] = grid.analyze(cur, 0);
    for (int h = 1; h <= n; ++h) out[h] = 2.0 * grid.analyze(cur, h);
    return out;
}

std::vector<cplx> jj_cos_spectrum(const std::vector<cplx>& phase_phasors, double ic,
                                  int max_index) {
    const int n = static_cast<int>(phase_phasors.size()) - 1;
    if (n < 0) throw ValidationError("jj_cos_spectrum: empty phasor list");
    FourierGrid grid(next_pow2(std::max(64, 4 * (n + max_index) + 8)));
    std::vector<int> harmonics;
    auto coef = double_sided_from_peak(phase_phasors, harmonics);
    std::vector<double> phi;
    grid.synthesize(harmonics, coef, phi);
    std::vector<double> c(grid.n_t);
    for (int i = 0; i < grid.n_t; ++i) c[i] = ic * std::cos(phi[i]);
    std::vector<cplx> out(max_index + 1);
    for (int d = 0; d <= max_index; ++d) out[d] = grid.analyze(c, d);
    return out;
}

Eigen::MatrixXcd PumpSolution::cos_coefficients(int max_index) const {
    const int n_j = static_cast<int>(junction_phases.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_j, max_index + 1);
    const int keep = std::min(max_index, 2 * n_harmonics);
    for (int j = 0; j < n_j; ++j) {
        std::vector<cplx> peak(n_harmonics + 1);
        for (int h = 0; h <= n_harmonics; ++h) peak[h] = junction_phases(j, h);
        auto c = jj_cos_spectrum(peak, junction_ic[j], keep);
        for (int d = 0; d <= keep; ++d) out(j, d) = c[d];
    }
    return out;
}

PumpSolution solve_pump(const Circuit& circuit, const PumpSpec& spec,
                        const HbOptions& options) {
    circuit.validate();
    if (!(spec.omega_p > 0.0)) throw ValidationError("pump omega_p must be > 0");
    if (spec.n_harmonics < 3) throw ValidationError("pump n_harmonics must be >= 3");
    if (spec.current < 0.0) throw ValidationError("pump current must be >= 0");

    HbProblem prob(circuit, spec, options);
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(prob.total_unknowns());
    std::vector<double> history;
    int iters = 0;

    bool ok = !options.force_continuation &&
              newton_leg(prob, 1.0, options.tol, options.max_iterations, x, history, iters);

    if (!ok && options.continuation && spec.current != 0.0) {
        x.setZero();
        history.clear();
        double gamma = 0.0, step = 0.25;
        Eigen::VectorXcd x_good = x;
        int legs = 0;
        while (gamma < 1.0 && legs < options.max_continuation_legs && step > 1.0 / 1024.0) {
            ++legs;
            double target = std::min(1.0, gamma + step);
            Eigen::VectorXcd xt = x_good;
            std::vector<double> leg_hist;
            if (newton_leg(prob, target, options.tol, options.max_iterations, xt, leg_hist, iters)) {
                gamma = target;
                x_good = std::move(xt);
                step *= 1.6;
            } else {
                step *= 0.5;
            }
            history.insert(history.end(), leg_hist.begin(), leg_hist.end());
        }
        ok = gamma >= 1.0;
        x = std::move(x_good);
    }

    if (ok && !history.empty() && history.back() >= options.tol) {
        // converged legs always end below tol; guard against stale history
        ok = history.back() < options.tol;
    }

    double omitted = prob.omitted_harmonic_residual(x);
    if (ok && omitted > 10.0 * options.tol) {
        // half-wave symmetry assumption violated; redo with the full set
        HbOptions full = options;
        full.exploit_half_wave_symmetry = false;
        return solve_pump(circuit, spec, full);
    }

    PumpSolution sol = prob.make_solution(x);
    sol.converged = ok;
    sol.iterations = iters;
    sol.residual_history = std::move(history);
    if (sol.residual_history.empty()) sol.residual_history.push_back(0.0);
    return sol;
}

PowerBalance harmonic_power_balance(const Circuit& circuit, const PumpSpec& spec,
                                    const PumpSolution& sol) {
    MnaLayout layout(circuit, AssembleOptions{JjTreatment::Open, true});
    const int nh = sol.n_harmonics;
    PowerBalance pb;

    auto vdiff = [&](NodeId a, NodeId b, int h) -> cplx {
        cplx v = 0.0;
        if (a != 0) v += sol.node_phasors(layout.node_unknown(a), h);
        if (b != 0) v -= sol.node_phasors(layout.node_unknown(b), h);
        return v;
    };

    // pump drive
    if (spec.current != 0.0) {
        const Port& p = circuit.port(spec.source_port);
        cplx in = std::polar(spec.current, spec.phase);
        pb.delivered += 0.5 * (vdiff(p.positive, p.negative, 1) * std::conj(in)).real();
    }

    for (std::size_t i = 0; i < circuit.elements.size(); ++i) {
        const auto& e = circuit.elements[i];
        for (int h = 1; h <= nh; ++h) {
            const double w = h * sol.omega_p;
            if (e.is<Capacitor>()) {
                const auto& c = e.as<Capacitor>();
                double g = capacitor_admittance(c.c, c.tan_delta, w).real();
                if (g > 0.0) pb.dissipated += 0.5 * std::norm(vdiff(e.nodes[0], e.nodes[1], h)) * g;
            } else if (e.is<Resistor>()) {
                pb.dissipated +=
                    0.5 * std::norm(vdiff(e.nodes[0], e.nodes[1], h)) / e.as<Resistor>().r;
            } else if (e.is<TouchstoneElement>()) {
                int br = layout.branch_unknown(i);
                cplx p_abs = 0.0;
                for (std::size_t t = 0; t < e.nodes.size(); ++t) {
                    cplx v = vdiff(e.nodes[t], 0, h);
                    cplx cur = sol.node_phasors(br + static_cast<int>(t), h);
                    p_abs += 0.5 * v * std::conj(cur);
                }
                pb.dissipated += p_abs.real();
            } else if (e.is<Source>()) {
                const auto& s = e.as<Source>();
                if (s.kind == SourceKind::Current && s.source_impedance > 0.0) {
                    pb.dissipated += 0.5 * std::norm(vdiff(e.nodes[0], e.nodes[1], h)) /
                                     s.source_impedance;
                } else if (s.kind == SourceKind::Voltage) {
                    int br = layout.branch_unknown(i);
                    cplx cur = sol.node_phasors(br, h);
                    if (s.source_impedance > 0.0) {
                        pb.dissipated += 0.5 * std::norm(cur) * s.source_impedance;
                    }
                    double ratio = s.omega / sol.omega_p;
                    int hs = static_cast<int>(std::lround(ratio));
                    if (hs == h && std::abs(ratio - h) <= 1e-9) {
                        cplx emf = std::polar(s.amplitude, s.phase);
                        pb.delivered += -0.5 * (emf * std::conj(cur)).real();
                    }
                }
                if (s.kind == SourceKind::Current && s.amplitude != 0.0) {
                    double ratio = s.omega / sol.omega_p;
                    int hs = static_cast<int>(std::lround(ratio));
                    if (hs == h && std::abs(ratio - h) <= 1e-9) {
                        cplx in = std::polar(s.amplitude, s.phase);
                        pb.delivered +=
                            0.5 * (vdiff(e.nodes[0], e.nodes[1], h) * std::conj(in)).real();
                    }
                }
            }
        }
    }

    for (const auto& p : circuit.ports) {
        for (int h = 1; h <= nh; ++h) {
            pb.dissipated += 0.5 * std::norm(vdiff(p.positive, p.negative, h)) / p.z0;
        }
    }
    return pb;
}

std::string pump_solution_to_json(const Circuit& circuit, const PumpSolution& sol) {
    nlohmann::json j;
    j["omega_p"] = sol.omega_p;
    j["pump_frequency_GHz"] = sol.omega_p / (2.0 * constants::pi) * 1e-9;
    j["n_harmonics"] = sol.n_harmonics;
    j["converged"] = sol.converged;
    j["overdriven"] = sol.overdriven;
    j["iterations"] = sol.iterations;
    j["residual"] = sol.residual_history.back();
    j["max_phase_amplitude_rad"] = sol.max_phase_amplitude;

    MnaLayout layout(circuit, AssembleOptions{JjTreatment::Open, true});
    nlohmann::json nodes = nlohmann::json::array();
    for (int n = 1; n < circuit.node_count; ++n) {
        nlohmann::json entry;
        entry["node"] = circuit.node_label(n);
        nlohmann::json ph = nlohmann::json::array();
        for (int h = 0; h <= sol.n_harmonics; ++h) {
            cplx v = sol.node_phasors(layout.node_unknown(n), h);
            ph.push_back({v.real(), v.imag()});
        }
        entry["voltage_phasors"] = ph;
        nodes.push_back(entry);
    }
    j["nodes"] = nodes;
    return j.dump(2);
}

}  // namespace qxsim
