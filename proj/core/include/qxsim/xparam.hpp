#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "qxsim/circuit.hpp"
#include "qxsim/hb.hpp"
#include "qxsim/mna.hpp"
#include "qxsim/modes.hpp"

namespace qxsim {

/// Double-sided X-parameter sensitivity matrix: entries(row, col) is the
/// scattered wave b at (out port p, mode j) per unit incident wave a at
/// (in port q, mode k), around a fixed pump operating point.
struct XMatrix {
    ModeSet modes;
    int n_ports = 0;
    Eigen::MatrixXcd entries;  // (n_ports*m) x (n_ports*m)
    double pump_drive = 0.0;   // operating-point reference

    int flat(int port, int mode_idx) const { return (port - 1) * modes.m + mode_idx; }
    cplx at(int p_out, int j_idx, int q_in, int k_idx) const {
        return entries(flat(p_out, j_idx), flat(q_in, k_idx));
    }
};

/// Coupled-mode small-signal system around a converged pump: block-diagonal
/// linear MNA assemblies at the (signed) mode frequencies plus junction
/// conversion blocks from the Fourier coefficients of Ic cos(phi_pump(t)).
/// One factorization serves the X-matrix right-hand sides and the adjoint
/// noise solves.
class LinearizedSystem {
public:
    /// `precomputed_cos` may pass pump.cos_coefficients(2*(m-1)) computed once
    /// for a whole frequency sweep; it is signal-frequency independent.
    LinearizedSystem(const Circuit& circuit, const PumpSolution& pump, const ModeSet& modes,
                     const Eigen::MatrixXcd* precomputed_cos = nullptr);

    const ModeSet& modes() const { return modes_; }
    const Circuit& circuit() const { return *circuit_; }
    const MnaLayout& layout() const { return layout_; }
    int block_size() const { return bs_; }

    XMatrix xmatrix() const;

    /// dV(port, mode n) / dI(current injected across element e at mode k), ohms.
    cplx transimpedance(std::size_t element_index, int mode_k_idx, int port,
                        int mode_n_idx) const;

    /// w = A^-T c with c selecting the (port, mode n) voltage; the
    /// transimpedance from any injection (a, b, k) is then w[a,k] - w[b,k].
    Eigen::VectorXcd adjoint_voltage_solution(int port, int mode_n_idx) const;

    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

private:
    const Circuit* circuit_;
    ModeSet modes_;
    MnaLayout layout_;
    int bs_ = 0;
    double pump_drive_ = 0.0;
    std::unique_ptr<FactorizedSystem> lu_;
};

/// Convenience wrapper: build, factorize, and extract the X matrix.
XMatrix linearized_xmatrix(const Circuit& circuit, const PumpSolution& pump,
                           const ModeSet& modes);

double signal_gain_db(const XMatrix& x);   // 10 log10 |X_{2,w0;1,w0}|^2
double idler_gain_db(const XMatrix& x);    // 10 log10 |X_{2,w-1;1,w0}|^2
double input_match_db(const XMatrix& x);   // 20 log10 |X_{1,w0;1,w0}|

std::string xmatrix_to_json(const XMatrix& x);
std::string xmatrix_to_csv(const XMatrix& x);

}  // namespace qxsim
