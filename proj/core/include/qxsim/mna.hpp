#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <vector>

#include "qxsim/circuit.hpp"

namespace qxsim {

enum class JjTreatment {
    Open,            // omit junctions (their stamps come from a linearization)
    LinearInductor,  // L_J = Phi0 / (2 pi Ic), branch-current stamp
};

struct AssembleOptions {
    JjTreatment jj = JjTreatment::LinearInductor;
    bool include_port_terminations = false;
};

/// Unknown numbering for one circuit: node voltages first (ground dropped),
/// then branch currents for inductors, voltage sources, linearized junctions,
/// and Touchstone port currents. The numbering is frequency-independent, so
/// multi-frequency block systems reuse one layout.
class MnaLayout {
public:
    MnaLayout(const Circuit& circuit, const AssembleOptions& options);

    const Circuit& circuit() const { return *circuit_; }
    const AssembleOptions& options() const { return options_; }

    int unknown_count() const { return unknown_count_; }
    int node_count() const { return n_nodes_; }

    /// Unknown index of a node voltage, or -1 for ground.
    int node_unknown(NodeId n) const { return n == 0 ? -1 : n - 1; }

    /// First branch unknown of element `e`, or -1 if it has none.
    int branch_unknown(std::size_t e) const { return branch_of_[e]; }

    /// True if row r is a KCL (current) row; false for branch voltage rows.
    bool is_current_row(int r) const { return r < n_nodes_; }

    /// Append the linear stamps at signed frequency `omega` (rad/s) into
    /// `out`, offset by (row_off, col_off). Stamps are built at |omega| and
    /// conjugated for omega < 0, which keeps lossy elements and Touchstone
    /// data consistent with real time-domain responses.
    void stamp(double omega, std::vector<Eigen::Triplet<cplx>>& out,
               int row_off = 0, int col_off = 0) const;

    /// Current injection i into node a, out of node b (rhs entries).
    void add_current_injection(Eigen::VectorXcd& rhs, NodeId a, NodeId b, cplx i,
                               int row_off = 0) const;

    /// Norton drive for incident power wave `a` at a port: i = 2 a / sqrt(Z0).
    void add_port_wave_injection(Eigen::VectorXcd& rhs, const Port& p, cplx a,
                                 int row_off = 0) const;

    /// V(node a) - V(node b) from a solution vector.
    cplx voltage(const Eigen::VectorXcd& x, NodeId a, NodeId b, int row_off = 0) const;

private:
    const Circuit* circuit_;
    AssembleOptions options_;
    int n_nodes_ = 0;
    int unknown_count_ = 0;
    std::vector<int> branch_of_;
};

struct AdmittanceSystem {
    double omega = 0.0;
    MnaLayout layout;
    Eigen::SparseMatrix<cplx> matrix;

    AdmittanceSystem(const Circuit& c, double w, const AssembleOptions& opt);
};

/// Admittance of a lossy capacitor, j w C / (1 + j tan_delta); 0 at w = 0.
cplx capacitor_admittance(double c, double tan_delta, double omega);

AdmittanceSystem assemble_linear(const Circuit& circuit, double omega,
                                 const AssembleOptions& options = {});

/// Factorization wrapper with a residual-based singularity check.
class FactorizedSystem {
public:
    explicit FactorizedSystem(const Eigen::SparseMatrix<cplx>& m);

    /// Throws SingularSystemError when the factorization failed or the
    /// verified solve residual exceeds tolerance.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;
    Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const;

    /// Solve A^T w = rhs (unconjugated transpose; adjoint sensitivities).
    Eigen::VectorXcd solve_transposed(const Eigen::VectorXcd& rhs) const;

    bool factorization_ok() const { return ok_; }

private:
    void check(const Eigen::VectorXcd& x, const Eigen::VectorXcd& rhs) const;

    Eigen::SparseMatrix<cplx> matrix_;
    // transpose() views are non-const in Eigen although solving leaves the
    // factorization untouched
    mutable Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu_;
    bool ok_ = false;
};

/// S parameters over the circuit's ports from power-wave definitions,
/// a = (V + Z0 I) / 2 sqrt(Z0), b = (V - Z0 I) / 2 sqrt(Z0).
Eigen::MatrixXcd solve_linear_sparams(const Circuit& circuit, double omega);

/// One dissipative element channel: evaluates the parallel admittance and the
/// symmetrized noise current spectral density
///   <i_n^2>(w) = 4 (hbar w coth(hbar w / 2 k T) / 2) Re[Y(w)]   [A^2/Hz]
/// at temperature T (the T = 0 limit is 4 (hbar w / 2) Re[Y]).
struct NoiseSource {
    std::size_t element_index = 0;
    NodeId node_a = 0;
    NodeId node_b = 0;

    cplx admittance(double omega) const;
    double current_psd(double omega, double temperature) const;

    // element parameters snapshot
    bool is_capacitor = false;
    double c = 0.0, tan_delta = 0.0, r = 0.0;
};

/// All noise-generating devices: capacitors with tan_delta > 0 and resistors
/// (including nonzero source impedances). Port terminations are input
/// channels, not devices, and are excluded.
std::vector<NoiseSource> enumerate_noise_sources(const Circuit& circuit);

/// Matrix-market style dump of an assembled system (debugging aid).
void dump_matrix_market(const Eigen::SparseMatrix<cplx>& m, std::ostream& os);

/// Best-effort identification of the nodes involved in a singular system;
/// used in SingularSystemError messages for debug-sized circuits.
std::string describe_singularity(const AdmittanceSystem& sys);

}  // namespace qxsim
