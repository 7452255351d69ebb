#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "qxsim/constants.hpp"

namespace qxsim {

/// Tabulated linear multiport (Touchstone v1 data) with magnitude /
/// unwrapped-phase interpolation between grid points. Queries outside the
/// tabulated band throw BandError; values are never extrapolated.
class LinearMultiport {
public:
    LinearMultiport() = default;
    LinearMultiport(int n_ports, double z_ref,
                    std::vector<double> omega_grid,
                    std::vector<Eigen::MatrixXcd> s_matrices,
                    std::string name = {});

    int n_ports() const { return n_ports_; }
    double z_ref() const { return z_ref_; }
    const std::string& name() const { return name_; }
    double omega_min() const { return omega_.front(); }
    double omega_max() const { return omega_.back(); }
    std::size_t grid_size() const { return omega_.size(); }
    const std::vector<double>& omega_grid() const { return omega_; }

    bool covers(double omega) const;

    /// S matrix at |omega|, conjugated for omega < 0.
    Eigen::MatrixXcd s_at(double omega) const;

private:
    int n_ports_ = 0;
    double z_ref_ = 50.0;
    std::string name_;
    std::vector<double> omega_;                 // ascending, rad/s
    // Per grid point, per entry: magnitude and unwrapped phase (radians).
    std::vector<Eigen::MatrixXd> mag_;
    std::vector<Eigen::MatrixXd> phase_;
};

/// Parse Touchstone v1 text (.sNp). Port count comes from the extension when
/// available, otherwise it is inferred from the first data block.
LinearMultiport parse_touchstone(const std::string& text, int n_ports_hint = 0,
                                 std::string name = {});

/// Load from file; port count inferred from the .sNp extension.
LinearMultiport load_touchstone(const std::string& path);

/// Write Touchstone v1 (GHz / S / RI, reference z_ref).
void write_touchstone(const LinearMultiport& mp, std::ostream& os);

}  // namespace qxsim
