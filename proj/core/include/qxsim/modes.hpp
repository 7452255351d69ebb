#pragma once

#include <vector>

#include "qxsim/constants.hpp"

namespace qxsim {

/// Double-sided signal/idler frequency set w_k = 2 k w_p + w_s for
/// k in {-floor(m/2), ..., floor((m-1)/2)}; w_0 = w_s. Entries may be
/// negative; negative modes are handled by conjugated block equations.
struct ModeSet {
    double omega_s = 0.0;
    double omega_p = 0.0;
    int m = 0;
    std::vector<double> freqs;  // signed, ascending in k

    int k_min() const { return -(m / 2); }
    int k_max() const { return (m - 1) / 2; }
    int index_of_k(int k) const { return k - k_min(); }
    int k_of_index(int idx) const { return idx + k_min(); }
    int signal_index() const { return index_of_k(0); }
    double sign(int idx) const { return freqs[idx] > 0.0 ? 1.0 : -1.0; }
};

/// Builds the mode set; throws ValidationError when any mode frequency is
/// zero or collides with a pump harmonic (commensurate signal), with a hint
/// to perturb the signal frequency slightly.
ModeSet mode_frequencies(double omega_s, double omega_p, int m);

}  // namespace qxsim
