#include "qxsim/modes.hpp"

#include <cmath>
#include <string>

#include "qxsim/errors.hpp"

namespace qxsim {

ModeSet mode_frequencies(double omega_s, double omega_p, int m) {
    if (!(omega_s > 0.0)) throw ValidationError("mode_frequencies: omega_s must be > 0");
    if (!(omega_p > 0.0)) throw ValidationError("mode_frequencies: omega_p must be > 0");
    if (m < 2) throw ValidationError("mode_frequencies: m must be >= 2");

    ModeSet ms;
    ms.omega_s = omega_s;
    ms.omega_p = omega_p;
    ms.m = m;
    ms.freqs.reserve(m);

    const double tol = 1e-6 * omega_p;
    for (int k = ms.k_min(); k <= ms.k_max(); ++k) {
        double w = 2.0 * k * omega_p + omega_s;
        double nearest = std::round(w / omega_p) * omega_p;
        if (std::abs(w) < tol || std::abs(w - nearest) < tol) {
            throw ValidationError(
                "signal frequency is commensurate with the pump: mode k=" + std::to_string(k) +
                " lands on a pump harmonic; perturb omega_s slightly (e.g. by 1e-4 relative)");
        }
        ms.freqs.push_back(w);
    }
    return ms;
}

}  // namespace qxsim
