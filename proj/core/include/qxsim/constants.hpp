#pragma once

#include <complex>
#include <numbers>

namespace qxsim {

using cplx = std::complex<double>;

namespace constants {

inline constexpr double pi = std::numbers::pi;

// 2019 SI exact values.
inline constexpr double planck_h = 6.62607015e-34;       // J s
inline constexpr double boltzmann_k = 1.380649e-23;      // J/K
inline constexpr double electron_charge = 1.602176634e-19;  // C

inline constexpr double hbar = planck_h / (2.0 * pi);
inline constexpr double flux_quantum = planck_h / (2.0 * electron_charge);   // Wb
inline constexpr double reduced_flux_quantum = flux_quantum / (2.0 * pi);    // Wb/rad

}  // namespace constants

/// Josephson inductance of a junction linearized at zero phase.
inline double josephson_inductance(double critical_current) {
    return constants::reduced_flux_quantum / critical_current;
}

}  // namespace qxsim
