#pragma once

// Independent reference computations used as test oracles. Everything here is
// deliberately written against textbook formulas rather than the library's
// own assembly/solve paths.

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <random>
#include <vector>

#include "qxsim/circuit.hpp"
#include "qxsim/touchstone.hpp"

namespace oracles {

using qxsim::cplx;

struct Abcd {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
};

inline Abcd series_z(cplx z) { return {1.0, z, 0.0, 1.0}; }
inline Abcd shunt_y(cplx y) { return {1.0, 0.0, y, 1.0}; }

inline Abcd cascade(const Abcd& m1, const Abcd& m2) {
    return {m1.a * m2.a + m1.b * m2.c, m1.a * m2.b + m1.b * m2.d,
            m1.c * m2.a + m1.d * m2.c, m1.c * m2.b + m1.d * m2.d};
}

inline cplx input_impedance(const Abcd& m, cplx z_load) {
    return (m.a * z_load + m.b) / (m.c * z_load + m.d);
}

inline Eigen::Matrix2cd abcd_to_s(const Abcd& m, double z0) {
    cplx den = m.a + m.b / z0 + m.c * z0 + m.d;
    Eigen::Matrix2cd s;
    s(0, 0) = (m.a + m.b / z0 - m.c * z0 - m.d) / den;
    s(0, 1) = 2.0 * (m.a * m.d - m.b * m.c) / den;
    s(1, 0) = 2.0 / den;
    s(1, 1) = (-m.a + m.b / z0 - m.c * z0 + m.d) / den;
    return s;
}

/// Cascade two S matrices (same reference impedance) via transfer parameters.
inline Eigen::Matrix2cd cascade_s(const Eigen::Matrix2cd& s1, const Eigen::Matrix2cd& s2) {
    auto to_t = [](const Eigen::Matrix2cd& s) {
        Eigen::Matrix2cd t;
        t(0, 0) = (s(0, 1) * s(1, 0) - s(0, 0) * s(1, 1)) / s(1, 0);
        t(0, 1) = s(0, 0) / s(1, 0);
        t(1, 0) = -s(1, 1) / s(1, 0);
        t(1, 1) = 1.0 / s(1, 0);
        return t;
    };
    Eigen::Matrix2cd t = to_t(s1) * to_t(s2);
    Eigen::Matrix2cd s;
    s(0, 0) = t(0, 1) / t(1, 1);
    s(0, 1) = t(0, 0) - t(0, 1) * t(1, 0) / t(1, 1);
    s(1, 0) = 1.0 / t(1, 1);
    s(1, 1) = -t(1, 0) / t(1, 1);
    return s;
}

/// Matched resistive T-pad with |S21|^2 = eta.
struct TPad {
    double r_series = 0.0;  // each arm
    double r_shunt = 0.0;
};

inline TPad tpad_for_transmission(double eta, double z0) {
    double k = std::sqrt(eta);
    return {z0 * (1.0 - k) / (1.0 + k), 2.0 * z0 * k / (1.0 - k * k)};
}

/// 2-port circuit: port1 - R - node - R - port2, shunt R to ground.
inline qxsim::Circuit tpad_circuit(double eta, double z0) {
    TPad p = tpad_for_transmission(eta, z0);
    qxsim::Circuit c;
    c.name = "tpad";
    c.node_count = 4;  // gnd, in, mid, out
    c.elements.push_back({"R1", {1, 2}, qxsim::Resistor{p.r_series}});
    c.elements.push_back({"R2", {2, 3}, qxsim::Resistor{p.r_series}});
    c.elements.push_back({"R3", {2, 0}, qxsim::Resistor{p.r_shunt}});
    c.ports.push_back({1, 1, 0, z0});
    c.ports.push_back({2, 3, 0, z0});
    c.validate();
    return c;
}

/// Lossless LC ladder: n series inductors, shunt caps at interior nodes.
inline qxsim::Circuit lc_ladder(int n_cells, double l, double cap, double z0 = 50.0,
                                double tan_delta = 0.0) {
    qxsim::Circuit c;
    c.name = "lc-ladder";
    c.node_count = n_cells + 2;
    for (int i = 0; i < n_cells; ++i) {
        c.elements.push_back({"L" + std::to_string(i), {i + 1, i + 2}, qxsim::Inductor{l}});
        if (i > 0) {
            c.elements.push_back(
                {"C" + std::to_string(i), {i + 1, 0}, qxsim::Capacitor{cap, tan_delta}});
        }
    }
    c.ports.push_back({1, 1, 0, z0});
    c.ports.push_back({2, n_cells + 1, 0, z0});
    c.validate();
    return c;
}

/// Random reciprocal 2-port ladders for property tests (lossless by default).
inline qxsim::Circuit random_ladder(std::mt19937& rng, bool lossless = true) {
    std::uniform_int_distribution<int> cells(2, 8);
    std::uniform_real_distribution<double> lval(1e-11, 5e-10);
    std::uniform_real_distribution<double> cval(1e-14, 5e-13);
    std::uniform_real_distribution<double> rval(5.0, 500.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    qxsim::Circuit c;
    c.name = "random-ladder";
    int n = cells(rng);
    c.node_count = n + 2;
    int id = 0;
    for (int i = 0; i < n; ++i) {
        if (coin(rng) < 0.5) {
            c.elements.push_back({"L" + std::to_string(id++), {i + 1, i + 2},
                                  qxsim::Inductor{lval(rng)}});
        } else {
            c.elements.push_back({"C" + std::to_string(id++), {i + 1, i + 2},
                                  qxsim::Capacitor{cval(rng)}});
        }
        if (coin(rng) < 0.7) {
            if (!lossless && coin(rng) < 0.3) {
                c.elements.push_back({"R" + std::to_string(id++), {i + 2, 0},
                                      qxsim::Resistor{rval(rng)}});
            } else {
                c.elements.push_back({"C" + std::to_string(id++), {i + 2, 0},
                                      qxsim::Capacitor{cval(rng)}});
            }
        }
    }
    // keep node 1..n+1 connected to ground through something
    c.elements.push_back({"Lg", {n + 1, 0}, qxsim::Inductor{lval(rng)}});
    c.ports.push_back({1, 1, 0, 50.0});
    c.ports.push_back({2, n + 1, 0, 50.0});
    c.validate();
    return c;
}

/// Constant-S synthetic multiport over a frequency band.
inline std::shared_ptr<qxsim::LinearMultiport> constant_multiport(
    const Eigen::MatrixXcd& s, double f_lo_hz, double f_hi_hz, double z_ref = 50.0,
    int points = 5, const std::string& name = "synthetic") {
    std::vector<double> grid;
    std::vector<Eigen::MatrixXcd> mats;
    for (int i = 0; i < points; ++i) {
        double f = f_lo_hz + (f_hi_hz - f_lo_hz) * i / (points - 1);
        grid.push_back(2.0 * qxsim::constants::pi * f);
        mats.push_back(s);
    }
    return std::make_shared<qxsim::LinearMultiport>(static_cast<int>(s.rows()), z_ref,
                                                    std::move(grid), std::move(mats), name);
}

}  // namespace oracles
