#include <doctest.h>

#include <random>
#include <sstream>

#include "qxsim/errors.hpp"
#include "qxsim/mna.hpp"
#include "support/oracles.hpp"

using namespace qxsim;

TEST_CASE("capacitor admittance") {
    SUBCASE("lossless limit is exactly jwC") {
        double w = 2 * constants::pi * 6e9;
        cplx y = capacitor_admittance(1e-12, 0.0, w);
        CHECK(y.real() == 0.0);
        CHECK(y.imag() == doctest::Approx(w * 1e-12));
    }
    SUBCASE("1 pF, 6 GHz, tan_delta 1e-3") {
        cplx y = capacitor_admittance(1e-12, 1e-3, 2 * constants::pi * 6e9);
        CHECK(y.real() == doctest::Approx(3.77e-5).epsilon(1e-3));
        CHECK(y.imag() == doctest::Approx(3.77e-2).epsilon(1e-3));
    }
    SUBCASE("series-impedance form agrees within 1e-9") {
        for (double td : {1e-6, 1e-4, 1e-2}) {
            for (double f : {1e9, 6e9, 40e9}) {
                double w = 2 * constants::pi * f, c = 1e-12;
                cplx z = td / (w * c) + 1.0 / cplx(0.0, w * c);
                cplx y = capacitor_admittance(c, td, w);
                CHECK(std::abs(1.0 / z - y) / std::abs(y) < 1e-9);
            }
        }
    }
    SUBCASE("DC is an open") { CHECK(capacitor_admittance(1e-12, 0.1, 0.0) == cplx(0.0)); }
    SUBCASE("negative frequency conjugates, Re stays >= 0") {
        double w = 2 * constants::pi * 5e9;
        CHECK(capacitor_admittance(1e-12, 1e-3, -w) ==
              std::conj(capacitor_admittance(1e-12, 1e-3, w)));
        CHECK(capacitor_admittance(1e-12, 1e-3, -w).real() >= 0.0);
    }
}

TEST_CASE("driving-point impedance of a lone resistor") {
    Circuit c;
    c.node_count = 2;
    c.elements.push_back({"R1", {1, 0}, Resistor{75.0}});
    c.ports.push_back({1, 1, 0, 50.0});
    c.validate();

    AdmittanceSystem sys = assemble_linear(c, 2 * constants::pi * 5e9);  // no terminations
    FactorizedSystem lu(sys.matrix);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(sys.layout.unknown_count());
    sys.layout.add_current_injection(rhs, 1, 0, 1.0);
    Eigen::VectorXcd x = lu.solve(rhs);
    CHECK(std::abs(sys.layout.voltage(x, 1, 0) - cplx(75.0)) < 1e-12);
}

TEST_CASE("ideal series LC across an ideal source is singular at resonance") {
    double l = 1e-9, cap = 1e-12;
    double w0 = 1.0 / std::sqrt(l * cap);
    Circuit c;
    c.node_count = 3;
    c.elements.push_back({"V1", {1, 0}, Source{SourceKind::Voltage, 1.0, w0, 0.0, 0.0}});
    c.elements.push_back({"L1", {1, 2}, Inductor{l}});
    c.elements.push_back({"C1", {2, 0}, Capacitor{cap}});
    c.validate();

    AdmittanceSystem sys = assemble_linear(c, w0);
    FactorizedSystem lu(sys.matrix);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(sys.layout.unknown_count());
    sys.layout.add_current_injection(rhs, 1, 0, 1.0);
    CHECK_THROWS_AS((void)lu.solve(rhs), SingularSystemError);

    // off resonance the same system solves fine
    AdmittanceSystem ok = assemble_linear(c, w0 * 1.05);
    FactorizedSystem lu2(ok.matrix);
    CHECK_NOTHROW((void)lu2.solve(rhs));
}

TEST_CASE("10-cell ladder input impedance matches the ABCD chain oracle") {
    const double l = 1e-10, cap = 4e-14, rload = 50.0;
    Circuit c = oracles::lc_ladder(10, l, cap);
    // replace port 2 with an explicit load so assemble_linear stays pure
    c.ports.pop_back();
    c.elements.push_back({"Rload", {11, 0}, Resistor{rload}});
    c.validate();

    for (double f : {1e9, 3.7e9, 8e9}) {
        double w = 2 * constants::pi * f;
        AdmittanceSystem sys = assemble_linear(c, w);
        FactorizedSystem lu(sys.matrix);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(sys.layout.unknown_count());
        sys.layout.add_current_injection(rhs, 1, 0, 1.0);
        cplx z_mna = sys.layout.voltage(lu.solve(rhs), 1, 0);

        oracles::Abcd chain;
        for (int i = 0; i < 10; ++i) {
            chain = oracles::cascade(chain, oracles::series_z(cplx(0.0, w * l)));
            if (i < 9) {
                chain = oracles::cascade(chain, oracles::shunt_y(cplx(0.0, w * cap)));
            }
        }
        cplx z_oracle = oracles::input_impedance(chain, rload);
        CHECK(std::abs(z_mna - z_oracle) / std::abs(z_oracle) < 1e-9);
    }
}

TEST_CASE("S-parameter identities") {
    SUBCASE("matched load: S11 = 0") {
        Circuit c;
        c.node_count = 2;
        c.elements.push_back({"R1", {1, 0}, Resistor{50.0}});
        c.ports.push_back({1, 1, 0, 50.0});
        c.validate();
        Eigen::MatrixXcd s = solve_linear_sparams(c, 2 * constants::pi * 4e9);
        CHECK(std::abs(s(0, 0)) < 1e-14);
    }
    SUBCASE("open circuit: S11 = +1") {
        Circuit c;
        c.node_count = 2;
        c.elements.push_back({"C1", {1, 0}, Capacitor{1e-21}});  // vanishing shunt
        c.ports.push_back({1, 1, 0, 50.0});
        c.validate();
        Eigen::MatrixXcd s = solve_linear_sparams(c, 2 * constants::pi * 4e9);
        CHECK(std::abs(s(0, 0) - cplx(1.0)) < 1e-6);
    }
}

TEST_CASE("lossless 20-cell ladder is unitary over 1-12 GHz") {
    Circuit c = oracles::lc_ladder(20, 1e-10, 4e-14);
    for (double f = 1e9; f <= 12e9; f += 0.5e9) {
        Eigen::MatrixXcd s = solve_linear_sparams(c, 2 * constants::pi * f);
        Eigen::MatrixXcd gram = s.adjoint() * s - Eigen::MatrixXcd::Identity(2, 2);
        CHECK(gram.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("property: reciprocity and passivity on random ladders") {
    std::mt19937 rng(20260809);
    for (int trial = 0; trial < 25; ++trial) {
        bool lossless = trial % 2 == 0;
        Circuit c = oracles::random_ladder(rng, lossless);
        double f = std::uniform_real_distribution<double>(0.5e9, 15e9)(rng);
        Eigen::MatrixXcd s;
        try {
            s = solve_linear_sparams(c, 2 * constants::pi * f);
        } catch (const SingularSystemError&) {
            continue;  // random ladder hit an ideal resonance
        }
        CAPTURE(trial);
        CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
        CHECK(svd.singularValues().maxCoeff() <= 1.0 + 1e-10);
        if (lossless) {
            Eigen::MatrixXcd gram = s.adjoint() * s - Eigen::MatrixXcd::Identity(2, 2);
            CHECK(gram.cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("purely reactive source-free assembly is symmetric") {
    Circuit c = oracles::lc_ladder(6, 1e-10, 4e-14);
    AdmittanceSystem sys = assemble_linear(c, 2 * constants::pi * 5e9);
    Eigen::MatrixXcd dense(sys.matrix);
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-18);
    // capacitors contribute no real part when tan_delta = 0
    for (int i = 0; i < dense.rows(); ++i) CHECK(std::abs(dense(i, i).real()) < 1e-18);
}

TEST_CASE("noise sources") {
    SUBCASE("zero law: lossless circuits enumerate none") {
        Circuit c = oracles::lc_ladder(5, 1e-10, 4e-14);
        CHECK(enumerate_noise_sources(c).empty());
    }
    SUBCASE("lossy capacitor PSD at T = 0") {
        Circuit c = oracles::lc_ladder(5, 1e-10, 4e-14, 50.0, 1e-3);
        auto ns = enumerate_noise_sources(c);
        REQUIRE(!ns.empty());
        double w = 2 * constants::pi * 6e9;
        double re_y = capacitor_admittance(4e-14, 1e-3, w).real();
        CHECK(ns[0].current_psd(w, 0.0) ==
              doctest::Approx(4.0 * constants::hbar * w / 2.0 * re_y));
        // high temperature limit: 4 k T Re Y
        double t_hot = 300.0;
        CHECK(ns[0].current_psd(w, t_hot) ==
              doctest::Approx(4.0 * constants::boltzmann_k * t_hot * re_y).epsilon(1e-2));
    }
    SUBCASE("resistors and source impedances are devices") {
        Circuit c = oracles::tpad_circuit(0.5, 50.0);
        CHECK(enumerate_noise_sources(c).size() == 3);
    }
}

TEST_CASE("matrix market dump shape") {
    Circuit c = oracles::lc_ladder(3, 1e-10, 4e-14);
    AdmittanceSystem sys = assemble_linear(c, 2 * constants::pi * 5e9);
    std::ostringstream os;
    dump_matrix_market(sys.matrix, os);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "%%MatrixMarket matrix coordinate complex general");
    int rows, cols, nnz;
    is >> rows >> cols >> nnz;
    CHECK(rows == sys.layout.unknown_count());
    CHECK(nnz == static_cast<int>(sys.matrix.nonZeros()));
}
