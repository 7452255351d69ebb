#include <doctest.h>

#include "qxsim/circuit.hpp"
#include "qxsim/errors.hpp"
#include "qxsim/mna.hpp"
#include "support/oracles.hpp"

using namespace qxsim;

TEST_CASE("validate rejects floating subcircuits") {
    Circuit c;
    c.node_count = 4;
    c.elements.push_back({"C1", {1, 0}, Capacitor{1e-12}});
    c.elements.push_back({"C2", {2, 3}, Capacitor{1e-12}});  // floats
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("validate rejects bad element values and ports") {
    Circuit c;
    c.node_count = 2;
    c.elements.push_back({"C1", {1, 0}, Capacitor{1e-12, 0.0}});
    c.ports.push_back({1, 1, 0, 50.0});
    CHECK_NOTHROW(c.validate());

    SUBCASE("tan_delta out of range") {
        std::get<Capacitor>(c.elements[0].value).tan_delta = 1.0;
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("nonexistent node") {
        c.elements.push_back({"R1", {1, 5}, Resistor{50.0}});
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("duplicate port index") {
        c.ports.push_back({1, 1, 0, 50.0});
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("non-contiguous port indices") {
        c.ports.push_back({3, 1, 0, 50.0});
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("negative Ic") {
        c.elements.push_back({"J1", {1, 0}, JosephsonJunction{-1e-6}});
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
}

TEST_CASE("with_tan_delta overrides every capacitor") {
    Circuit lad = oracles::lc_ladder(4, 1e-10, 4e-14);
    Circuit lossy = with_tan_delta(lad, 1e-3);
    int caps = 0;
    for (const auto& e : lossy.elements) {
        if (e.is<Capacitor>()) {
            ++caps;
            CHECK(e.as<Capacitor>().tan_delta == doctest::Approx(1e-3));
        }
    }
    CHECK(caps > 0);
}

TEST_CASE("attach_multiport: matched thru leaves responses unchanged") {
    Circuit lad = oracles::lc_ladder(6, 1e-10, 4e-14);
    Eigen::Matrix2cd thru;
    thru << 0.0, 1.0, 1.0, 0.0;
    auto mp = oracles::constant_multiport(thru, 0.5e9, 20e9);

    // splice the thru in front of port 1: move port 1 to a fresh node
    Circuit spliced = lad;
    int fresh = spliced.node_count++;
    spliced.ports[0].positive = fresh;
    spliced = attach_multiport(spliced, mp, {fresh, 1});

    for (double f : {2e9, 5e9, 9e9}) {
        double w = 2.0 * constants::pi * f;
        Eigen::MatrixXcd s0 = solve_linear_sparams(lad, w);
        Eigen::MatrixXcd s1 = solve_linear_sparams(spliced, w);
        CHECK((s1 - s0).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("attach_multiport: 3 dB matched attenuator drops S21 by 3.01 dB") {
    // base circuit: near-ideal thru (single tiny shunt capacitor)
    Circuit base;
    base.node_count = 2;
    base.elements.push_back({"C1", {1, 0}, Capacitor{1e-20}});
    base.ports.push_back({1, 1, 0, 50.0});
    base.ports.push_back({2, 1, 0, 50.0});
    base.validate();

    const double eta = 0.5;
    Eigen::Matrix2cd pad;
    pad << 0.0, std::sqrt(eta), std::sqrt(eta), 0.0;
    auto mp = oracles::constant_multiport(pad, 0.5e9, 20e9);

    Circuit spliced = base;
    int fresh = spliced.node_count++;
    spliced.ports[0].positive = fresh;
    spliced = attach_multiport(spliced, mp, {fresh, 1});

    double w = 2.0 * constants::pi * 6e9;
    Eigen::MatrixXcd s_base = solve_linear_sparams(base, w);
    Eigen::MatrixXcd s_new = solve_linear_sparams(spliced, w);
    double drop_db = 20.0 * std::log10(std::abs(s_new(1, 0)) / std::abs(s_base(1, 0)));
    CHECK(std::abs(drop_db + 3.0103) < 0.01);

    // analytic cascade oracle
    Eigen::Matrix2cd s_oracle = oracles::cascade_s(pad, s_base);
    CHECK(std::abs(s_new(1, 0) - s_oracle(1, 0)) < 1e-9);
    CHECK(std::abs(s_new(0, 0) - s_oracle(0, 0)) < 1e-9);
}

TEST_CASE("attach_multiport validates the node map") {
    Circuit lad = oracles::lc_ladder(3, 1e-10, 4e-14);
    Eigen::Matrix2cd thru;
    thru << 0.0, 1.0, 1.0, 0.0;
    auto mp = oracles::constant_multiport(thru, 1e9, 10e9);
    CHECK_THROWS_AS(attach_multiport(lad, mp, {1}), ValidationError);
}

TEST_CASE("mismatched reflective two-ports on both ends raise gain ripple") {
    Circuit lad = oracles::lc_ladder(20, 1e-10, 4e-14);

    Eigen::Matrix2cd imperfect;
    imperfect << cplx(0.15, 0.05), cplx(0.97, 0.0), cplx(0.97, 0.0), cplx(-0.1, 0.12);
    auto mp = oracles::constant_multiport(imperfect, 0.5e9, 30e9);

    Circuit spliced = lad;
    int in_node = spliced.node_count++;
    int out_node = spliced.node_count++;
    int old_in = spliced.ports[0].positive;
    int old_out = spliced.ports[1].positive;
    spliced.ports[0].positive = in_node;
    spliced.ports[1].positive = out_node;
    spliced = attach_multiport(spliced, mp, {in_node, old_in});
    spliced = attach_multiport(spliced, mp, {out_node, old_out});

    auto ripple = [](const Circuit& c) {
        double lo = 1e99, hi = -1e99;
        for (double f = 4e9; f <= 7e9; f += 0.25e9) {
            double s21 =
                20.0 * std::log10(std::abs(solve_linear_sparams(c, 2 * constants::pi * f)(1, 0)));
            lo = std::min(lo, s21);
            hi = std::max(hi, s21);
        }
        return hi - lo;
    };
    CHECK(ripple(spliced) > ripple(lad));
}
