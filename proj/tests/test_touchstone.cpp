#include <doctest.h>

#include <sstream>

#include "qxsim/errors.hpp"
#include "qxsim/touchstone.hpp"
#include "support/oracles.hpp"

using namespace qxsim;

namespace {
const char* kS2pMa =
    "! demo 2-port\n"
    "# GHz S MA R 50\n"
    "1.0  0.1 0   0.9 -30   0.9 -30   0.05 10\n"
    "2.0  0.2 5   0.8 -60   0.8 -60   0.06 20\n";
}

TEST_CASE("parse MA format with 2-port column order (S11 S21 S12 S22)") {
    LinearMultiport mp = parse_touchstone(kS2pMa, 2);
    CHECK(mp.n_ports() == 2);
    Eigen::MatrixXcd s = mp.s_at(2 * constants::pi * 1.0e9);
    CHECK(std::abs(s(0, 0)) == doctest::Approx(0.1));
    CHECK(std::abs(s(1, 0)) == doctest::Approx(0.9));
    CHECK(std::arg(s(1, 0)) == doctest::Approx(-30.0 * constants::pi / 180.0));
    CHECK(std::abs(s(1, 1)) == doctest::Approx(0.05));
}

TEST_CASE("interpolation is linear in magnitude and unwrapped phase") {
    LinearMultiport mp = parse_touchstone(kS2pMa, 2);
    Eigen::MatrixXcd s = mp.s_at(2 * constants::pi * 1.5e9);
    CHECK(std::abs(s(1, 0)) == doctest::Approx(0.85));
    CHECK(std::arg(s(1, 0)) == doctest::Approx(-45.0 * constants::pi / 180.0));
}

TEST_CASE("negative frequency queries conjugate") {
    LinearMultiport mp = parse_touchstone(kS2pMa, 2);
    double w = 2 * constants::pi * 1.3e9;
    CHECK(mp.s_at(-w)(1, 0) == std::conj(mp.s_at(w)(1, 0)));
}

TEST_CASE("out-of-band queries throw, never extrapolate") {
    LinearMultiport mp = parse_touchstone(kS2pMa, 2);
    CHECK_THROWS_AS(mp.s_at(2 * constants::pi * 0.5e9), BandError);
    CHECK_THROWS_AS(mp.s_at(2 * constants::pi * 3.0e9), BandError);
    CHECK(mp.covers(2 * constants::pi * 1.7e9));
    CHECK_FALSE(mp.covers(2 * constants::pi * 9e9));
}

TEST_CASE("RI and DB formats, Hz/MHz units") {
    LinearMultiport ri = parse_touchstone(
        "# Hz S RI R 50\n1e9 0 0 1 0 1 0 0 0\n2e9 0 0 1 0 1 0 0 0\n", 2);
    CHECK(std::abs(ri.s_at(2 * constants::pi * 1.5e9)(1, 0) - cplx(1.0, 0.0)) < 1e-12);

    LinearMultiport db = parse_touchstone(
        "# MHz S DB R 50\n1000 -40 0 -6.0206 0 -6.0206 0 -40 0\n2000 -40 0 -6.0206 0 -6.0206 0 -40 0\n",
        2);
    CHECK(std::abs(db.s_at(2 * constants::pi * 1.5e9)(1, 0)) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("1-port file with bang comments") {
    LinearMultiport mp = parse_touchstone(
        "! reflect standard\n# GHz S MA R 50\n1 1.0 180 ! short\n2 1.0 180\n", 1);
    CHECK(mp.n_ports() == 1);
    CHECK(mp.s_at(2 * constants::pi * 1.2e9)(0, 0).real() == doctest::Approx(-1.0));
}

TEST_CASE("trailing noise-parameter block is ignored") {
    // frequency decreasing signals the start of the .s2p noise section
    std::string text = std::string(kS2pMa) + "1.5 3.0 0.5 120 0.4 1.1 0 0 0\n";
    LinearMultiport mp = parse_touchstone(text, 2);
    CHECK(mp.grid_size() == 2);
}

TEST_CASE("write + reparse round-trips on the grid") {
    LinearMultiport mp = parse_touchstone(kS2pMa, 2);
    std::ostringstream os;
    write_touchstone(mp, os);
    LinearMultiport back = parse_touchstone(os.str(), 2);
    for (double f : {1.0e9, 1.35e9, 2.0e9}) {
        double w = 2 * constants::pi * f;
        CHECK((back.s_at(w) - mp.s_at(w)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("port count inference from data size") {
    LinearMultiport mp3 = parse_touchstone(
        "# GHz S RI R 50\n"
        "1 0 0 1 0 0 0  0 0 0 0 1 0  1 0 0 0 0 0\n"
        "2 0 0 1 0 0 0  0 0 0 0 1 0  1 0 0 0 0 0\n");
    CHECK(mp3.n_ports() == 3);
    // 3-port files are row-major
    CHECK(std::abs(mp3.s_at(2 * constants::pi * 1e9)(0, 1) - cplx(1.0, 0.0)) < 1e-12);
}
