#include <doctest.h>

#include "qxsim/errors.hpp"
#include "qxsim/modes.hpp"

using namespace qxsim;

namespace {
constexpr double kGhz = 2.0 * constants::pi * 1e9;
}

TEST_CASE("direct substitution: 6 GHz signal, 7.12 GHz pump, m = 4") {
    ModeSet ms = mode_frequencies(6.0 * kGhz, 7.12 * kGhz, 4);
    CHECK(ms.k_min() == -2);
    CHECK(ms.k_max() == 1);
    REQUIRE(ms.freqs.size() == 4);
    CHECK(ms.freqs[0] / kGhz == doctest::Approx(-22.48));
    CHECK(ms.freqs[1] / kGhz == doctest::Approx(-8.24));
    CHECK(ms.freqs[2] / kGhz == doctest::Approx(6.0));
    CHECK(ms.freqs[3] / kGhz == doctest::Approx(20.24));
    CHECK(ms.signal_index() == 2);
    CHECK(ms.sign(0) == -1.0);
    CHECK(ms.sign(2) == 1.0);
}

TEST_CASE("m = 2 keeps exactly the signal and the primary idler") {
    ModeSet ms = mode_frequencies(6.0 * kGhz, 7.12 * kGhz, 2);
    REQUIRE(ms.freqs.size() == 2);
    CHECK(ms.freqs[0] == doctest::Approx(6.0 * kGhz - 2 * 7.12 * kGhz));
    CHECK(ms.freqs[1] == doctest::Approx(6.0 * kGhz));
    CHECK(ms.index_of_k(-1) == 0);
}

TEST_CASE("entries are strictly ascending and never zero") {
    ModeSet ms = mode_frequencies(5.3 * kGhz, 7.9 * kGhz, 9);
    for (std::size_t i = 1; i < ms.freqs.size(); ++i) CHECK(ms.freqs[i] > ms.freqs[i - 1]);
    for (double w : ms.freqs) CHECK(w != 0.0);
    CHECK(ms.freqs[ms.signal_index()] == doctest::Approx(5.3 * kGhz));
}

TEST_CASE("commensurate signals are rejected with a perturbation hint") {
    CHECK_THROWS_AS(mode_frequencies(7.12 * kGhz, 7.12 * kGhz, 4), ValidationError);
    // w_s = 2 w_p makes w_{-1} = 0
    CHECK_THROWS_AS(mode_frequencies(2.0 * 7.0 * kGhz, 7.0 * kGhz, 4), ValidationError);
    try {
        mode_frequencies(7.12 * kGhz, 7.12 * kGhz, 4);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("perturb") != std::string::npos);
    }
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(mode_frequencies(-1.0, 7.0 * kGhz, 4), ValidationError);
    CHECK_THROWS_AS(mode_frequencies(6.0 * kGhz, 0.0, 4), ValidationError);
    CHECK_THROWS_AS(mode_frequencies(6.0 * kGhz, 7.0 * kGhz, 1), ValidationError);
}
