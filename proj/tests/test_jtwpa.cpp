#include <doctest.h>

#include <cmath>

#include "qxsim/errors.hpp"
#include "qxsim/jtwpa.hpp"
#include "qxsim/netlist.hpp"

using namespace qxsim;

TEST_CASE("uniform preset matches the published design point") {
    JtwpaPreset d = uniform_preset();
    Circuit c = build_uniform_jtwpa(d.params);
    int jj = 0;
    for (const auto& e : c.elements) {
        if (e.is<JosephsonJunction>()) {
            ++jj;
            CHECK(e.as<JosephsonJunction>().ic == doctest::Approx(3.4e-6));
        }
    }
    CHECK(jj == 2047);
    CHECK(d.pump_omega == doctest::Approx(2 * constants::pi * 7.12e9));
    CHECK(d.pump_current == doctest::Approx(3.70e-6));
    // available pump power at a 50-ohm Norton source: I^2 Z0 / 8
    double p_dbm = 10.0 * std::log10(d.pump_current * d.pump_current * 50.0 / 8.0 * 1e3);
    CHECK(p_dbm == doctest::Approx(-70.68).epsilon(1e-3));
}

TEST_CASE("floquet preset junction count and Ic range") {
    JtwpaPreset d = floquet_preset();
    Circuit c = build_floquet_jtwpa(d.params);
    double ic_min = 1e9, ic_max = 0.0;
    int jj = 0;
    for (const auto& e : c.elements) {
        if (e.is<JosephsonJunction>()) {
            ++jj;
            ic_min = std::min(ic_min, e.as<JosephsonJunction>().ic);
            ic_max = std::max(ic_max, e.as<JosephsonJunction>().ic);
        }
    }
    CHECK(jj == 3998);
    CHECK(ic_min == doctest::Approx(3.50e-6).epsilon(1e-6));
    CHECK(ic_max == doctest::Approx(21.21e-6).epsilon(1e-6));
    double p_dbm = 10.0 * std::log10(d.pump_current * d.pump_current * 50.0 / 8.0 * 1e3);
    CHECK(p_dbm == doctest::Approx(-69.17).epsilon(1e-3));
}

TEST_CASE("single cell without resonators") {
    JtwpaDesignParams p;
    p.junction_count = 1;
    p.ic_profile = [](int) { return 1e-6; };
    p.cell_shunt_cap = 39e-15;  // unused with one cell (no interior nodes)
    p.junction_shunt_cap = 100e-15;
    Circuit c = build_uniform_jtwpa(p);
    int jj = 0;
    for (const auto& e : c.elements) jj += e.is<JosephsonJunction>();
    CHECK(jj == 1);
    CHECK(c.ports.size() == 2);
    CHECK(c.node_count == 3);
}

TEST_CASE("element count equals the closed-form recipe count") {
    JtwpaDesignParams p;
    p.junction_count = 46;
    p.ic_profile = [](int) { return 2e-6; };
    p.cell_shunt_cap = 39e-15;
    p.junction_shunt_cap = 329e-15;
    p.resonator_period = 23;
    p.resonator_coupling_cap = 10e-15;
    p.resonator_cap = 5e-12;
    p.resonator_inductance = 100e-12;

    // independent enumeration of the recipe: per cell a junction and its
    // shunt cap, a ground cap at each interior node, and one three-element
    // resonator per interior group boundary
    int cells = p.junction_count;
    int resonators = cells / p.resonator_period - 1;
    int expected = cells + cells + (cells - 1) + 3 * resonators;

    Circuit c = build_uniform_jtwpa(p);
    CHECK(static_cast<int>(c.elements.size()) == expected);
    CHECK(jtwpa_element_count(p) == expected);
}

TEST_CASE("resonator period must divide the cell count") {
    JtwpaDesignParams p;
    p.junction_count = 10;
    p.ic_profile = [](int) { return 2e-6; };
    p.cell_shunt_cap = 39e-15;
    p.junction_shunt_cap = 329e-15;
    p.resonator_period = 3;
    p.resonator_coupling_cap = 10e-15;
    p.resonator_cap = 5e-12;
    p.resonator_inductance = 100e-12;
    CHECK_THROWS_AS(build_uniform_jtwpa(p), ValidationError);
    CHECK_THROWS_AS(build_floquet_jtwpa(p), ValidationError);
}

TEST_CASE("non-positive parameters are rejected") {
    JtwpaDesignParams p;
    p.junction_count = 0;
    CHECK_THROWS_AS(build_uniform_jtwpa(p), ValidationError);
    p.junction_count = 4;
    p.ic_profile = [](int i) { return i == 2 ? -1e-6 : 1e-6; };
    p.cell_shunt_cap = 39e-15;
    p.junction_shunt_cap = 329e-15;
    CHECK_THROWS_AS(build_uniform_jtwpa(p), ValidationError);
}

TEST_CASE("constant profile: floquet build reduces to the uniform build") {
    JtwpaDesignParams p;
    p.junction_count = 8;
    p.ic_profile = [](int) { return 3.4e-6; };
    p.cell_shunt_cap = 39e-15;
    p.junction_shunt_cap = 329e-15;
    Circuit u = build_uniform_jtwpa(p);
    Circuit f = build_floquet_jtwpa(p);
    REQUIRE(u.elements.size() == f.elements.size());
    CHECK(emit_netlist(u) == emit_netlist(f));
}

TEST_CASE("monotone ramp profile: Ic strictly increasing along the first half") {
    JtwpaDesignParams p;
    p.junction_count = 20;
    p.ic_profile = [](int i) { return 1e-6 * (1.0 + 0.05 * i); };
    p.cell_shunt_cap = 39e-15;
    p.junction_shunt_cap = 329e-15;
    Circuit c = build_floquet_jtwpa(p);
    double prev = 0.0;
    int seen = 0;
    for (const auto& e : c.elements) {
        if (!e.is<JosephsonJunction>()) continue;
        if (seen >= 10) break;
        double ic = e.as<JosephsonJunction>().ic;
        CHECK(ic > prev);
        // independent evaluation of the profile function
        CHECK(ic == doctest::Approx(1e-6 * (1.0 + 0.05 * seen)));
        prev = ic;
        ++seen;
    }
    CHECK(seen == 10);
}

TEST_CASE("floquet co-scaling holds the local line impedance") {
    JtwpaDesignParams p = floquet_preset().params;
    p.junction_count = 100;
    p.ic_profile = gaussian_ic_profile(100, 3.5e-6, 21.21e-6);
    Circuit c = build_floquet_jtwpa(p);

    // collect junction Ic and interior ground caps by cell
    std::vector<double> ic, cg;
    for (const auto& e : c.elements) {
        if (e.is<JosephsonJunction>()) ic.push_back(e.as<JosephsonJunction>().ic);
        if (e.is<Capacitor>() && e.name.rfind("Cg", 0) == 0) {
            cg.push_back(e.as<Capacitor>().c);
        }
    }
    REQUIRE(ic.size() == 100);
    REQUIRE(cg.size() == 99);
    for (std::size_t i = 0; i < cg.size(); ++i) {
        double lj_avg = 0.5 * (josephson_inductance(ic[i]) + josephson_inductance(ic[i + 1]));
        double z = std::sqrt(lj_avg / cg[i]);
        CHECK(z == doctest::Approx(std::sqrt(josephson_inductance(21.21e-6) / 6.2e-15))
                       .epsilon(0.02));
    }
}

TEST_CASE("generators are deterministic") {
    JtwpaPreset d = uniform_preset();
    d.params.junction_count = 46;
    Circuit a = build_uniform_jtwpa(d.params);
    Circuit b = build_uniform_jtwpa(d.params);
    CHECK(emit_netlist(a) == emit_netlist(b));
}

TEST_CASE("gaussian profile endpoints are exact") {
    auto prof = gaussian_ic_profile(3998, 3.50e-6, 21.21e-6);
    CHECK(prof(0) == doctest::Approx(21.21e-6).epsilon(1e-12));
    CHECK(prof(3997) == doctest::Approx(21.21e-6).epsilon(1e-12));
    double mid = std::min(prof(1998), prof(1999));
    CHECK(mid == doctest::Approx(3.50e-6).epsilon(1e-4));
    // symmetric taper
    CHECK(prof(100) == doctest::Approx(prof(3897)).epsilon(1e-9));
}
