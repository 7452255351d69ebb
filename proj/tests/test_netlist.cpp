#include <doctest.h>

#include "qxsim/errors.hpp"
#include "qxsim/jtwpa.hpp"
#include "qxsim/netlist.hpp"

using namespace qxsim;

TEST_CASE("single capacitor line") {
    Circuit c = parse_netlist("C1 1 0 100f tan_delta=0\nP1 1 0\n");
    CHECK(c.elements.size() == 1);
    CHECK(c.node_count == 2);
    CHECK(c.elements[0].is<Capacitor>());
    CHECK(c.elements[0].as<Capacitor>().c == doctest::Approx(100e-15));
    CHECK(c.ports.size() == 1);
}

TEST_CASE("empty document is an error") {
    CHECK_THROWS_WITH_AS(parse_netlist(""), "parse error at line 1: no elements", ParseError);
    CHECK_THROWS_AS(parse_netlist("# only a comment\n"), ParseError);
}

TEST_CASE("SI suffixes") {
    CHECK(parse_si_value("100f") == doctest::Approx(1e-13));
    CHECK(parse_si_value("3.4u") == doctest::Approx(3.4e-6));
    CHECK(parse_si_value("2.2p") == doctest::Approx(2.2e-12));
    CHECK(parse_si_value("5n") == doctest::Approx(5e-9));
    CHECK(parse_si_value("1.5m") == doctest::Approx(1.5e-3));
    CHECK(parse_si_value("2k") == doctest::Approx(2e3));
    CHECK(parse_si_value("3M") == doctest::Approx(3e6));
    CHECK(parse_si_value("7G") == doctest::Approx(7e9));
    CHECK(parse_si_value("1e-12") == doctest::Approx(1e-12));
    CHECK_THROWS_AS(parse_si_value("abc"), ParseError);
    CHECK_THROWS_AS(parse_si_value("1x"), ParseError);
}

TEST_CASE("errors carry line numbers") {
    try {
        parse_netlist("R1 1 0 50\nQ9 1 0 1p\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("unknown element kind") != std::string::npos);
    }
}

TEST_CASE("duplicate port index is rejected") {
    CHECK_THROWS_AS(parse_netlist("R1 1 0 50\nP1 1 0\nP1 1 0\n"), ParseError);
}

TEST_CASE("dangling element node is rejected at validation") {
    // port references a node no element touches
    CHECK_THROWS_AS(parse_netlist("R1 1 0 50\nP1 2 0\n"), ValidationError);
}

TEST_CASE("sources parse with keys") {
    Circuit c = parse_netlist("I1 1 0 1u freq=7.12G phase=0.5 rs=50\nR1 1 0 50\n");
    const auto& s = c.elements[0].as<Source>();
    CHECK(s.kind == SourceKind::Current);
    CHECK(s.amplitude == doctest::Approx(1e-6));
    CHECK(s.omega == doctest::Approx(2 * constants::pi * 7.12e9));
    CHECK(s.phase == doctest::Approx(0.5));
    CHECK(s.source_impedance == doctest::Approx(50));
}

TEST_CASE("jtwpa netlist round-trip: emit(parse(emit(c))) == emit(c)") {
    JtwpaDesignParams p;
    p.junction_count = 3;
    p.ic_profile = [](int) { return 3.4e-6; };
    p.cell_shunt_cap = 39e-15;
    p.junction_shunt_cap = 329e-15;
    p.resonator_period = 3;
    p.resonator_coupling_cap = 10e-15;
    p.resonator_cap = 5.17e-12;
    p.resonator_inductance = 100e-12;
    Circuit c = build_uniform_jtwpa(p);

    std::string emitted = emit_netlist(c);
    Circuit reparsed = parse_netlist(emitted);
    CHECK(emit_netlist(reparsed) == emitted);
    CHECK(reparsed.elements.size() == c.elements.size());
    CHECK(reparsed.ports.size() == c.ports.size());
    CHECK(reparsed.node_count == c.node_count);
}

TEST_CASE("round-trip preserves loss tangents and source keys") {
    std::string text =
        "C1 1 0 1p tan_delta=0.001\n"
        "J1 1 2 3.4u\n"
        "V1 2 0 1m freq=5G rs=50\n"
        "P1 1 0\nP2 2 0 z0=25\n";
    Circuit c = parse_netlist(text);
    std::string emitted = emit_netlist(c);
    CHECK(emit_netlist(parse_netlist(emitted)) == emitted);
}
