#pragma once

#include <string>

#include "qxsim/circuit.hpp"

namespace qxsim {

/// Parse a line-oriented netlist document:
///
///   # comment
///   <name> <node+> <node-> <value> [key=value ...]
///   P<k> <node+> <node-> [z0=<ohms>]
///   X <file.sNp> <node> <node> ...
///
/// Element kind from the first letter of <name>: C (capacitor, key
/// tan_delta), L, R, J (Josephson junction, value = Ic), I / V (sources,
/// keys freq, phase, rs). Values take SI suffixes f p n u m k M G.
/// `base_dir` resolves relative Touchstone paths.
Circuit parse_netlist(const std::string& text, const std::string& base_dir = {});

Circuit load_netlist(const std::string& path);

/// Canonical netlist emission; emit(parse(emit(c))) == emit(c).
/// Touchstone attachments reference the multiport's recorded name.
std::string emit_netlist(const Circuit& c);

/// Parse one numeric token with optional SI suffix ("100f", "3.4u", "1e-12").
double parse_si_value(const std::string& token);

}  // namespace qxsim
