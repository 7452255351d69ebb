#pragma once

#include <functional>

#include "qxsim/circuit.hpp"

namespace qxsim {

/// Parameters of a ladder JTWPA: series Josephson junctions with junction
/// shunt capacitors, per-cell shunt capacitance to ground, and optional
/// phase-matching resonators inserted every `resonator_period` cells.
struct JtwpaDesignParams {
    int junction_count = 0;
    std::function<double(int)> ic_profile;  // cell index -> amperes
    double cell_shunt_cap = 0.0;       // farads, to ground at each interior node
    double junction_shunt_cap = 0.0;   // farads, in parallel with each junction
    double resonator_coupling_cap = 0.0;  // farads; 0 disables resonators
    double resonator_cap = 0.0;        // farads
    double resonator_inductance = 0.0; // henries
    int resonator_period = 0;          // cells between resonators; 0 disables
    double tan_delta = 0.0;            // applied to every capacitor
    double z0 = 50.0;                  // port reference impedance
};

/// Uniform ladder: every cell uses ic_profile(i) (expected constant) with the
/// given fixed capacitances. Ports at both ends. Resonator period, when
/// nonzero, must divide junction_count.
Circuit build_uniform_jtwpa(const JtwpaDesignParams& params);

/// As build_uniform_jtwpa, but per-cell shunt and junction capacitances are
/// co-scaled with the local Josephson inductance so the line impedance and
/// junction plasma frequency stay at their cell-0 values while Ic varies.
Circuit build_floquet_jtwpa(const JtwpaDesignParams& params);

/// Closed-form element count for a ladder build with these parameters.
int jtwpa_element_count(const JtwpaDesignParams& params);

/// Ic profile that tapers from `ic_max` at both ends to `ic_min` at the
/// center following a rescaled Gaussian bump (sigma = n/6).
std::function<double(int)> gaussian_ic_profile(int junction_count, double ic_min,
                                               double ic_max);

struct PumpSpec;  // hb.hpp

/// Named reference designs with operating points. Capacitance and resonator
/// values are representative placeholders chosen for a ~50 ohm line; junction
/// counts, critical currents, and pump settings follow the published designs.
struct JtwpaPreset {
    JtwpaDesignParams params;
    double pump_omega = 0.0;       // rad/s
    double pump_current = 0.0;     // amperes, peak (Norton, 50 ohm source)
    int pump_port = 1;
};

JtwpaPreset uniform_preset();
JtwpaPreset floquet_preset();

/// Preset lookup by name ("uniform" | "floquet"); throws ValidationError.
JtwpaPreset preset_by_name(const std::string& name);

}  // namespace qxsim
