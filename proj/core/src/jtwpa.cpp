#include "qxsim/jtwpa.hpp"

#include <cmath>
#include <string>

#include "qxsim/errors.hpp"

namespace qxsim {

namespace {

void check_params(const JtwpaDesignParams& p) {
    if (p.junction_count <= 0) throw ValidationError("junction_count must be > 0");
    if (!p.ic_profile) throw ValidationError("ic_profile is required");
    if (p.junction_count > 1 && !(p.cell_shunt_cap > 0.0)) {
        throw ValidationError("cell_shunt_cap must be > 0");
    }
    if (!(p.junction_shunt_cap > 0.0)) throw ValidationError("junction_shunt_cap must be > 0");
    if (p.resonator_period < 0) throw ValidationError("resonator_period must be >= 0");
    if (p.resonator_period > 0) {
        if (p.junction_count % p.resonator_period != 0) {
            throw ValidationError("resonator_period " + std::to_string(p.resonator_period) +
                                  " does not divide junction_count " +
                                  std::to_string(p.junction_count));
        }
        if (!(p.resonator_coupling_cap > 0.0) || !(p.resonator_cap > 0.0) ||
            !(p.resonator_inductance > 0.0)) {
            throw ValidationError("resonator element values must be > 0");
        }
    }
}

int resonator_count(const JtwpaDesignParams& p) {
    if (p.resonator_period <= 0) return 0;
    return p.junction_count / p.resonator_period - 1;  // interior cell boundaries only
}

// Shared ladder generator; `co_scale` rescales the capacitances of cell i by
// L_J(i)/L_J(0), holding the local impedance and plasma frequency at their
// cell-0 values as Ic varies.
Circuit build_ladder(const JtwpaDesignParams& p, bool co_scale, const char* kind) {
    check_params(p);

    const int n = p.junction_count;
    Circuit c;
    c.name = std::string(kind) + "-jtwpa-" + std::to_string(n);
    c.node_count = n + 2;  // ground + ladder nodes 1..n+1

    const double ic0 = p.ic_profile(0);
    if (!(ic0 > 0.0)) throw ValidationError("ic_profile(0) must be > 0");

    for (int i = 0; i < n; ++i) {
        double ic = p.ic_profile(i);
        if (!(ic > 0.0)) {
            throw ValidationError("ic_profile(" + std::to_string(i) + ") must be > 0");
        }
        double scale = co_scale ? ic0 / ic : 1.0;  // L_J(i)/L_J(0) = ic0/ic
        NodeId a = i + 1, b = i + 2;
        c.elements.push_back({"J" + std::to_string(i), {a, b}, JosephsonJunction{ic}});
        c.elements.push_back(
            {"Cj" + std::to_string(i), {a, b}, Capacitor{p.junction_shunt_cap / scale, p.tan_delta}});
        if (i > 0) {
            // shunt capacitance at interior node a (nodes 2..n); scale with the
            // mean of the two adjacent cells so edge impedance stays smooth
            double s0 = co_scale ? ic0 / p.ic_profile(i - 1) : 1.0;
            double s_avg = 0.5 * (scale + s0);
            c.elements.push_back(
                {"Cg" + std::to_string(i), {a, 0}, Capacitor{p.cell_shunt_cap * s_avg, p.tan_delta}});
        }
    }

    int n_res = resonator_count(p);
    for (int r = 0; r < n_res; ++r) {
        NodeId attach = 1 + (r + 1) * p.resonator_period;
        NodeId rn = c.node_count++;
        std::string id = std::to_string(r);
        c.elements.push_back({"Cc" + id, {attach, rn}, Capacitor{p.resonator_coupling_cap, p.tan_delta}});
        c.elements.push_back({"Cr" + id, {rn, 0}, Capacitor{p.resonator_cap, p.tan_delta}});
        c.elements.push_back({"Lr" + id, {rn, 0}, Inductor{p.resonator_inductance}});
    }

    c.ports.push_back({1, 1, 0, p.z0});
    c.ports.push_back({2, n + 1, 0, p.z0});
    c.validate();
    return c;
}

}  // namespace

Circuit build_uniform_jtwpa(const JtwpaDesignParams& params) {
    return build_ladder(params, /*co_scale=*/false, "uniform");
}

Circuit build_floquet_jtwpa(const JtwpaDesignParams& params) {
    return build_ladder(params, /*co_scale=*/true, "floquet");
}

int jtwpa_element_count(const JtwpaDesignParams& params) {
    check_params(params);
    return 2 * params.junction_count + (params.junction_count - 1) +
           3 * resonator_count(params);
}

std::function<double(int)> gaussian_ic_profile(int junction_count, double ic_min,
                                               double ic_max) {
    if (junction_count < 2 || !(ic_min > 0.0) || !(ic_max >= ic_min)) {
        throw ValidationError("bad gaussian_ic_profile parameters");
    }
    const double center = 0.5 * (junction_count - 1);
    const double sigma = junction_count / 6.0;
    const double g_edge = std::exp(-center * center / (2.0 * sigma * sigma));
    const double g_peak_raw = 1.0;
    const double beta = std::log(ic_max / ic_min);
    return [=](int i) {
        double x = i - center;
        double g = std::exp(-x * x / (2.0 * sigma * sigma));
        // rescale so the taper hits exactly ic_max at the edges and ic_min at
        // the center of the line
        double t = (g - g_edge) / (g_peak_raw - g_edge);
        return ic_max * std::exp(-beta * t);
    };
}

JtwpaPreset uniform_preset() {
    JtwpaPreset d;
    auto& p = d.params;
    p.junction_count = 2047;
    p.ic_profile = [](int) { return 3.4e-6; };
    p.cell_shunt_cap = 39e-15;
    p.junction_shunt_cap = 329e-15;
    p.resonator_period = 23;
    p.resonator_coupling_cap = 10e-15;
    p.resonator_cap = 5.17e-12;         // with Lr = 100 pH: ~7.0 GHz resonance
    p.resonator_inductance = 100e-12;
    p.tan_delta = 0.0;
    d.pump_omega = 2.0 * constants::pi * 7.12e9;
    d.pump_current = 3.70e-6;
    d.pump_port = 1;
    return d;
}

JtwpaPreset floquet_preset() {
    JtwpaPreset d;
    auto& p = d.params;
    p.junction_count = 3998;
    p.ic_profile = gaussian_ic_profile(3998, 3.50e-6, 21.21e-6);
    // cell-0 values: Ic = 21.21 uA -> L_J = 15.52 pH; 50 ohm line, ~28 GHz plasma
    p.cell_shunt_cap = 6.2e-15;
    p.junction_shunt_cap = 2.05e-12;
    p.resonator_period = 0;  // profile-based phase matching
    p.tan_delta = 0.0;
    d.pump_omega = 2.0 * constants::pi * 7.90e9;
    d.pump_current = 4.40e-6;
    d.pump_port = 1;
    return d;
}

JtwpaPreset preset_by_name(const std::string& name) {
    if (name == "uniform") return uniform_preset();
    if (name == "floquet") return floquet_preset();
    throw ValidationError("unknown preset '" + name + "' (expected uniform|floquet)");
}

}  // namespace qxsim
