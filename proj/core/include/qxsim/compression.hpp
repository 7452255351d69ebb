#pragma once

#include <iosfwd>
#include <vector>

namespace qxsim {

/// Gain-vs-signal-power compression data. `samples` must be ascending in
/// power; gain is linear (not dB).
struct CompressionCurve {
    double g0 = 0.0;          // small-signal linear gain
    double pump_power = 0.0;  // available pump power, watts
    std::vector<std::pair<double, double>> samples;  // (P_s watts, G linear)
};

/// Pump-depletion gain model G0 / (1 + 2 G0 Ps / Pp).
double pump_depletion_gain(double g0, double p_signal, double p_pump);

/// Sampled curve of the analytic model over [0, p_max] (log-spaced).
CompressionCurve analytic_compression_curve(double g0, double p_pump, double p_max,
                                            int n_points = 200);

/// Input power where gain drops 1 dB below g0, by monotone piecewise-cubic
/// interpolation on the dB scale. Throws if the curve never crosses.
double p1db(const CompressionCurve& curve);

/// Closed form for the analytic model: Pp (10^0.1 - 1) / (2 G0).
double p1db_analytic(double g0, double p_pump);

void write_compression_csv(const CompressionCurve& curve, std::ostream& os);
CompressionCurve read_compression_csv(std::istream& is);

}  // namespace qxsim
