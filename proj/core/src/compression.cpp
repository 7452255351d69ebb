#include "qxsim/compression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qxsim/errors.hpp"

namespace qxsim {

namespace {

/// Fritsch-Carlson monotone cubic interpolant.
class Pchip {
public:
    Pchip(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        const std::size_t n = x_.size();
        d_.assign(n, 0.0);
        if (n < 2) return;
        std::vector<double> h(n - 1), s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            s[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        d_[0] = s[0];
        d_[n - 1] = s[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (s[i - 1] * s[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                double w1 = 2.0 * h[i] + h[i - 1];
                double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
            }
        }
    }

    double operator()(double x) const {
        const std::size_t n = x_.size();
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
        i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
        double h = x_[i + 1] - x_[i];
        double t = (x - x_[i]) / h;
        double t2 = t * t, t3 = t2 * t;
        return y_[i] * (2 * t3 - 3 * t2 + 1) + h * d_[i] * (t3 - 2 * t2 + t) +
               y_[i + 1] * (-2 * t3 + 3 * t2) + h * d_[i + 1] * (t3 - t2);
    }

private:
    std::vector<double> x_, y_, d_;
};

}  // namespace

double pump_depletion_gain(double g0, double p_signal, double p_pump) {
    if (!(g0 >= 1.0)) throw ValidationError("pump_depletion_gain: G0 must be >= 1");
    if (p_signal < 0.0) throw ValidationError("pump_depletion_gain: Ps must be >= 0");
    if (!(p_pump > 0.0)) throw ValidationError("pump_depletion_gain: Pp must be > 0");
    return g0 / (1.0 + 2.0 * g0 * p_signal / p_pump);
}

CompressionCurve analytic_compression_curve(double g0, double p_pump, double p_max,
                                            int n_points) {
    CompressionCurve c;
    c.g0 = g0;
    c.pump_power = p_pump;
    c.samples.emplace_back(0.0, g0);
    double lo = std::log10(p_max) - 6.0;
    for (int i = 0; i < n_points; ++i) {
        double p = std::pow(10.0, lo + (std::log10(p_max) - lo) * i / (n_points - 1));
        c.samples.emplace_back(p, pump_depletion_gain(g0, p, p_pump));
    }
    return c;
}

double p1db_analytic(double g0, double p_pump) {
    return p_pump * (std::pow(10.0, 0.1) - 1.0) / (2.0 * g0);
}

double p1db(const CompressionCurve& curve) {
    if (curve.samples.size() < 2) throw ValidationError("p1db: need at least two samples");
    const double target_db = 10.0 * std::log10(curve.g0) - 1.0;

    std::vector<double> p, g_db;
    for (const auto& [ps, g] : curve.samples) {
        p.push_back(ps);
        g_db.push_back(10.0 * std::log10(g));
    }
    // locate the bracketing segment of the (non-increasing) gain curve
    std::size_t hit = 0;
    bool found = false;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (g_db[i - 1] >= target_db && g_db[i] <= target_db) {
            hit = i;
            found = true;
            break;
        }
    }
    if (!found) throw ValidationError("p1db: curve never crosses the 1 dB compression point");

    Pchip interp(p, g_db);
    double lo = p[hit - 1], hi = p[hit];
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (interp(mid) > target_db) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

void write_compression_csv(const CompressionCurve& curve, std::ostream& os) {
    os << "# g0_linear," << curve.g0 << "\n# pump_power_W," << curve.pump_power << "\n";
    os << "p_signal_W,gain_linear\n";
    char buf[80];
    for (const auto& [p, g] : curve.samples) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", p, g);
        os << buf;
    }
}

CompressionCurve read_compression_csv(std::istream& is) {
    CompressionCurve c;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            std::string key = line.substr(2, comma - 2);
            double v = std::stod(line.substr(comma + 1));
            if (key == "g0_linear") c.g0 = v;
            else if (key == "pump_power_W") c.pump_power = v;
            continue;
        }
        if (line.find("p_signal") == 0) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("bad compression CSV row", 0);
        c.samples.emplace_back(std::stod(line.substr(0, comma)),
                               std::stod(line.substr(comma + 1)));
    }
    if (c.g0 == 0.0 && !c.samples.empty()) c.g0 = c.samples.front().second;
    return c;
}

}  // namespace qxsim
