#include "qxsim/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qxsim/errors.hpp"

namespace qxsim {

namespace {

constexpr double kDeg = constants::pi / 180.0;

double unit_scale(const std::string& u) {
    if (u == "HZ") return 1.0;
    if (u == "KHZ") return 1e3;
    if (u == "MHZ") return 1e6;
    if (u == "GHZ") return 1e9;
    throw ParseError("unknown frequency unit '" + u + "'", 0);
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return s;
}

}  // namespace

LinearMultiport::LinearMultiport(int n_ports, double z_ref,
                                 std::vector<double> omega_grid,
                                 std::vector<Eigen::MatrixXcd> s_matrices,
                                 std::string name)
    : n_ports_(n_ports), z_ref_(z_ref), name_(std::move(name)), omega_(std::move(omega_grid)) {
    if (omega_.empty() || omega_.size() != s_matrices.size()) {
        throw ValidationError("multiport: grid/matrix size mismatch");
    }
    if (!std::is_sorted(omega_.begin(), omega_.end())) {
        throw ValidationError("multiport: frequency grid must be ascending");
    }
    mag_.resize(omega_.size());
    phase_.resize(omega_.size());
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        const auto& s = s_matrices[i];
        if (s.rows() != n_ports_ || s.cols() != n_ports_) {
            throw ValidationError("multiport: S matrix dimension mismatch");
        }
        mag_[i] = s.cwiseAbs();
        phase_[i].resize(n_ports_, n_ports_);
        for (int r = 0; r < n_ports_; ++r) {
            for (int c = 0; c < n_ports_; ++c) {
                double ph = std::arg(s(r, c));
                if (i > 0) {
                    // unwrap against the previous grid point
                    double prev = phase_[i - 1](r, c);
                    while (ph - prev > constants::pi) ph -= 2.0 * constants::pi;
                    while (ph - prev < -constants::pi) ph += 2.0 * constants::pi;
                }
                phase_[i](r, c) = ph;
            }
        }
    }
}

bool LinearMultiport::covers(double omega) const {
    double w = std::abs(omega);
    return w >= omega_.front() - 1e-9 * omega_.front() &&
           w <= omega_.back() + 1e-9 * omega_.back();
}

Eigen::MatrixXcd LinearMultiport::s_at(double omega) const {
    double w = std::abs(omega);
    if (!covers(omega)) {
        throw BandError("frequency " + std::to_string(w / (2.0 * constants::pi) * 1e-9) +
                        " GHz outside multiport band [" +
                        std::to_string(omega_.front() / (2.0 * constants::pi) * 1e-9) + ", " +
                        std::to_string(omega_.back() / (2.0 * constants::pi) * 1e-9) + "] GHz");
    }
    w = std::clamp(w, omega_.front(), omega_.back());
    auto hi = std::lower_bound(omega_.begin(), omega_.end(), w);
    std::size_t i1 = std::min<std::size_t>(std::distance(omega_.begin(), hi), omega_.size() - 1);
    std::size_t i0 = i1 == 0 ? 0 : i1 - 1;
    double t = (omega_[i1] == omega_[i0]) ? 0.0 : (w - omega_[i0]) / (omega_[i1] - omega_[i0]);

    Eigen::MatrixXcd s(n_ports_, n_ports_);
    for (int r = 0; r < n_ports_; ++r) {
        for (int c = 0; c < n_ports_; ++c) {
            double m = (1.0 - t) * mag_[i0](r, c) + t * mag_[i1](r, c);
            double p = (1.0 - t) * phase_[i0](r, c) + t * phase_[i1](r, c);
            s(r, c) = std::polar(m, p);
        }
    }
    if (omega < 0.0) return s.conjugate();
    return s;
}

LinearMultiport parse_touchstone(const std::string& text, int n_ports_hint, std::string name) {
    std::istringstream is(text);
    std::string line;
    int line_no = 0;

    double freq_scale = 1e9;
    std::string fmt = "MA";
    double z_ref = 50.0;
    bool option_seen = false;
    std::vector<double> numbers;

    while (std::getline(is, line)) {
        ++line_no;
        auto bang = line.find('!');
        if (bang != std::string::npos) line = line.substr(0, bang);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "#") {
            if (option_seen) break;  // second option line: noise section etc.
            option_seen = true;
            std::string u;
            while (ls >> u) {
                std::string U = upper(u);
                if (U == "HZ" || U == "KHZ" || U == "MHZ" || U == "GHZ") {
                    freq_scale = unit_scale(U);
                } else if (U == "S") {
                    // scattering parameters (the only supported type)
                } else if (U == "Y" || U == "Z" || U == "H" || U == "G") {
                    throw ParseError("only S-parameter Touchstone files are supported", line_no);
                } else if (U == "RI" || U == "MA" || U == "DB") {
                    fmt = U;
                } else if (U == "R") {
                    if (!(ls >> z_ref)) throw ParseError("missing reference impedance", line_no);
                } else {
                    throw ParseError("unknown option '" + u + "'", line_no);
                }
            }
            continue;
        }
        // data token(s)
        ls.clear();
        ls.str(line);
        double v;
        while (ls >> v) numbers.push_back(v);
    }

    if (numbers.empty()) throw ParseError("no data in Touchstone input", line_no);

    int n = n_ports_hint;
    if (n <= 0) {
        // Infer: tokens per point = 1 + 2 n^2 must divide the total count.
        for (int guess = 1; guess <= 16; ++guess) {
            std::size_t per = 1 + 2 * static_cast<std::size_t>(guess) * guess;
            if (numbers.size() % per == 0) { n = guess; break; }
        }
        if (n <= 0) throw ParseError("cannot infer port count from data size", line_no);
    }
    std::size_t per_point = 1 + 2 * static_cast<std::size_t>(n) * n;
    if (numbers.size() % per_point != 0) {
        throw ParseError("data size is not a multiple of points for " + std::to_string(n) +
                             " ports",
                         line_no);
    }

    std::vector<double> omega;
    std::vector<Eigen::MatrixXcd> mats;
    std::size_t n_points = numbers.size() / per_point;
    double prev_f = -1.0;
    for (std::size_t p = 0; p < n_points; ++p) {
        const double* d = numbers.data() + p * per_point;
        double f = d[0] * freq_scale;
        if (f <= prev_f) break;  // trailing noise-parameter block
        prev_f = f;
        Eigen::MatrixXcd s(n, n);
        for (int idx = 0; idx < n * n; ++idx) {
            double a = d[1 + 2 * idx], b = d[2 + 2 * idx];
            cplx v;
            if (fmt == "RI") v = cplx(a, b);
            else if (fmt == "MA") v = std::polar(a, b * kDeg);
            else v = std::polar(std::pow(10.0, a / 20.0), b * kDeg);
            // 2-port files store S11 S21 S12 S22; others are row-major.
            int r, c;
            if (n == 2) { r = idx % 2; c = idx / 2; }
            else { r = idx / n; c = idx % n; }
            s(r, c) = v;
        }
        omega.push_back(2.0 * constants::pi * f);
        mats.push_back(std::move(s));
    }

    return LinearMultiport(n, z_ref, std::move(omega), std::move(mats), std::move(name));
}

LinearMultiport load_touchstone(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open Touchstone file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();

    int n = 0;
    auto dot = path.find_last_of('.');
    if (dot != std::string::npos) {
        std::string ext = upper(path.substr(dot + 1));
        if (ext.size() >= 3 && ext.front() == 'S' && ext.back() == 'P') {
            try {
                n = std::stoi(ext.substr(1, ext.size() - 2));
            } catch (const std::exception&) {
                n = 0;
            }
        }
    }
    return parse_touchstone(ss.str(), n, path);
}

void write_touchstone(const LinearMultiport& mp, std::ostream& os) {
    os << "! generated by qxsim\n# GHz S RI R " << mp.z_ref() << "\n";
    char buf[64];
    for (double w : mp.omega_grid()) {
        Eigen::MatrixXcd s = mp.s_at(w);
        std::snprintf(buf, sizeof(buf), "%.12g", w / (2.0 * constants::pi) * 1e-9);
        os << buf;
        int n = mp.n_ports();
        for (int idx = 0; idx < n * n; ++idx) {
            int r, c;
            if (n == 2) { r = idx % 2; c = idx / 2; }
            else { r = idx / n; c = idx % n; }
            std::snprintf(buf, sizeof(buf), " %.12g %.12g", s(r, c).real(), s(r, c).imag());
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace qxsim
