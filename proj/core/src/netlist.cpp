#include "qxsim/netlist.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "qxsim/errors.hpp"

namespace qxsim {

namespace {

// Case-sensitive SI suffixes; 'M' is mega, 'm' is milli.
const std::map<char, double> kSiSuffix = {
    {'f', 1e-15}, {'p', 1e-12}, {'n', 1e-9}, {'u', 1e-6},
    {'m', 1e-3},  {'k', 1e3},   {'M', 1e6},  {'G', 1e9},
};

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        if (tok[0] == '#') break;
        out.push_back(tok);
    }
    return out;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct KeyValues {
    std::unordered_map<std::string, double> kv;
    double get(const std::string& key, double fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }
};

}  // namespace

double parse_si_value(const std::string& token) {
    if (token.empty()) throw ParseError("empty value", 0);
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw ParseError("bad numeric value '" + token + "'", 0);
    }
    if (pos == token.size()) return v;
    if (pos + 1 == token.size()) {
        auto it = kSiSuffix.find(token[pos]);
        if (it != kSiSuffix.end()) return v * it->second;
    }
    throw ParseError("bad value suffix in '" + token + "'", 0);
}

Circuit parse_netlist(const std::string& text, const std::string& base_dir) {
    Circuit c;
    c.node_labels = {"0"};
    std::unordered_map<std::string, NodeId> node_ids{{"0", 0}, {"gnd", 0}, {"GND", 0}};

    auto node_of = [&](const std::string& label) -> NodeId {
        auto it = node_ids.find(label);
        if (it != node_ids.end()) return it->second;
        NodeId id = c.node_count++;
        node_ids.emplace(label, id);
        c.node_labels.push_back(label);
        return id;
    };

    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto tok = tokenize(line);
        if (tok.empty()) continue;
        const std::string& name = tok[0];

        try {
            if (name[0] == 'P' || name[0] == 'p') {
                if (tok.size() < 3) throw ParseError("port line needs two nodes", line_no);
                Port p;
                try {
                    p.index = std::stoi(name.substr(1));
                } catch (const std::exception&) {
                    throw ParseError("bad port name '" + name + "'", line_no);
                }
                p.positive = node_of(tok[1]);
                p.negative = node_of(tok[2]);
                for (std::size_t i = 3; i < tok.size(); ++i) {
                    auto eq = tok[i].find('=');
                    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
                    if (tok[i].substr(0, eq) == "z0") p.z0 = parse_si_value(tok[i].substr(eq + 1));
                    else throw ParseError("unknown port key '" + tok[i].substr(0, eq) + "'", line_no);
                }
                for (const auto& q : c.ports) {
                    if (q.index == p.index) {
                        throw ParseError("duplicate port index " + std::to_string(p.index), line_no);
                    }
                }
                c.ports.push_back(p);
                continue;
            }

            if (name == "X" || name == "x") {
                if (tok.size() < 3) throw ParseError("X line needs a file and nodes", line_no);
                std::string path = tok[1];
                if (!base_dir.empty() && path.front() != '/') path = base_dir + "/" + path;
                auto mp = std::make_shared<LinearMultiport>(load_touchstone(path));
                Element e;
                e.name = "X" + std::to_string(c.elements.size());
                for (std::size_t i = 2; i < tok.size(); ++i) e.nodes.push_back(node_of(tok[i]));
                if (static_cast<int>(e.nodes.size()) != mp->n_ports()) {
                    throw ParseError("X line node count " + std::to_string(e.nodes.size()) +
                                         " != multiport ports " + std::to_string(mp->n_ports()),
                                     line_no);
                }
                e.value = TouchstoneElement{std::move(mp)};
                c.elements.push_back(std::move(e));
                continue;
            }

            if (tok.size() < 4) throw ParseError("element line needs nodes and a value", line_no);
            Element e;
            e.name = name;
            e.nodes = {node_of(tok[1]), node_of(tok[2])};
            double value = parse_si_value(tok[3]);
            KeyValues keys;
            for (std::size_t i = 4; i < tok.size(); ++i) {
                auto eq = tok[i].find('=');
                if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
                keys.kv[tok[i].substr(0, eq)] = parse_si_value(tok[i].substr(eq + 1));
            }

            switch (std::toupper(static_cast<unsigned char>(name[0]))) {
                case 'C':
                    e.value = Capacitor{value, keys.get("tan_delta", 0.0)};
                    break;
                case 'L':
                    e.value = Inductor{value};
                    break;
                case 'R':
                    e.value = Resistor{value};
                    break;
                case 'J':
                    e.value = JosephsonJunction{value};
                    break;
                case 'I':
                case 'V': {
                    Source s;
                    s.kind = std::toupper(static_cast<unsigned char>(name[0])) == 'I'
                                 ? SourceKind::Current
                                 : SourceKind::Voltage;
                    s.amplitude = value;
                    s.omega = 2.0 * constants::pi * keys.get("freq", 0.0);
                    s.phase = keys.get("phase", 0.0);
                    s.source_impedance = keys.get("rs", 0.0);
                    e.value = s;
                    break;
                }
                default:
                    throw ParseError("unknown element kind '" + name + "'", line_no);
            }
            c.elements.push_back(std::move(e));
        } catch (const ParseError& pe) {
            if (pe.line() > 0) throw;
            throw ParseError(pe.raw_message(), line_no);
        }
    }

    if (c.elements.empty()) throw ParseError("no elements", line_no ? line_no : 1);
    c.validate();
    return c;
}

Circuit load_netlist(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open netlist '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    std::string dir = ".";
    auto slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash);
    Circuit c = parse_netlist(ss.str(), dir);
    c.name = path;
    return c;
}

std::string emit_netlist(const Circuit& c) {
    std::ostringstream os;
    for (const auto& e : c.elements) {
        if (e.is<Capacitor>()) {
            const auto& v = e.as<Capacitor>();
            os << e.name << ' ' << c.node_label(e.nodes[0]) << ' ' << c.node_label(e.nodes[1])
               << ' ' << format_value(v.c);
            if (v.tan_delta != 0.0) os << " tan_delta=" << format_value(v.tan_delta);
        } else if (e.is<Inductor>()) {
            os << e.name << ' ' << c.node_label(e.nodes[0]) << ' ' << c.node_label(e.nodes[1])
               << ' ' << format_value(e.as<Inductor>().l);
        } else if (e.is<Resistor>()) {
            os << e.name << ' ' << c.node_label(e.nodes[0]) << ' ' << c.node_label(e.nodes[1])
               << ' ' << format_value(e.as<Resistor>().r);
        } else if (e.is<JosephsonJunction>()) {
            os << e.name << ' ' << c.node_label(e.nodes[0]) << ' ' << c.node_label(e.nodes[1])
               << ' ' << format_value(e.as<JosephsonJunction>().ic);
        } else if (e.is<Source>()) {
            const auto& s = e.as<Source>();
            os << e.name << ' ' << c.node_label(e.nodes[0]) << ' ' << c.node_label(e.nodes[1])
               << ' ' << format_value(s.amplitude);
            if (s.omega != 0.0) os << " freq=" << format_value(s.omega / (2.0 * constants::pi));
            if (s.phase != 0.0) os << " phase=" << format_value(s.phase);
            if (s.source_impedance != 0.0) os << " rs=" << format_value(s.source_impedance);
        } else if (e.is<TouchstoneElement>()) {
            os << "X " << e.as<TouchstoneElement>().data->name();
            for (NodeId n : e.nodes) os << ' ' << c.node_label(n);
        }
        os << '\n';
    }
    for (const auto& p : c.ports) {
        os << 'P' << p.index << ' ' << c.node_label(p.positive) << ' '
           << c.node_label(p.negative);
        if (p.z0 != 50.0) os << " z0=" << format_value(p.z0);
        os << '\n';
    }
    return os.str();
}

}  // namespace qxsim
