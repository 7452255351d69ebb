#include "qxsim/circuit.hpp"

#include <algorithm>
#include <numeric>

#include "qxsim/errors.hpp"

namespace qxsim {

namespace {

struct UnionFind {
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
    std::vector<int> parent;
};

void check_positive(const std::string& name, const char* what, double v) {
    if (!(v > 0.0)) {
        throw ValidationError("element " + name + ": " + what + " must be > 0");
    }
}

}  // namespace

void Circuit::validate() const {
    if (node_count < 1) throw ValidationError("circuit has no nodes");
    if (elements.empty()) throw ValidationError("no elements");

    auto check_node = [&](const std::string& owner, NodeId n) {
        if (n < 0 || n >= node_count) {
            throw ValidationError(owner + " references nonexistent node " +
                                  std::to_string(n));
        }
    };

    UnionFind uf(node_count);
    for (const auto& e : elements) {
        if (e.nodes.size() < 2 && !e.is<TouchstoneElement>()) {
            throw ValidationError("element " + e.name + " needs two terminals");
        }
        for (NodeId n : e.nodes) check_node("element " + e.name, n);

        if (e.is<Capacitor>()) {
            const auto& c = e.as<Capacitor>();
            check_positive(e.name, "C", c.c);
            if (c.tan_delta < 0.0 || c.tan_delta >= 1.0) {
                throw ValidationError("element " + e.name + ": tan_delta must be in [0, 1)");
            }
        } else if (e.is<Inductor>()) {
            check_positive(e.name, "L", e.as<Inductor>().l);
        } else if (e.is<Resistor>()) {
            check_positive(e.name, "R", e.as<Resistor>().r);
        } else if (e.is<JosephsonJunction>()) {
            check_positive(e.name, "Ic", e.as<JosephsonJunction>().ic);
        } else if (e.is<TouchstoneElement>()) {
            const auto& t = e.as<TouchstoneElement>();
            if (!t.data) throw ValidationError("element " + e.name + ": missing multiport data");
            if (static_cast<int>(e.nodes.size()) != t.data->n_ports()) {
                throw ValidationError("element " + e.name + ": node count " +
                                      std::to_string(e.nodes.size()) + " != multiport ports " +
                                      std::to_string(t.data->n_ports()));
            }
        } else if (e.is<Source>()) {
            const auto& s = e.as<Source>();
            if (s.source_impedance < 0.0) {
                throw ValidationError("element " + e.name + ": negative source impedance");
            }
        }

        if (e.is<TouchstoneElement>()) {
            // Every terminal is ground-referenced through the multiport.
            for (NodeId n : e.nodes) uf.unite(n, 0);
        } else {
            uf.unite(e.nodes[0], e.nodes[1]);
        }
    }

    for (int n = 0; n < node_count; ++n) {
        if (uf.find(n) != uf.find(0)) {
            throw ValidationError("node " + node_label(n) +
                                  " is not connected to ground (floating subcircuit)");
        }
    }

    std::vector<int> seen;
    for (const auto& p : ports) {
        check_node("port " + std::to_string(p.index), p.positive);
        check_node("port " + std::to_string(p.index), p.negative);
        if (!(p.z0 > 0.0)) {
            throw ValidationError("port " + std::to_string(p.index) + ": Z0 must be > 0");
        }
        if (std::find(seen.begin(), seen.end(), p.index) != seen.end()) {
            throw ValidationError("duplicate port index " + std::to_string(p.index));
        }
        seen.push_back(p.index);
    }
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (seen[i] != static_cast<int>(i) + 1) {
            throw ValidationError("port indices must be contiguous starting at 1");
        }
    }
}

const Port& Circuit::port(int index) const {
    for (const auto& p : ports) {
        if (p.index == index) return p;
    }
    throw ValidationError("no port with index " + std::to_string(index));
}

std::string Circuit::node_label(NodeId n) const {
    if (n >= 0 && n < static_cast<int>(node_labels.size()) && !node_labels[n].empty()) {
        return node_labels[n];
    }
    return std::to_string(n);
}

Circuit with_tan_delta(const Circuit& c, double tan_delta) {
    Circuit out = c;
    for (auto& e : out.elements) {
        if (auto* cap = std::get_if<Capacitor>(&e.value)) cap->tan_delta = tan_delta;
    }
    return out;
}

Circuit attach_multiport(const Circuit& c, std::shared_ptr<const LinearMultiport> mp,
                         const std::vector<NodeId>& node_map) {
    if (!mp) throw ValidationError("attach_multiport: null multiport");
    if (static_cast<int>(node_map.size()) != mp->n_ports()) {
        throw ValidationError("attach_multiport: node map size " +
                              std::to_string(node_map.size()) + " != multiport ports " +
                              std::to_string(mp->n_ports()));
    }
    Circuit out = c;
    Element e;
    e.name = "X" + std::to_string(out.elements.size());
    e.nodes = node_map;
    e.value = TouchstoneElement{std::move(mp)};
    out.elements.push_back(std::move(e));
    out.validate();
    return out;
}

}  // namespace qxsim
