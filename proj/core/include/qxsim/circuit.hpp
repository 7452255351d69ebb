#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qxsim/constants.hpp"
#include "qxsim/touchstone.hpp"

namespace qxsim {

/// Node index; 0 is always ground.
using NodeId = int;

struct Capacitor {
    double c = 0.0;          // farads
    double tan_delta = 0.0;  // dielectric loss tangent, in [0, 1)
};

struct Inductor {
    double l = 0.0;  // henries
};

struct Resistor {
    double r = 0.0;  // ohms
};

/// Lossless nonlinear inductor, I = Ic sin(phi), V = (Phi0/2pi) dphi/dt.
struct JosephsonJunction {
    double ic = 0.0;  // amperes
};

/// Measured linear multiport; terminal nodes are ground-referenced, one per
/// multiport port, in the element's node list.
struct TouchstoneElement {
    std::shared_ptr<const LinearMultiport> data;
};

enum class SourceKind { Current, Voltage };

/// Independent sinusoidal source. Current sources are Norton style (parallel
/// source impedance when nonzero), voltage sources Thevenin (series).
struct Source {
    SourceKind kind = SourceKind::Current;
    double amplitude = 0.0;         // amperes (Current) or volts (Voltage), peak
    double omega = 0.0;             // rad/s
    double phase = 0.0;             // radians
    double source_impedance = 0.0;  // ohms; 0 means ideal
};

using ElementValue = std::variant<Capacitor, Inductor, Resistor, JosephsonJunction,
                                  TouchstoneElement, Source>;

struct Element {
    std::string name;
    std::vector<NodeId> nodes;  // 2 entries, except TouchstoneElement (one per port)
    ElementValue value;

    template <typename T>
    bool is() const { return std::holds_alternative<T>(value); }
    template <typename T>
    const T& as() const { return std::get<T>(value); }
};

struct Port {
    int index = 0;      // 1-based, unique, contiguous
    NodeId positive = 0;
    NodeId negative = 0;
    double z0 = 50.0;   // real reference impedance
};

/// Immutable-after-construction circuit graph. Builders and the netlist
/// parser run validate() before handing one out; analyses may share a
/// Circuit across threads freely.
struct Circuit {
    std::string name;
    int node_count = 1;  // including ground (node 0)
    std::vector<Element> elements;
    std::vector<Port> ports;
    std::vector<std::string> node_labels;  // optional; [i] names node i

    /// Throws ValidationError on any invariant violation: bad element values,
    /// terminals referencing nonexistent nodes, subcircuits floating from
    /// ground, or non-contiguous / duplicate port indices.
    void validate() const;

    const Port& port(int index) const;
    std::string node_label(NodeId n) const;
};

/// Copy with every capacitor's loss tangent replaced (CLI global override).
Circuit with_tan_delta(const Circuit& c, double tan_delta);

/// Copy with `mp` included as a frequency-dependent multiport across the given
/// ground-referenced nodes (one node per multiport port).
Circuit attach_multiport(const Circuit& c, std::shared_ptr<const LinearMultiport> mp,
                         const std::vector<NodeId>& node_map);

}  // namespace qxsim
