#pragma once

// Grounded linear R/C circuits with a single independent voltage source,
// solved in the frequency domain by augmented complex nodal analysis.

#include "hbc/frequency_response.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hbc::circuit {

/// Index of a node in its Netlist. Ground is always index 0.
struct NodeId {
    std::size_t value = 0;

    friend auto operator<=>(NodeId, NodeId) = default;
};

enum class ElementKind { resistor, capacitor, voltage_source };

struct Element {
    ElementKind kind = ElementKind::resistor;
    std::string name;
    NodeId pos;
    NodeId neg;
    double value = 0.0;  ///< ohms, farads or volts
};

/// Output pickup: V(pos) - V(neg). Single-ended outputs use neg == ground.
struct OutputPort {
    NodeId pos;
    NodeId neg;
};

class Netlist {
public:
    static constexpr std::string_view kGroundName = "gnd";

    Netlist();

    static constexpr NodeId ground() noexcept { return NodeId{0}; }

    /// Adds a new node; throws TopologyError if the name is taken.
    NodeId add_node(std::string_view name);
    /// Returns the node with this name, creating it if needed.
    NodeId ensure_node(std::string_view name);
    std::optional<NodeId> find_node(std::string_view name) const;
    /// Throws TopologyError when no such node exists.
    NodeId node(std::string_view name) const;

    void add_resistor(std::string name, NodeId a, NodeId b, double ohms);
    void add_capacitor(std::string name, NodeId a, NodeId b, double farads);
    /// The single excitation; V(pos) - V(neg) = volts.
    void add_voltage_source(std::string name, NodeId pos, NodeId neg, double volts);

    void set_output(NodeId node);
    void set_output(NodeId pos, NodeId neg);

    std::size_t node_count() const noexcept { return names_.size(); }
    const std::string& node_name(NodeId id) const;
    std::span<const Element> elements() const noexcept { return elements_; }
    const Element* find_element(std::string_view name) const;

    const Element& source() const;
    const OutputPort& output() const;
    bool has_output() const noexcept { return output_.has_value(); }

    /// Throws TopologyError unless exactly one source and an output exist,
    /// and SingularCircuitError when some node has no element path to ground.
    void validate() const;

private:
    void add_element(Element e);
    void check_node(NodeId id) const;

    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<Element> elements_;
    std::optional<std::size_t> source_index_;
    std::optional<OutputPort> output_;
};

/// Node voltages of one AC solve.
struct AcSolution {
    double frequency_hz = 0.0;
    std::vector<Complex> node_voltages;  ///< indexed by NodeId::value; ground is 0
    /// Current through the source from its + terminal to its - terminal.
    Complex source_current;
    /// Worst KCL imbalance over non-ground nodes, relative to the largest branch current.
    double kcl_residual = 0.0;

    Complex voltage(NodeId id) const { return node_voltages.at(id.value); }
    std::map<std::string, Complex> by_name(const Netlist& netlist) const;
};

/// Solves the circuit at `frequency_hz` (> 0).
AcSolution solve_ac(const Netlist& netlist, double frequency_hz);

/// Current through a passive element flowing from `pos` to `neg`.
Complex element_current(const Element& element, const AcSolution& solution);

/// Recomputes the relative KCL residual of a solution.
double kcl_residual(const Netlist& netlist, const AcSolution& solution);

/// V(output) / V(source).
Complex transfer(const Netlist& netlist, double frequency_hz);

/// transfer() at every frequency (strictly increasing, > 0). Solves may be
/// spread across `threads` workers; the result is ordered by frequency.
FrequencyResponse sweep(const Netlist& netlist, std::span<const double> frequencies, unsigned threads = 1);

}  // namespace hbc::circuit
