#include "hbc/circuit.hpp"

#include "hbc/error.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <thread>

namespace hbc::circuit {

Netlist::Netlist() {
    names_.emplace_back(kGroundName);
    index_.emplace(std::string(kGroundName), 0);
}

NodeId Netlist::add_node(std::string_view name) {
    if (name.empty()) throw TopologyError("node name must not be empty");
    if (index_.contains(std::string(name))) {
        throw TopologyError(fmt::format("duplicate node '{}'", name));
    }
    const std::size_t id = names_.size();
    names_.emplace_back(name);
    index_.emplace(std::string(name), id);
    return NodeId{id};
}

NodeId Netlist::ensure_node(std::string_view name) {
    if (auto found = find_node(name)) return *found;
    return add_node(name);
}

std::optional<NodeId> Netlist::find_node(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return NodeId{it->second};
}

NodeId Netlist::node(std::string_view name) const {
    if (auto found = find_node(name)) return *found;
    throw TopologyError(fmt::format("unknown node '{}'", name));
}

const std::string& Netlist::node_name(NodeId id) const {
    check_node(id);
    return names_[id.value];
}

void Netlist::check_node(NodeId id) const {
    if (id.value >= names_.size()) {
        throw TopologyError(fmt::format("node index {} out of range", id.value));
    }
}

void Netlist::add_element(Element e) {
    check_node(e.pos);
    check_node(e.neg);
    if (e.pos == e.neg) {
        throw TopologyError(fmt::format("element '{}' connects node '{}' to itself", e.name, names_[e.pos.value]));
    }
    if (find_element(e.name) != nullptr) {
        throw TopologyError(fmt::format("duplicate element '{}'", e.name));
    }
    elements_.push_back(std::move(e));
}

void Netlist::add_resistor(std::string name, NodeId a, NodeId b, double ohms) {
    if (!(ohms > 0.0) || !std::isfinite(ohms)) {
        throw DomainError(fmt::format("resistor '{}' must be > 0 ohm, got {}", name, ohms));
    }
    add_element({ElementKind::resistor, std::move(name), a, b, ohms});
}

void Netlist::add_capacitor(std::string name, NodeId a, NodeId b, double farads) {
    if (!(farads > 0.0) || !std::isfinite(farads)) {
        throw DomainError(fmt::format("capacitor '{}' must be > 0 F, got {}", name, farads));
    }
    add_element({ElementKind::capacitor, std::move(name), a, b, farads});
}

void Netlist::add_voltage_source(std::string name, NodeId pos, NodeId neg, double volts) {
    if (source_index_) {
        throw TopologyError(fmt::format("netlist already has source '{}'", elements_[*source_index_].name));
    }
    if (!(volts >= 0.0) || !std::isfinite(volts)) {
        throw DomainError(fmt::format("source '{}' amplitude must be >= 0, got {}", name, volts));
    }
    add_element({ElementKind::voltage_source, std::move(name), pos, neg, volts});
    source_index_ = elements_.size() - 1;
}

void Netlist::set_output(NodeId node) { set_output(node, ground()); }

void Netlist::set_output(NodeId pos, NodeId neg) {
    check_node(pos);
    check_node(neg);
    if (pos == neg) throw TopologyError("output terminals must differ");
    output_ = OutputPort{pos, neg};
}

const Element* Netlist::find_element(std::string_view name) const {
    auto it = std::find_if(elements_.begin(), elements_.end(), [&](const Element& e) { return e.name == name; });
    return it == elements_.end() ? nullptr : &*it;
}

const Element& Netlist::source() const {
    if (!source_index_) throw TopologyError("netlist has no voltage source");
    return elements_[*source_index_];
}

const OutputPort& Netlist::output() const {
    if (!output_) throw TopologyError("netlist has no output");
    return *output_;
}

void Netlist::validate() const {
    (void)source();
    (void)output();

    // Union-find over every element, source included: a component without
    // ground has an undetermined potential.
    std::vector<std::size_t> parent(names_.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : elements_) parent[find(e.pos.value)] = find(e.neg.value);
    const std::size_t root = find(0);
    for (std::size_t i = 1; i < names_.size(); ++i) {
        if (find(i) != root) {
            throw SingularCircuitError(names_[i],
                                       fmt::format("node '{}' has no element path to ground", names_[i]));
        }
    }
}

std::map<std::string, Complex> AcSolution::by_name(const Netlist& netlist) const {
    std::map<std::string, Complex> out;
    for (std::size_t i = 0; i < node_voltages.size(); ++i) {
        out.emplace(netlist.node_name(NodeId{i}), node_voltages[i]);
    }
    return out;
}

namespace {

Complex admittance(const Element& e, double omega) {
    switch (e.kind) {
        case ElementKind::resistor: return {1.0 / e.value, 0.0};
        case ElementKind::capacitor: return {0.0, omega * e.value};
        case ElementKind::voltage_source: break;
    }
    return {};
}

}  // namespace

Complex element_current(const Element& element, const AcSolution& solution) {
    if (element.kind == ElementKind::voltage_source) return solution.source_current;
    const double omega = 2.0 * std::numbers::pi * solution.frequency_hz;
    return admittance(element, omega) * (solution.voltage(element.pos) - solution.voltage(element.neg));
}

double kcl_residual(const Netlist& netlist, const AcSolution& solution) {
    std::vector<Complex> imbalance(netlist.node_count(), Complex{});
    double largest = 0.0;
    for (const auto& e : netlist.elements()) {
        const Complex i = element_current(e, solution);
        imbalance[e.pos.value] += i;
        imbalance[e.neg.value] -= i;
        largest = std::max(largest, std::abs(i));
    }
    if (largest == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t n = 1; n < imbalance.size(); ++n) worst = std::max(worst, std::abs(imbalance[n]));
    return worst / largest;
}

AcSolution solve_ac(const Netlist& netlist, double frequency_hz) {
    if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
        throw DomainError(fmt::format("frequency must be > 0, got {}", frequency_hz));
    }
    netlist.validate();

    const auto nodes = static_cast<Eigen::Index>(netlist.node_count() - 1);
    const Eigen::Index n = nodes + 1;  // + source branch current
    const Eigen::Index src = nodes;
    const double omega = 2.0 * std::numbers::pi * frequency_hz;

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    auto row = [](NodeId id) { return static_cast<Eigen::Index>(id.value) - 1; };

    for (const auto& e : netlist.elements()) {
        const Eigen::Index p = row(e.pos);
        const Eigen::Index q = row(e.neg);
        if (e.kind == ElementKind::voltage_source) {
            if (p >= 0) {
                a(p, src) += 1.0;
                a(src, p) += 1.0;
            }
            if (q >= 0) {
                a(q, src) -= 1.0;
                a(src, q) -= 1.0;
            }
            b(src) = e.value;
            continue;
        }
        const Complex y = admittance(e, omega);
        if (p >= 0) a(p, p) += y;
        if (q >= 0) a(q, q) += y;
        if (p >= 0 && q >= 0) {
            a(p, q) -= y;
            a(q, p) -= y;
        }
    }

    // Row then column equilibration: pF capacitors at kHz next to ohm-range
    // resistors spread the entries over many decades.
    Eigen::VectorXd row_scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = a.row(i).cwiseAbs().maxCoeff();
        row_scale(i) = m > 0.0 ? 1.0 / m : 1.0;
    }
    Eigen::MatrixXcd scaled = row_scale.asDiagonal() * a;
    Eigen::VectorXd col_scale(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double m = scaled.col(j).cwiseAbs().maxCoeff();
        col_scale(j) = m > 0.0 ? 1.0 / m : 1.0;
    }
    scaled = scaled * col_scale.asDiagonal();
    const Eigen::VectorXcd rhs = row_scale.asDiagonal() * b;

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(scaled);
    if (!lu.isInvertible()) {
        const Eigen::Index bad = lu.permutationQ().indices()(lu.rank());
        const std::string name =
            bad == src ? netlist.source().name : netlist.node_name(NodeId{static_cast<std::size_t>(bad) + 1});
        throw SingularCircuitError(name, fmt::format("nodal system is singular at node '{}'", name));
    }
    Eigen::VectorXcd y = lu.solve(rhs);
    // One step of iterative refinement.
    const Eigen::VectorXcd r = rhs - scaled * y;
    y += lu.solve(r);
    const Eigen::VectorXcd x = col_scale.asDiagonal() * y;

    AcSolution sol;
    sol.frequency_hz = frequency_hz;
    sol.node_voltages.assign(netlist.node_count(), Complex{});
    for (Eigen::Index i = 0; i < nodes; ++i) sol.node_voltages[static_cast<std::size_t>(i) + 1] = x(i);
    sol.source_current = x(src);
    sol.kcl_residual = kcl_residual(netlist, sol);
    return sol;
}

Complex transfer(const Netlist& netlist, double frequency_hz) {
    const double amplitude = netlist.source().value;
    if (amplitude == 0.0) throw DomainError("transfer is undefined for a zero-amplitude source");
    const AcSolution sol = solve_ac(netlist, frequency_hz);
    const OutputPort& out = netlist.output();
    return (sol.voltage(out.pos) - sol.voltage(out.neg)) / amplitude;
}

namespace {

[[noreturn]] void rethrow_at(double f, std::exception_ptr error) {
    const std::string where = fmt::format("at {} Hz: ", f);
    try {
        std::rethrow_exception(error);
    } catch (const SingularCircuitError& e) {
        throw SingularCircuitError(e.node(), where + e.what());
    } catch (const DomainError& e) {
        throw DomainError(where + e.what());
    } catch (const TopologyError& e) {
        throw TopologyError(where + e.what());
    } catch (const Error& e) {
        throw Error(where + e.what());
    }
}

}  // namespace

FrequencyResponse sweep(const Netlist& netlist, std::span<const double> frequencies, unsigned threads) {
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        if (!(frequencies[i] > 0.0) || (i > 0 && !(frequencies[i] > frequencies[i - 1]))) {
            throw DomainError("sweep frequencies must be strictly increasing and > 0");
        }
    }
    netlist.validate();

    const std::size_t count = frequencies.size();
    std::vector<Complex> values(count);
    std::vector<std::exception_ptr> errors(count);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                values[i] = transfer(netlist, frequencies[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        work(0, count);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t begin = 0; begin < count; begin += chunk) {
            pool.emplace_back(work, begin, std::min(count, begin + chunk));
        }
    }

    FrequencyResponse response;
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) rethrow_at(frequencies[i], errors[i]);
        response.push_back(ResponsePoint::from_transfer(frequencies[i], values[i]));
    }
    return response;
}

}  // namespace hbc::circuit
