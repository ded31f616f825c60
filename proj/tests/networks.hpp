#pragma once

// Random R/C netlists for property tests.

#include "hbc/circuit.hpp"

#include <fmt/format.h>

#include <cstdint>
#include <random>

namespace hbc::testing {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// A random series R, C, R||C or R+C arm between a and b.
inline void add_random_arm(circuit::Netlist& n, std::mt19937_64& rng, const std::string& tag, circuit::NodeId a,
                           circuit::NodeId b) {
    const double r = log_uniform(rng, 10.0, 1e7);
    const double c = log_uniform(rng, 1e-13, 1e-7);
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: n.add_resistor("R" + tag, a, b, r); break;
        case 1: n.add_capacitor("C" + tag, a, b, c); break;
        case 2:
            n.add_resistor("R" + tag, a, b, r);
            n.add_capacitor("C" + tag, a, b, c);
            break;
        default: {
            const auto mid = n.add_node("m" + tag);
            n.add_resistor("R" + tag, a, mid, r);
            n.add_capacitor("C" + tag, mid, b, c);
        }
    }
}

/// Ladder: source at "in", series arms in -> n1 -> ... -> nk, a shunt arm to
/// ground at every ladder node, output at the last node.
inline circuit::Netlist random_ladder(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    circuit::Netlist n;
    const auto g = circuit::Netlist::ground();
    const auto in = n.add_node("in");
    n.add_voltage_source("V", in, g, 1.0);
    const int stages = std::uniform_int_distribution<int>(1, 6)(rng);
    auto prev = in;
    for (int k = 0; k < stages; ++k) {
        const auto node = n.add_node(fmt::format("n{}", k));
        add_random_arm(n, rng, fmt::format("s{}", k), prev, node);
        add_random_arm(n, rng, fmt::format("p{}", k), node, g);
        prev = node;
    }
    n.set_output(prev);
    return n;
}

/// Connected network over `nodes` internal nodes: spanning tree plus random
/// extra arms, each node also shunted to ground. Source drives node 0.
inline circuit::Netlist random_network(std::uint64_t seed, int nodes = 6) {
    std::mt19937_64 rng(seed);
    circuit::Netlist n;
    const auto g = circuit::Netlist::ground();
    std::vector<circuit::NodeId> ids;
    for (int i = 0; i < nodes; ++i) ids.push_back(n.add_node(fmt::format("n{}", i)));
    int arm = 0;
    for (int i = 1; i < nodes; ++i) {
        const int j = std::uniform_int_distribution<int>(0, i - 1)(rng);
        add_random_arm(n, rng, fmt::format("t{}", arm++), ids[j], ids[i]);
    }
    for (int extra = 0; extra < nodes / 2; ++extra) {
        const int a = std::uniform_int_distribution<int>(0, nodes - 1)(rng);
        const int b = std::uniform_int_distribution<int>(0, nodes - 1)(rng);
        if (a != b) add_random_arm(n, rng, fmt::format("x{}", arm++), ids[a], ids[b]);
    }
    for (int i = 1; i < nodes; ++i) add_random_arm(n, rng, fmt::format("g{}", i), ids[i], g);
    n.add_voltage_source("V", ids[0], g, 1.0);
    n.set_output(ids[nodes - 1]);
    return n;
}

}  // namespace hbc::testing
