#include "hbc/model.hpp"

#include "hbc/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <utility>

namespace hbc::model {
namespace {

void require_positive(double value, std::string_view what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(fmt::format("{} must be > 0, got {}", what, value));
    }
}

double series(double a, double b) { return a * b / (a + b); }

}  // namespace

void ModelParameters::validate() const {
    const std::pair<double, std::string_view> fields[] = {
        {source_resistance, "source_resistance"},
        {band_capacitance, "band_capacitance"},
        {band_resistance, "band_resistance"},
        {skin_resistance, "skin_resistance"},
        {skin_capacitance, "skin_capacitance"},
        {body_resistance, "body_resistance"},
        {feet_capacitance, "feet_capacitance"},
        {tx_body_earth_capacitance, "tx_body_earth_capacitance"},
        {rx_body_earth_capacitance, "rx_body_earth_capacitance"},
        {tx_ground_body_capacitance, "tx_ground_body_capacitance"},
        {rx_ground_body_capacitance, "rx_ground_body_capacitance"},
        {tx_return_capacitance, "tx_return_capacitance"},
        {rx_return_capacitance, "rx_return_capacitance"},
    };
    for (const auto& [value, name] : fields) require_positive(value, name);
}

LoadPreset LoadPreset::probe_10x() { return {LoadKind::probe_10x, 10e6, 13e-12, kInstrumentGroundReturn}; }
LoadPreset LoadPreset::probe_1x() { return {LoadKind::probe_1x, 1e6, 79e-12, kInstrumentGroundReturn}; }
LoadPreset LoadPreset::wearable() { return {LoadKind::wearable, 10e6, 1e-12, std::nullopt}; }
LoadPreset LoadPreset::instrument_50ohm() {
    return {LoadKind::instrument_50ohm, 50.0, 0.0, kInstrumentGroundReturn};
}

LoadPreset LoadPreset::custom(double resistance, double capacitance, std::optional<double> ground_return) {
    LoadPreset p{LoadKind::custom, resistance, capacitance, ground_return};
    p.validate();
    return p;
}

LoadPreset LoadPreset::from_name(std::string_view name) {
    if (name == "probe-10x") return probe_10x();
    if (name == "probe-1x") return probe_1x();
    if (name == "wearable") return wearable();
    if (name == "instrument-50ohm") return instrument_50ohm();
    throw InvalidConfigError(fmt::format("unknown load preset '{}'", name));
}

std::string_view LoadPreset::name() const {
    switch (kind) {
        case LoadKind::probe_10x: return "probe-10x";
        case LoadKind::probe_1x: return "probe-1x";
        case LoadKind::wearable: return "wearable";
        case LoadKind::instrument_50ohm: return "instrument-50ohm";
        case LoadKind::custom: return "custom";
    }
    return "custom";
}

void LoadPreset::validate() const {
    require_positive(resistance, "load resistance");
    if (!(capacitance >= 0.0) || !std::isfinite(capacitance)) {
        throw DomainError(fmt::format("load capacitance must be >= 0, got {}", capacitance));
    }
    if (ground_return) require_positive(*ground_return, "load ground return capacitance");
}

std::string_view to_string(GroundRegime regime) {
    return regime == GroundRegime::common_ground ? "common-ground" : "capacitive-return";
}

std::string_view to_string(Modality modality) {
    return modality == Modality::single_ended ? "single-ended" : "differential";
}

GroundRegime parse_ground_regime(std::string_view text) {
    if (text == "common-ground") return GroundRegime::common_ground;
    if (text == "capacitive-return") return GroundRegime::capacitive_return;
    throw InvalidConfigError(fmt::format("unknown ground regime '{}'", text));
}

Modality parse_modality(std::string_view text) {
    if (text == "single-ended" || text == "se") return Modality::single_ended;
    if (text == "differential" || text == "de") return Modality::differential;
    throw InvalidConfigError(fmt::format("unknown modality '{}'", text));
}

void ChannelConfig::validate() const {
    if (ground == GroundRegime::capacitive_return) {
        if (excitation != Modality::single_ended || termination != Modality::single_ended) {
            throw InvalidConfigError("capacitive-return channels support only single-ended excitation and termination");
        }
    } else if (excitation == Modality::single_ended && termination == Modality::differential) {
        throw InvalidConfigError("common-ground channels support SE/SE, DE/SE and DE/DE only");
    }
    params.validate();
    load.validate();
}

ChannelConfig channel_preset(std::string_view name) {
    ChannelConfig c;
    if (name == "probe-10x" || name == "probe-1x" || name == "wearable" || name == "instrument-50ohm") {
        c.load = LoadPreset::from_name(name);
        return c;
    }
    c.ground = GroundRegime::common_ground;
    c.load = LoadPreset::probe_10x();
    if (name == "common-ground-sese") return c;
    c.excitation = Modality::differential;
    if (name == "common-ground-dese") return c;
    c.termination = Modality::differential;
    if (name == "common-ground-dede") return c;
    throw InvalidConfigError(fmt::format("unknown channel preset '{}'", name));
}

std::vector<std::string_view> channel_preset_names() {
    return {"probe-10x",          "probe-1x",           "wearable",          "instrument-50ohm",
            "common-ground-sese", "common-ground-dese", "common-ground-dede"};
}

double parallel_plate_capacitance(double area_m2, double gap_m, double rel_permittivity) {
    require_positive(area_m2, "area");
    require_positive(gap_m, "gap");
    if (!(rel_permittivity >= 1.0) || !std::isfinite(rel_permittivity)) {
        throw DomainError(fmt::format("relative permittivity must be >= 1, got {}", rel_permittivity));
    }
    return rel_permittivity * kVacuumPermittivity * area_m2 / gap_m;
}

namespace {

using circuit::Netlist;
using circuit::NodeId;

// Electrode interface (R_band || C_band) in series with skin (R_skin || C_skin).
void add_electrode_branch(Netlist& n, const ModelParameters& p, std::string_view tag, NodeId outer,
                          NodeId inner) {
    const NodeId skin = n.add_node(fmt::format("{}_skin", tag));
    n.add_resistor(fmt::format("R_band_{}", tag), outer, skin, p.band_resistance);
    n.add_capacitor(fmt::format("C_band_{}", tag), outer, skin, p.band_capacitance);
    n.add_resistor(fmt::format("R_skin_{}", tag), skin, inner, p.skin_resistance);
    n.add_capacitor(fmt::format("C_skin_{}", tag), skin, inner, p.skin_capacitance);
}

}  // namespace

circuit::Netlist build_channel(const ChannelConfig& config) {
    config.validate();
    const ModelParameters& p = config.params;
    const bool common = config.ground == GroundRegime::common_ground;

    Netlist n;
    const NodeId earth = Netlist::ground();
    const NodeId drive = n.add_node(nodes::kSourceDrive);
    const NodeId tx_ground = n.add_node(common ? nodes::kCommonGround : nodes::kTxGround);
    const NodeId rx_ground = common ? tx_ground : n.add_node(nodes::kRxGround);
    const NodeId pad = n.add_node("tx_pad");
    const NodeId body_tx = n.add_node(nodes::kBodyTx);
    const NodeId feet = n.add_node(nodes::kBodyFeet);
    const NodeId body_rx = n.add_node(nodes::kBodyRx);
    const NodeId out = n.add_node(nodes::kRxOut);

    n.add_voltage_source("V_tx", drive, tx_ground, 1.0);
    n.add_resistor("R_s", drive, pad, p.source_resistance);
    add_electrode_branch(n, p, "tx", pad, body_tx);
    if (config.excitation == Modality::differential) {
        add_electrode_branch(n, p, "tx_ref", tx_ground, body_tx);
    }

    n.add_resistor("R_body_tx", body_tx, feet, p.body_resistance / 2.0);
    n.add_resistor("R_body_rx", feet, body_rx, p.body_resistance / 2.0);
    n.add_capacitor("C_feet", feet, earth, p.feet_capacitance);
    n.add_capacitor("C_tx_body_earth", body_tx, earth, p.tx_body_earth_capacitance);
    n.add_capacitor("C_rx_body_earth", body_rx, earth, p.rx_body_earth_capacitance);
    n.add_capacitor("C_tx_ground_body", tx_ground, body_tx, p.tx_ground_body_capacitance);

    add_electrode_branch(n, p, "rx", body_rx, out);
    if (config.termination == Modality::differential) {
        add_electrode_branch(n, p, "rx_ref", body_rx, rx_ground);
    }

    const LoadPreset& load = config.load;
    n.add_resistor("R_L", out, rx_ground, load.resistance);
    // Receiver ground-to-body coupling is small and lumps into the load capacitor.
    if (load.capacitance > 0.0) {
        n.add_capacitor("C_L", out, rx_ground, load.capacitance + p.rx_ground_body_capacitance);
    }

    if (!common) {
        n.add_capacitor("C_ret_tx", tx_ground, earth, p.tx_return_capacitance);
        n.add_capacitor("C_ret_rx", rx_ground, earth, load.ground_return.value_or(p.rx_return_capacitance));
    }
    n.set_output(out, rx_ground);
    n.validate();
    return n;
}

FrequencyResponse channel_loss(const ChannelConfig& config, std::span<const double> frequencies, unsigned threads) {
    return circuit::sweep(build_channel(config), frequencies, threads);
}

std::optional<std::string> validity_warning(std::span<const double> frequencies) {
    std::size_t above = 0;
    double highest = 0.0;
    for (double f : frequencies) {
        if (f > kValidityLimitHz * (1.0 + 1e-12)) {
            ++above;
            highest = std::max(highest, f);
        }
    }
    if (above == 0) return std::nullopt;
    return fmt::format(
        "{} frequencies above 1 MHz (up to {:g} Hz) lie outside the band the lumped model was validated for",
        above, highest);
}

double highpass_cutoff(double load_resistance, double return_capacitance) {
    require_positive(load_resistance, "load resistance");
    require_positive(return_capacitance, "return capacitance");
    return 1.0 / (2.0 * std::numbers::pi * load_resistance * return_capacitance);
}

double effective_return_capacitance(const ChannelConfig& config) {
    config.validate();
    if (config.ground != GroundRegime::capacitive_return) {
        throw InvalidConfigError("effective return capacitance is defined for capacitive-return channels only");
    }
    const ModelParameters& p = config.params;
    const double rx_return = config.load.ground_return.value_or(p.rx_return_capacitance);
    const double tx_side = p.tx_return_capacitance + p.tx_body_earth_capacitance + p.rx_body_earth_capacitance +
                           p.feet_capacitance;
    return series(rx_return, tx_side);
}

}  // namespace hbc::model
