#pragma once

// Lumped bio-physical model of a capacitive human-body channel.
//
// Canonical wiring (one electrode branch = R_band || C_band in series with
// R_skin || C_skin):
//
//   source(+) -- R_s -- [Tx electrode branch] -- body_tx
//   body_tx -- R_body/2 -- body_feet -- R_body/2 -- body_rx
//   body_tx, body_feet, body_rx -- C_tx_body_earth, C_feet, C_rx_body_earth -- earth
//   tx_ground -- C_tx_ground_body -- body_tx
//   body_rx -- [Rx electrode branch] -- rx_out -- (R_L || C_L + C_rx_ground_body) -- rx_ground
//
// Capacitive return: source(-) = tx_ground, which couples to earth through
// C_tx_return; rx_ground couples to earth through C_rx_return (or the load's
// instrument ground coupling). The output is V(rx_out) - V(rx_ground).
//
// Common ground: tx_ground and rx_ground merge into one instrument ground with
// no return capacitors. The body-to-earth shunts still end on the earth node,
// which has no other connection to the instrument ground.
//
// Differential excitation adds a second Tx electrode branch from source(-) to
// body_tx; differential termination adds a second Rx electrode branch from
// body_rx to the instrument ground.

#include "hbc/circuit.hpp"
#include "hbc/frequency_response.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hbc::model {

inline constexpr double kVacuumPermittivity = 8.854e-12;  // F/m
/// Upper edge of the electro-quasistatic validity band of the lumped model.
inline constexpr double kValidityLimitHz = 1e6;

/// Component values of the body, electrode and return-path model.
struct ModelParameters {
    double source_resistance = 50.0;
    double band_capacitance = 200e-12;
    double band_resistance = 100.0;
    double skin_resistance = 10e3;
    double skin_capacitance = 90e-12;
    double body_resistance = 200.0;
    double feet_capacitance = 9e-12;
    double tx_body_earth_capacitance = 75e-12;
    double rx_body_earth_capacitance = 75e-12;
    double tx_ground_body_capacitance = 300e-15;
    double rx_ground_body_capacitance = 300e-15;
    double tx_return_capacitance = 1.5e-12;
    double rx_return_capacitance = 1.5e-12;

    static ModelParameters defaults() { return {}; }

    /// Throws DomainError naming the first non-positive value.
    void validate() const;
};

enum class LoadKind { probe_10x, probe_1x, wearable, instrument_50ohm, custom };

/// Receiver termination R_L || C_L. A zero capacitance means no shunt
/// capacitor at all. `ground_return`, when set, replaces the receiver's
/// ground-to-earth capacitance: grounded instruments (oscilloscope, VNA)
/// couple to earth far more strongly than a wearable.
struct LoadPreset {
    LoadKind kind = LoadKind::custom;
    double resistance = 10e6;
    double capacitance = 13e-12;
    std::optional<double> ground_return;

    /// Receiver-ground coupling used for the grounded-instrument presets,
    /// fitted to the measured 10x/1x probe channel losses.
    static constexpr double kInstrumentGroundReturn = 270e-12;

    static LoadPreset probe_10x();
    static LoadPreset probe_1x();
    static LoadPreset wearable();
    static LoadPreset instrument_50ohm();
    static LoadPreset custom(double resistance, double capacitance,
                             std::optional<double> ground_return = std::nullopt);
    /// Accepts "probe-10x", "probe-1x", "wearable", "instrument-50ohm".
    static LoadPreset from_name(std::string_view name);

    std::string_view name() const;
    void validate() const;
};

enum class GroundRegime { common_ground, capacitive_return };
enum class Modality { single_ended, differential };

std::string_view to_string(GroundRegime regime);
std::string_view to_string(Modality modality);
GroundRegime parse_ground_regime(std::string_view text);
Modality parse_modality(std::string_view text);

struct ChannelConfig {
    GroundRegime ground = GroundRegime::capacitive_return;
    Modality excitation = Modality::single_ended;
    Modality termination = Modality::single_ended;
    LoadPreset load = LoadPreset::probe_10x();
    ModelParameters params = ModelParameters::defaults();

    /// Throws InvalidConfigError for unsupported regime/modality combinations
    /// and DomainError for non-positive component values.
    void validate() const;
};

/// Named channel setups: "probe-10x", "probe-1x", "wearable",
/// "instrument-50ohm" (capacitive return, single-ended), and
/// "common-ground-sese", "common-ground-dese", "common-ground-dede"
/// (10x probe load).
ChannelConfig channel_preset(std::string_view name);
std::vector<std::string_view> channel_preset_names();

/// Node names used by build_channel.
namespace nodes {
inline constexpr std::string_view kSourceDrive = "tx_drive";
inline constexpr std::string_view kTxGround = "tx_ground";
inline constexpr std::string_view kRxGround = "rx_ground";
inline constexpr std::string_view kCommonGround = "common_ground";
inline constexpr std::string_view kBodyTx = "body_tx";
inline constexpr std::string_view kBodyFeet = "body_feet";
inline constexpr std::string_view kBodyRx = "body_rx";
inline constexpr std::string_view kRxOut = "rx_out";
}  // namespace nodes

/// rel_permittivity * eps0 * area / gap.
double parallel_plate_capacitance(double area_m2, double gap_m, double rel_permittivity);

circuit::Netlist build_channel(const ChannelConfig& config);

/// Sweep of build_channel(config). Frequencies above 1 MHz are accepted; use
/// validity_warning() to report them.
FrequencyResponse channel_loss(const ChannelConfig& config, std::span<const double> frequencies,
                               unsigned threads = 1);

/// Message describing frequencies outside the lumped model's validity band, if any.
std::optional<std::string> validity_warning(std::span<const double> frequencies);

/// 1 / (2*pi*R*C): first-order corner of a resistive termination working
/// against a return capacitance.
double highpass_cutoff(double load_resistance, double return_capacitance);

/// Capacitance a resistive load sees in the capacitive-return loop: the
/// receiver ground return in series with the transmitter return plus all
/// body-to-earth shunts.
double effective_return_capacitance(const ChannelConfig& config);

}  // namespace hbc::model
