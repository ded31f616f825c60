#pragma once

// YAML run configuration: channel setup, parameter overrides, sweep grid,
// receive chain and comparison tolerance. Every quantity carries a unit
// suffix ("13pF", "10Mohm", "5kHz").
//
//   preset: probe-10x            # optional starting point (see channel_preset)
//   channel: {ground: capacitive-return, excitation: single-ended, termination: single-ended}
//   load: {preset: wearable, resistance: 10Mohm, capacitance: 1pF, ground_return: none}
//   model: {source_resistance: 50ohm, feet_capacitance: 9pF, ...}
//   sweep: {start: 10kHz, stop: 1MHz, points_per_decade: 50, threads: 4}
//   chain: [{gain: 12}, {highpass: 5kHz}]
//   deembed: {threshold: 1e-12}
//   compare: {tolerance: 3dB}

#include "hbc/deembed.hpp"
#include "hbc/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hbc::config {

/// Environment variable naming the directory searched for relative config paths.
inline constexpr const char* kConfigDirEnv = "HBC_CONFIG_DIR";

struct SweepGrid {
    double start_hz = 10e3;
    double stop_hz = 1e6;
    int points_per_decade = 50;
    unsigned threads = 1;

    std::vector<double> frequencies() const;
};

struct RunConfig {
    model::ChannelConfig channel = model::channel_preset("probe-10x");
    SweepGrid sweep;
    /// Amplifier gain 12 followed by the default bias high-pass.
    deembed::ReceiveChain chain{deembed::ChainStage::flat_gain(12.0),
                                deembed::ChainStage::highpass(deembed::kDefaultBiasCornerHz)};
    double deembed_threshold = deembed::kDefaultThreshold;
    double compare_tolerance_db = 3.0;
};

/// Parses YAML text. Throws ParseError with the 1-based line and offending
/// key for unknown keys, malformed quantities and invalid combinations.
RunConfig parse_run_config(const std::string& text, const std::string& source = "<config>");

/// Loads a config file. A relative path that does not exist is looked up in
/// $HBC_CONFIG_DIR as well.
RunConfig load_run_config(const std::filesystem::path& path);

std::filesystem::path resolve_config_path(const std::filesystem::path& path);

}  // namespace hbc::config
