#include "hbc/run_config.hpp"

#include "hbc/error.hpp"
#include "hbc/units.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hbc::config {
namespace {

using units::Dimension;

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& message) const {
        const auto mark = node.Mark();
        throw ParseError(source_, mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 0, key, message);
    }

    void require_map(const YAML::Node& node, const std::string& key) const {
        if (!node.IsMap()) fail(node, key, "expected a mapping");
    }

    std::string scalar(const YAML::Node& node, const std::string& key) const {
        if (!node.IsScalar()) fail(node, key, "expected a scalar value");
        return node.Scalar();
    }

    double quantity(const YAML::Node& node, const std::string& key, Dimension dim) const {
        const std::string text = scalar(node, key);
        double v = 0.0;
        try {
            v = units::parse_quantity(text, dim);
        } catch (const DomainError& e) {
            fail(node, key, fmt::format("'{}': {}", text, e.what()));
        }
        if (!(v > 0.0)) fail(node, key, fmt::format("value must be > 0, got '{}'", text));
        return v;
    }

    long integer(const YAML::Node& node, const std::string& key, long min) const {
        const std::string text = scalar(node, key);
        long v = 0;
        std::istringstream s(text);
        if (!(s >> v) || !s.eof() || v < min) fail(node, key, fmt::format("expected an integer >= {}, got '{}'", min, text));
        return v;
    }

    // Calls handlers[key] for every entry; unknown keys are rejected.
    void each(const YAML::Node& map, const std::string& section,
              const std::map<std::string, std::function<void(const YAML::Node&, const std::string&)>>& handlers) const {
        require_map(map, section);
        for (const auto& entry : map) {
            const std::string key = scalar(entry.first, section);
            const std::string path = section.empty() ? key : section + "." + key;
            const auto it = handlers.find(key);
            if (it == handlers.end()) fail(entry.first, path, "unknown key");
            it->second(entry.second, path);
        }
    }

    template <class F>
    void wrap(const YAML::Node& node, const std::string& key, F&& f) const {
        try {
            f();
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(node, key, e.what());
        }
    }

private:
    std::string source_;
};

}  // namespace

std::vector<double> SweepGrid::frequencies() const { return log_grid(start_hz, stop_hz, points_per_decade); }

RunConfig parse_run_config(const std::string& text, const std::string& source) {
    const Reader r(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(source, static_cast<std::size_t>(e.mark.line) + 1, "", e.msg);
    }

    RunConfig cfg;
    if (root.IsNull()) return cfg;
    r.require_map(root, "");

    // The preset sets the base; every other section overrides it.
    if (const auto preset = root["preset"]) {
        r.wrap(preset, "preset", [&] { cfg.channel = model::channel_preset(r.scalar(preset, "preset")); });
    }

    auto& ch = cfg.channel;
    auto& p = ch.params;
    const auto farads = [&](double& field) {
        return [&r, &field](const YAML::Node& n, const std::string& k) { field = r.quantity(n, k, Dimension::farad); };
    };
    const auto ohms = [&](double& field) {
        return [&r, &field](const YAML::Node& n, const std::string& k) { field = r.quantity(n, k, Dimension::ohm); };
    };

    r.each(root, "", {
        {"preset", [](const YAML::Node&, const std::string&) {}},
        {"channel", [&](const YAML::Node& n, const std::string& k) {
             r.each(n, k, {
                 {"ground", [&](const YAML::Node& v, const std::string& key) {
                      r.wrap(v, key, [&] { ch.ground = model::parse_ground_regime(r.scalar(v, key)); });
                  }},
                 {"excitation", [&](const YAML::Node& v, const std::string& key) {
                      r.wrap(v, key, [&] { ch.excitation = model::parse_modality(r.scalar(v, key)); });
                  }},
                 {"termination", [&](const YAML::Node& v, const std::string& key) {
                      r.wrap(v, key, [&] { ch.termination = model::parse_modality(r.scalar(v, key)); });
                  }},
             });
         }},
        {"load", [&](const YAML::Node& n, const std::string& k) {
             // Apply the preset first regardless of key order.
             if (const auto lp = n.IsMap() ? n["preset"] : YAML::Node()) {
                 r.wrap(lp, k + ".preset", [&] { ch.load = model::LoadPreset::from_name(r.scalar(lp, k + ".preset")); });
             }
             r.each(n, k, {
                 {"preset", [](const YAML::Node&, const std::string&) {}},
                 {"resistance", [&](const YAML::Node& v, const std::string& key) {
                      ch.load.resistance = r.quantity(v, key, Dimension::ohm);
                      ch.load.kind = model::LoadKind::custom;
                  }},
                 {"capacitance", [&](const YAML::Node& v, const std::string& key) {
                      // 0 F means no shunt capacitor
                      const std::string text = r.scalar(v, key);
                      double c = 0.0;
                      try {
                          c = units::parse_quantity(text, Dimension::farad);
                      } catch (const DomainError& e) {
                          r.fail(v, key, fmt::format("'{}': {}", text, e.what()));
                      }
                      if (!(c >= 0.0)) r.fail(v, key, "value must be >= 0");
                      ch.load.capacitance = c;
                      ch.load.kind = model::LoadKind::custom;
                  }},
                 {"ground_return", [&](const YAML::Node& v, const std::string& key) {
                      if (r.scalar(v, key) == "none") {
                          ch.load.ground_return.reset();
                      } else {
                          ch.load.ground_return = r.quantity(v, key, Dimension::farad);
                      }
                  }},
             });
         }},
        {"model", [&](const YAML::Node& n, const std::string& k) {
             r.each(n, k, {
                 {"source_resistance", ohms(p.source_resistance)},
                 {"band_capacitance", farads(p.band_capacitance)},
                 {"band_resistance", ohms(p.band_resistance)},
                 {"skin_resistance", ohms(p.skin_resistance)},
                 {"skin_capacitance", farads(p.skin_capacitance)},
                 {"body_resistance", ohms(p.body_resistance)},
                 {"feet_capacitance", farads(p.feet_capacitance)},
                 {"tx_body_earth_capacitance", farads(p.tx_body_earth_capacitance)},
                 {"rx_body_earth_capacitance", farads(p.rx_body_earth_capacitance)},
                 {"tx_ground_body_capacitance", farads(p.tx_ground_body_capacitance)},
                 {"rx_ground_body_capacitance", farads(p.rx_ground_body_capacitance)},
                 {"tx_return_capacitance", farads(p.tx_return_capacitance)},
                 {"rx_return_capacitance", farads(p.rx_return_capacitance)},
             });
         }},
        {"sweep", [&](const YAML::Node& n, const std::string& k) {
             auto& s = cfg.sweep;
             r.each(n, k, {
                 {"start", [&](const YAML::Node& v, const std::string& key) { s.start_hz = r.quantity(v, key, Dimension::hertz); }},
                 {"stop", [&](const YAML::Node& v, const std::string& key) { s.stop_hz = r.quantity(v, key, Dimension::hertz); }},
                 {"points_per_decade", [&](const YAML::Node& v, const std::string& key) {
                      s.points_per_decade = static_cast<int>(r.integer(v, key, 1));
                  }},
                 {"threads", [&](const YAML::Node& v, const std::string& key) {
                      s.threads = static_cast<unsigned>(r.integer(v, key, 1));
                  }},
             });
             if (!(s.stop_hz >= s.start_hz)) r.fail(n, k, "stop must not be below start");
         }},
        {"chain", [&](const YAML::Node& n, const std::string& k) {
             if (!n.IsSequence() || n.size() == 0) r.fail(n, k, "expected a non-empty list of stages");
             cfg.chain.clear();
             for (std::size_t i = 0; i < n.size(); ++i) {
                 const std::string key = fmt::format("{}[{}]", k, i);
                 const YAML::Node stage = n[i];
                 if (!stage.IsMap() || stage.size() != 1) r.fail(stage, key, "expected one of {gain: X} or {highpass: F}");
                 r.each(stage, key, {
                     {"gain", [&](const YAML::Node& v, const std::string& kk) {
                          cfg.chain.push_back(deembed::ChainStage::flat_gain(r.quantity(v, kk, Dimension::dimensionless)));
                      }},
                     {"highpass", [&](const YAML::Node& v, const std::string& kk) {
                          cfg.chain.push_back(deembed::ChainStage::highpass(r.quantity(v, kk, Dimension::hertz)));
                      }},
                 });
             }
         }},
        {"deembed", [&](const YAML::Node& n, const std::string& k) {
             r.each(n, k, {
                 {"threshold", [&](const YAML::Node& v, const std::string& key) {
                      cfg.deembed_threshold = r.quantity(v, key, Dimension::dimensionless);
                  }},
             });
         }},
        {"compare", [&](const YAML::Node& n, const std::string& k) {
             r.each(n, k, {
                 {"tolerance", [&](const YAML::Node& v, const std::string& key) {
                      cfg.compare_tolerance_db = r.quantity(v, key, Dimension::decibel);
                  }},
             });
         }},
    });

    r.wrap(root, "channel", [&] { ch.validate(); });
    return cfg;
}

std::filesystem::path resolve_config_path(const std::filesystem::path& path) {
    if (path.is_relative() && !std::filesystem::exists(path)) {
        if (const char* dir = std::getenv(kConfigDirEnv); dir && *dir) {
            const auto candidate = std::filesystem::path(dir) / path;
            if (std::filesystem::exists(candidate)) return candidate;
        }
    }
    return path;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const auto resolved = resolve_config_path(path);
    std::ifstream in(resolved);
    if (!in) throw ParseError(path.string(), 0, "", "cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), resolved.string());
}

}  // namespace hbc::config
