#include "hbc/deembed.hpp"

#include "hbc/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace hbc::deembed {
namespace {

void check_value(const ChainStage& s) {
    if (!(s.value > 0.0) || !std::isfinite(s.value)) {
        throw DomainError(fmt::format("{} must be > 0, got {}",
                                      s.kind == ChainStage::Kind::flat_gain ? "stage gain" : "high-pass corner",
                                      s.value));
    }
}

// Stage response in dB and degrees, so that dividing out a stage is exact in
// the stored representation.
struct Polar {
    double db = 0.0;
    double deg = 0.0;
};

Polar polar(const ChainStage& s, double f) {
    if (s.kind == ChainStage::Kind::flat_gain) return {20.0 * std::log10(s.value), 0.0};
    const double x = f / s.value;
    return {20.0 * std::log10(x) - 10.0 * std::log10(1.0 + x * x),
            90.0 - std::atan(x) * 180.0 / std::numbers::pi};
}

}  // namespace

ChainStage ChainStage::flat_gain(double gain) {
    ChainStage s{Kind::flat_gain, gain};
    check_value(s);
    return s;
}

ChainStage ChainStage::highpass(double corner_hz) {
    ChainStage s{Kind::highpass, corner_hz};
    check_value(s);
    return s;
}

Complex ChainStage::response(double frequency_hz) const {
    check_value(*this);
    if (kind == Kind::flat_gain) return {value, 0.0};
    const Complex jx(0.0, frequency_hz / value);
    return jx / (1.0 + jx);
}

Complex chain_response(const ReceiveChain& chain, double frequency_hz) {
    if (!(frequency_hz > 0.0)) throw DomainError(fmt::format("frequency must be > 0, got {}", frequency_hz));
    Complex h(1.0, 0.0);
    for (const auto& s : chain) h *= s.response(frequency_hz);
    return h;
}

FrequencyResponse deembed(const FrequencyResponse& measured, const ReceiveChain& chain, double threshold) {
    if (chain.empty()) throw DomainError("receive chain is empty");
    if (!(threshold >= 0.0)) throw DomainError(fmt::format("threshold must be >= 0, got {}", threshold));
    for (const auto& s : chain) check_value(s);

    std::vector<ResponsePoint> out;
    out.reserve(measured.size());
    for (const auto& p : measured) {
        ResponsePoint q = p;
        for (const auto& s : chain) {
            const double mag = std::abs(s.response(p.frequency_hz));
            if (!(mag > threshold)) {
                throw DeembedError(fmt::format("receive-chain stage magnitude {:g} at {:g} Hz is below the threshold {:g}",
                                               mag, p.frequency_hz, threshold));
            }
            const Polar r = polar(s, p.frequency_hz);
            q.loss_db -= r.db;
            if (std::isfinite(q.loss_db)) q.phase_deg = wrap_degrees(q.phase_deg - r.deg);
        }
        out.push_back(q);
    }
    return FrequencyResponse(std::move(out));
}

FrequencyResponse embed(const FrequencyResponse& channel, const ReceiveChain& chain) {
    for (const auto& s : chain) check_value(s);
    std::vector<ResponsePoint> out;
    out.reserve(channel.size());
    for (const auto& p : channel) {
        ResponsePoint q = p;
        for (const auto& s : chain) {
            const Polar r = polar(s, p.frequency_hz);
            q.loss_db += r.db;
            if (std::isfinite(q.loss_db)) q.phase_deg = wrap_degrees(q.phase_deg + r.deg);
        }
        out.push_back(q);
    }
    return FrequencyResponse(std::move(out));
}

}  // namespace hbc::deembed
