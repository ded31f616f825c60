#pragma once

// Receive-chain response (flat amplifier gain, first-order bias high-pass)
// and its removal from measured channel curves.

#include "hbc/frequency_response.hpp"

#include <vector>

namespace hbc::deembed {

/// Corner assumed for the amplifier bias network when none is given.
inline constexpr double kDefaultBiasCornerHz = 5e3;
/// Smallest chain magnitude that may be divided out.
inline constexpr double kDefaultThreshold = 1e-12;

struct ChainStage {
    enum class Kind { flat_gain, highpass };

    Kind kind = Kind::flat_gain;
    double value = 1.0;  ///< gain (flat_gain) or corner in Hz (highpass)

    static ChainStage flat_gain(double gain);
    static ChainStage highpass(double corner_hz);

    /// Complex response of this stage at `frequency_hz`.
    Complex response(double frequency_hz) const;
};

using ReceiveChain = std::vector<ChainStage>;

/// Product of the stage responses. An empty chain is 1.
Complex chain_response(const ReceiveChain& chain, double frequency_hz);

/// measured / chain at every point; the frequency grid is kept.
/// Throws DomainError for an empty chain and DeembedError when any stage
/// magnitude falls below `threshold`.
FrequencyResponse deembed(const FrequencyResponse& measured, const ReceiveChain& chain,
                          double threshold = kDefaultThreshold);

/// channel * chain at every point.
FrequencyResponse embed(const FrequencyResponse& channel, const ReceiveChain& chain);

}  // namespace hbc::deembed
