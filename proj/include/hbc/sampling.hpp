#pragma once

// Histogram-of-consecutive-differences amplitude estimation for square waves
// sampled at arbitrary (including sub-Nyquist) rates, plus synthetic signal
// and trace generation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hbc::sampling {

struct Sample {
    double t = 0.0;  ///< seconds
    double v = 0.0;  ///< volts
};

/// Time-stamped voltage samples; timestamps strictly increasing.
class SampleTrace {
public:
    SampleTrace() = default;
    explicit SampleTrace(std::vector<Sample> samples, double nominal_rate_hz = 0.0,
                         std::string jitter_model = "unknown");

    std::span<const Sample> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }

    double nominal_rate_hz() const noexcept { return nominal_rate_hz_; }
    const std::string& jitter_model() const noexcept { return jitter_model_; }

private:
    std::vector<Sample> samples_;
    double nominal_rate_hz_ = 0.0;
    std::string jitter_model_;
};

/// Unipolar square wave switching between 0 and `amplitude`: high for the
/// first `duty` fraction of each period, starting at t = 0. Additive gaussian
/// noise with `noise_sigma` is applied when the wave is sampled.
struct SquareWave {
    double amplitude = 1.0;
    double frequency_hz = 1.0;
    double duty = 0.5;
    double noise_sigma = 0.0;
    double duration_s = 1.0;

    /// Noise-free level at time t (any real t; the wave is periodic).
    double level(double t) const;
};

SquareWave synthesize_square(double amplitude, double frequency_hz, double duty, double noise_sigma,
                             double duration_s);

/// Samples t_k = k/rate + U(-jitter, +jitter)/rate for k = 0..n-1 and adds the
/// wave's noise. Identical arguments give identical traces.
SampleTrace sample_signal(const SquareWave& signal, double rate_hz, double jitter_fraction, std::size_t n,
                          std::uint64_t seed);

/// Uniform histogram of |v[k+1] - v[k]| over [0, upper].
struct DifferenceHistogram {
    std::vector<double> bin_edges;  ///< counts.size() + 1 edges
    std::vector<std::size_t> counts;
    std::size_t source_count = 0;  ///< differences binned (after zero exclusion)

    double bin_width() const { return bin_edges.size() < 2 ? 0.0 : bin_edges[1] - bin_edges[0]; }
};

/// Histogram of absolute consecutive differences >= zero_exclusion over [0, upper].
DifferenceHistogram difference_histogram(std::span<const Sample> samples, std::size_t bins, double upper,
                                         double zero_exclusion);

struct EstimatorOptions {
    std::size_t bins = 64;
    /// Differences below this are the "no transition" cluster. Defaults to 10% of max |difference|.
    std::optional<double> zero_exclusion;
    std::size_t repetitions = 10;
};

struct AmplitudeEstimate {
    double amplitude = 0.0;  ///< volts
    double spread = 0.0;     ///< width of the half-maximum peak run, volts
    std::size_t histograms_averaged = 0;
    double bin_width = 0.0;
};

/// Minimum number of samples per repetition segment.
inline constexpr std::size_t kMinSegmentSamples = 16;

/// Splits the trace into `repetitions` contiguous segments, histograms each
/// segment's consecutive differences, takes the midpoint of the half-maximum
/// run around the dominant peak, and averages over segments.
AmplitudeEstimate estimate_amplitude(const SampleTrace& trace, const EstimatorOptions& options = {});

}  // namespace hbc::sampling
