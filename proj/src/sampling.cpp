#include "hbc/sampling.hpp"

#include "hbc/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace hbc::sampling {

SampleTrace::SampleTrace(std::vector<Sample> samples, double nominal_rate_hz, std::string jitter_model)
    : samples_(std::move(samples)), nominal_rate_hz_(nominal_rate_hz), jitter_model_(std::move(jitter_model)) {
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        if (!(samples_[i].t > samples_[i - 1].t)) {
            throw DomainError(fmt::format("sample timestamps must be strictly increasing (index {})", i));
        }
    }
}

double SquareWave::level(double t) const {
    double phase = std::fmod(t * frequency_hz, 1.0);
    if (phase < 0.0) phase += 1.0;
    return phase < duty ? amplitude : 0.0;
}

SquareWave synthesize_square(double amplitude, double frequency_hz, double duty, double noise_sigma,
                             double duration_s) {
    if (!(amplitude > 0.0)) throw DomainError(fmt::format("amplitude must be > 0, got {}", amplitude));
    if (!(frequency_hz > 0.0)) throw DomainError(fmt::format("frequency must be > 0, got {}", frequency_hz));
    if (!(duty > 0.0 && duty < 1.0)) throw DomainError(fmt::format("duty must be in (0, 1), got {}", duty));
    if (!(noise_sigma >= 0.0)) throw DomainError(fmt::format("noise sigma must be >= 0, got {}", noise_sigma));
    if (!(duration_s > 0.0)) throw DomainError(fmt::format("duration must be > 0, got {}", duration_s));
    return SquareWave{amplitude, frequency_hz, duty, noise_sigma, duration_s};
}

SampleTrace sample_signal(const SquareWave& signal, double rate_hz, double jitter_fraction, std::size_t n,
                          std::uint64_t seed) {
    if (!(rate_hz > 0.0)) throw DomainError(fmt::format("sample rate must be > 0, got {}", rate_hz));
    if (!(jitter_fraction >= 0.0 && jitter_fraction < 0.5)) {
        throw DomainError(fmt::format("jitter fraction must be in [0, 0.5), got {}", jitter_fraction));
    }
    const double period = 1.0 / rate_hz;
    if (n > 0 && (static_cast<double>(n - 1) + jitter_fraction) * period > signal.duration_s) {
        throw DomainError(fmt::format("{} samples at {} Hz exceed the signal duration of {} s", n, rate_hz,
                                      signal.duration_s));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-jitter_fraction, jitter_fraction);
    std::normal_distribution<double> noise(0.0, signal.noise_sigma > 0.0 ? signal.noise_sigma : 1.0);

    std::vector<Sample> samples;
    samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double offset = jitter_fraction > 0.0 ? jitter(rng) : 0.0;
        const double t = (static_cast<double>(k) + offset) * period;
        double v = signal.level(t);
        if (signal.noise_sigma > 0.0) v += noise(rng);
        samples.push_back({t, v});
    }
    return SampleTrace(std::move(samples), rate_hz, jitter_fraction > 0.0 ? "uniform" : "none");
}

DifferenceHistogram difference_histogram(std::span<const Sample> samples, std::size_t bins, double upper,
                                         double zero_exclusion) {
    if (bins < 8) throw DomainError(fmt::format("at least 8 bins are required, got {}", bins));
    if (!(upper > 0.0)) throw DomainError(fmt::format("histogram upper edge must be > 0, got {}", upper));

    DifferenceHistogram h;
    h.counts.assign(bins, 0);
    h.bin_edges.resize(bins + 1);
    const double width = upper / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = width * static_cast<double>(i);
    h.bin_edges.back() = upper;

    for (std::size_t k = 1; k < samples.size(); ++k) {
        const double d = std::abs(samples[k].v - samples[k - 1].v);
        if (d < zero_exclusion || d > upper) continue;
        const auto bin = std::min(bins - 1, static_cast<std::size_t>(d / width));
        ++h.counts[bin];
        ++h.source_count;
    }
    return h;
}

namespace {

struct PeakRun {
    std::size_t first = 0;
    std::size_t last = 0;
};

// Contiguous run of bins whose count exceeds half the dominant peak.
std::optional<PeakRun> half_maximum_run(const DifferenceHistogram& h) {
    const auto peak_it = std::max_element(h.counts.begin(), h.counts.end());
    if (peak_it == h.counts.end() || *peak_it == 0) return std::nullopt;
    const auto peak = static_cast<std::size_t>(peak_it - h.counts.begin());
    const double half = static_cast<double>(*peak_it) / 2.0;
    PeakRun run{peak, peak};
    while (run.first > 0 && static_cast<double>(h.counts[run.first - 1]) > half) --run.first;
    while (run.last + 1 < h.counts.size() && static_cast<double>(h.counts[run.last + 1]) > half) ++run.last;
    return run;
}

}  // namespace

AmplitudeEstimate estimate_amplitude(const SampleTrace& trace, const EstimatorOptions& options) {
    if (options.bins < 8) throw DomainError(fmt::format("at least 8 bins are required, got {}", options.bins));
    if (options.repetitions < 1) throw DomainError("repetitions must be >= 1");
    const std::size_t required = 2 * options.repetitions * kMinSegmentSamples;
    if (trace.size() < required) {
        throw DomainError(fmt::format("trace has {} samples; {} repetitions need at least {}", trace.size(),
                                      options.repetitions, required));
    }
    if (options.zero_exclusion && !(*options.zero_exclusion >= 0.0)) {
        throw DomainError("zero exclusion must be >= 0");
    }

    const auto samples = trace.samples();
    double max_diff = 0.0;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        max_diff = std::max(max_diff, std::abs(samples[k].v - samples[k - 1].v));
    }
    const double exclusion = options.zero_exclusion.value_or(0.1 * max_diff);
    if (max_diff == 0.0 || max_diff < exclusion) {
        throw EstimationError(EstimationError::Reason::no_transitions,
                              "no consecutive difference exceeds the zero exclusion threshold");
    }

    const std::size_t reps = options.repetitions;
    const std::size_t seg = samples.size() / reps;
    // Bin holding the exclusion threshold: a peak run reaching down to it is
    // the tail of the zero cluster, not a transition peak.
    const double width = max_diff / static_cast<double>(options.bins);
    const auto floor_bin = std::min(options.bins - 1, static_cast<std::size_t>(exclusion / width));

    // Over the whole trace a transition peak sits apart from the zero cluster:
    // some bin between the exclusion bin and the peak run drops to a quarter
    // of the peak. Pure noise decays smoothly from the exclusion threshold.
    {
        const auto all = difference_histogram(samples, options.bins, max_diff, exclusion);
        const auto run = half_maximum_run(all);
        bool separated = false;
        if (run) {
            const std::size_t peak = *std::max_element(all.counts.begin(), all.counts.end());
            for (std::size_t b = floor_bin + 1; b < run->first && !separated; ++b) {
                separated = 4 * all.counts[b] <= peak;
            }
        }
        if (!separated) {
            throw EstimationError(EstimationError::Reason::all_noise,
                                  "no difference peak separates from the zero cluster");
        }
    }

    double amp_sum = 0.0;
    double spread_sum = 0.0;
    std::size_t used = 0;
    std::size_t with_transitions = 0;
    std::size_t noise_like = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        const std::size_t begin = r * seg;
        const std::size_t end = r + 1 == reps ? samples.size() : begin + seg;
        const auto h = difference_histogram(samples.subspan(begin, end - begin), options.bins, max_diff, exclusion);
        if (h.source_count == 0) continue;
        ++with_transitions;
        const auto run = half_maximum_run(h);
        if (!run || run->first <= floor_bin) {
            ++noise_like;
            continue;
        }
        amp_sum += 0.5 * (h.bin_edges[run->first] + h.bin_edges[run->last + 1]);
        spread_sum += h.bin_edges[run->last + 1] - h.bin_edges[run->first];
        ++used;
    }

    if (with_transitions == 0) {
        throw EstimationError(EstimationError::Reason::no_transitions,
                              "no repetition captured a transition above the zero exclusion threshold");
    }
    if (used == 0 || 2 * noise_like > with_transitions) {
        throw EstimationError(EstimationError::Reason::all_noise,
                              "no difference peak separates from the zero cluster");
    }
    AmplitudeEstimate est;
    est.amplitude = amp_sum / static_cast<double>(used);
    est.spread = spread_sum / static_cast<double>(used);
    est.histograms_averaged = used;
    est.bin_width = width;
    return est;
}

}  // namespace hbc::sampling
