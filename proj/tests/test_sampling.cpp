#include "hbc/error.hpp"
#include "hbc/sampling.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

using namespace hbc;
using namespace hbc::sampling;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SampleTrace square_trace(double amplitude, double freq, double noise, double rate, double jitter, std::size_t n,
                         std::uint64_t seed) {
    const auto wave = synthesize_square(amplitude, freq, 0.5, noise, (static_cast<double>(n) + 1.0) / rate);
    return sample_signal(wave, rate, jitter, n, seed);
}

}  // namespace

TEST_CASE("square wave levels") {
    const auto w = synthesize_square(1.0, 100e3, 0.5, 0.0, 1e-3);
    CHECK(w.level(1e-6) != w.level(6e-6));
    std::set<double> levels;
    for (int k = 0; k < 10000; ++k) levels.insert(w.level(k * 1.37e-8));
    CHECK(levels.size() == 2);

    double sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) sum += w.level((k + 0.5) * 1e-3 / n);
    CHECK_THAT(sum / n, WithinAbs(0.5, 1e-3));
}

TEST_CASE("square wave preconditions") {
    CHECK_THROWS_AS(synthesize_square(0.0, 1e3, 0.5, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(synthesize_square(1.0, 1e3, 1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(synthesize_square(1.0, 1e3, 0.5, -0.1, 1.0), DomainError);
    CHECK_THROWS_AS(synthesize_square(1.0, -1e3, 0.5, 0.0, 1.0), DomainError);
    const auto w = synthesize_square(1.0, 1e3, 0.5, 0.0, 1.0);
    CHECK_THROWS_AS(sample_signal(w, 1e3, 0.5, 10, 1), DomainError);
    CHECK_THROWS_AS(sample_signal(w, 0.0, 0.0, 10, 1), DomainError);
}

TEST_CASE("synchronous sampling hits one phase") {
    const double f = 100e3;
    const auto w = synthesize_square(1.0, f, 0.5, 0.0, 1.0);
    const auto t = sample_signal(w, f / 4.0, 0.0, 1000, 1);
    for (const auto& s : t.samples()) {
        const double phase = std::fmod(s.t * f, 1.0);
        CHECK(std::min(phase, 1.0 - phase) < 1e-6);
    }
    CHECK(t.jitter_model() == "none");
}

TEST_CASE("sampling is reproducible from the seed") {
    const auto a = square_trace(1.0, 1e6, 0.02, 0.8e6, 0.25, 500, 99);
    const auto b = square_trace(1.0, 1e6, 0.02, 0.8e6, 0.25, 500, 99);
    const auto c = square_trace(1.0, 1e6, 0.02, 0.8e6, 0.25, 500, 100);
    REQUIRE(a.size() == b.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].t == b[i].t);
        CHECK(a[i].v == b[i].v);
        differs = differs || a[i].v != c[i].v;
    }
    CHECK(differs);
    CHECK(a.jitter_model() == "uniform");
    CHECK(a.nominal_rate_hz() == 0.8e6);
}

TEST_CASE("oversampling captures both levels") {
    const auto t = square_trace(1.0, 100e3, 0.0, 1e6, 0.0, 100, 1);
    std::set<double> levels;
    for (const auto& s : t.samples()) levels.insert(s.v);
    CHECK(levels == std::set<double>{0.0, 1.0});
}

TEST_CASE("traces require increasing timestamps") {
    CHECK_THROWS_AS(SampleTrace({{0.0, 1.0}, {0.0, 2.0}}), DomainError);
}

TEST_CASE("difference histogram bookkeeping") {
    const auto t = square_trace(1.0, 1e6, 0.05, 0.8e6, 0.25, 1000, 4);
    const auto h = difference_histogram(t.samples(), 32, 1.5, 0.1);
    CHECK(h.counts.size() == 32);
    CHECK(h.bin_edges.size() == 33);
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == h.source_count);
    CHECK_THAT(h.bin_width(), WithinRel(1.5 / 32, 1e-12));
    CHECK_THROWS_AS(difference_histogram(t.samples(), 7, 1.0, 0.0), DomainError);
}

TEST_CASE("300 mV square sampled below Nyquist") {
    const auto t = square_trace(0.3, 1e6, 0.0, 0.8e6, 0.25, 4000, 12);
    const auto est = estimate_amplitude(t);
    CHECK(std::abs(est.amplitude - 0.3) <= est.bin_width);
    CHECK(est.amplitude > 0.0);
    CHECK(est.spread >= 0.0);
    CHECK(est.histograms_averaged == 10);
}

TEST_CASE("noiseless estimates are within one bin") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (double rate : {0.8e6, 2.3e6, 10e6}) {
            const auto est = estimate_amplitude(square_trace(0.75, 1e6, 0.0, rate, 0.3, 2000, seed));
            CHECK(std::abs(est.amplitude - 0.75) <= est.bin_width);
        }
    }
}

TEST_CASE("1 V square with 20 mV noise at 1 MSPS") {
    double err = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        const auto est = estimate_amplitude(square_trace(1.0, 1e6, 0.02, 1e6, 0.4, 4000, s));
        err += est.amplitude - 1.0;
    }
    CHECK(std::abs(err / seeds) <= 0.05);
}

TEST_CASE("robust to 5% noise") {
    double err = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        err += estimate_amplitude(square_trace(1.0, 1e6, 0.05, 0.8e6, 0.25, 4000, 1000 + s)).amplitude - 1.0;
    }
    CHECK(std::abs(err / seeds) <= 0.05);
}

TEST_CASE("sub-Nyquist matches oversampling") {
    double sub = 0.0;
    double over = 0.0;
    double width = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        const auto a = estimate_amplitude(square_trace(1.0, 1e6, 0.02, 0.8e6, 0.25, 4000, s));
        const auto b = estimate_amplitude(square_trace(1.0, 1e6, 0.02, 10e6, 0.25, 4000, s));
        sub += a.amplitude - 1.0;
        over += b.amplitude - 1.0;
        width = std::max({width, a.bin_width, b.bin_width});
    }
    CHECK(std::abs(sub / seeds - over / seeds) < 2.0 * width);
}

TEST_CASE("estimates are deterministic") {
    const auto t = square_trace(1.0, 1e6, 0.03, 0.8e6, 0.25, 4000, 8);
    const auto a = estimate_amplitude(t);
    const auto b = estimate_amplitude(t);
    CHECK(a.amplitude == b.amplitude);
    CHECK(a.spread == b.spread);
}

TEST_CASE("constant input has no transitions") {
    std::vector<Sample> s;
    for (int k = 0; k < 1000; ++k) s.push_back({k * 1e-6, 1.0});
    try {
        estimate_amplitude(SampleTrace(s));
        FAIL("expected EstimationError");
    } catch (const EstimationError& e) {
        CHECK(e.reason() == EstimationError::Reason::no_transitions);
    }
    // Synchronous sampling of a square looks constant too.
    const auto sync = square_trace(1.0, 100e3, 0.0, 50e3, 0.0, 1000, 1);
    CHECK_THROWS_AS(estimate_amplitude(sync), EstimationError);
}

TEST_CASE("pure noise is rejected") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 0.01);
    std::vector<Sample> s;
    for (int k = 0; k < 4000; ++k) s.push_back({k * 1e-6, g(rng)});
    try {
        estimate_amplitude(SampleTrace(s));
        FAIL("expected EstimationError");
    } catch (const EstimationError& e) {
        CHECK(e.reason() == EstimationError::Reason::all_noise);
    }
}

TEST_CASE("estimator preconditions") {
    const auto t = square_trace(1.0, 1e6, 0.0, 0.8e6, 0.25, 100, 1);
    CHECK_THROWS_AS(estimate_amplitude(t), DomainError);  // too short for 10 repetitions
    EstimatorOptions o;
    o.bins = 4;
    CHECK_THROWS_AS(estimate_amplitude(square_trace(1.0, 1e6, 0.0, 0.8e6, 0.25, 1000, 1), o), DomainError);
    o = {};
    o.repetitions = 2;
    CHECK_NOTHROW(estimate_amplitude(t, o));
}
