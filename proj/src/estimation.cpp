#include "hbc/estimation.hpp"

#include "hbc/error.hpp"

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

namespace hbc::estimation {

double return_loss_ratio(double expt_capacitance, double return_capacitance, double load_capacitance) {
    const double cg = expt_capacitance + return_capacitance / 2.0;
    return cg / (load_capacitance + cg);
}

double body_time_constant(double series_resistance, double body_capacitance, double load_capacitance) {
    return series_resistance * (body_capacitance + load_capacitance);
}

namespace {

double rms(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

FitResult fit_return_capacitance(std::span<const ReturnCapMeasurement> measurements, double load_capacitance) {
    if (!(load_capacitance > 0.0)) {
        throw DomainError(fmt::format("load capacitance must be > 0, got {}", load_capacitance));
    }
    for (const auto& m : measurements) {
        if (!(m.expt_capacitance >= 0.0) || !std::isfinite(m.expt_capacitance)) {
            throw DomainError(fmt::format("C_expt must be >= 0, got {}", m.expt_capacitance));
        }
        if (!(m.loss_ratio > 0.0 && m.loss_ratio < 1.0)) {
            throw DomainError(fmt::format("loss ratio must be in (0, 1), got {}", m.loss_ratio));
        }
    }

    // Average duplicates; work in units of C_L.
    std::map<double, std::pair<double, int>> groups;
    for (const auto& m : measurements) {
        auto& [sum, count] = groups[m.expt_capacitance];
        sum += m.loss_ratio;
        ++count;
    }
    if (groups.size() < 2) {
        throw FitError(FitError::Reason::insufficient_data,
                       fmt::format("need at least 2 distinct C_expt values, got {}", groups.size()));
    }
    std::vector<double> x;
    std::vector<double> r;
    for (const auto& [c, acc] : groups) {
        x.push_back(c / load_capacitance);
        r.push_back(acc.first / acc.second);
    }

    // Closed form per point: r/(1-r) = x + h, so each point gives h = r/(1-r) - x;
    // the linear least-squares h is their mean. Used to seed the bracket.
    double h_linear = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) h_linear += r[i] / (1.0 - r[i]) - x[i];
    h_linear /= static_cast<double>(x.size());

    // d/dh of sum (r - g(h))^2 with g = (x+h)/(1+x+h).
    auto gradient = [&](double h) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double denom = 1.0 + x[i] + h;
            const double g = (x[i] + h) / denom;
            s += (r[i] - g) / (denom * denom);
        }
        return -2.0 * s;
    };

    const double g0 = gradient(0.0);
    if (!(g0 < 0.0)) {
        throw FitError(FitError::Reason::no_positive_solution,
                       "loss data is inconsistent with any positive return capacitance");
    }
    double hi = std::max(h_linear, 1e-6);
    double g_hi = gradient(hi);
    double lo = 0.0;
    double g_lo = g0;
    for (int i = 0; i < 200 && !(g_hi > 0.0); ++i) {
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        g_hi = gradient(hi);
    }
    if (!(g_hi > 0.0)) {
        throw FitError(FitError::Reason::no_positive_solution, "return capacitance fit did not converge");
    }
    if (g_lo == 0.0) hi = lo;

    double h = lo;
    if (hi != lo) {
        std::uintmax_t iterations = 200;
        const auto [a, b] = boost::math::tools::toms748_solve(gradient, lo, hi, g_lo, g_hi,
                                                              boost::math::tools::eps_tolerance<double>(52),
                                                              iterations);
        h = 0.5 * (a + b);
    }

    FitResult result;
    result.estimate = 2.0 * h * load_capacitance;
    for (const auto& m : measurements) {
        result.per_point_residuals.push_back(
            m.loss_ratio - return_loss_ratio(m.expt_capacitance, result.estimate, load_capacitance));
    }
    result.residual_rms = rms(result.per_point_residuals);
    return result;
}

FitResult fit_body_ground_capacitance(std::span<const TimeConstantMeasurement> measurements,
                                      double load_capacitance) {
    if (!(load_capacitance >= 0.0)) {
        throw DomainError(fmt::format("load capacitance must be >= 0, got {}", load_capacitance));
    }
    if (measurements.empty()) {
        throw FitError(FitError::Reason::insufficient_data, "need at least one time-constant measurement");
    }
    double num = 0.0;
    double den = 0.0;
    for (const auto& m : measurements) {
        if (!(m.series_resistance > 0.0) || !(m.time_constant > 0.0)) {
            throw DomainError(fmt::format("R_ext and tau must be > 0, got ({}, {})", m.series_resistance,
                                          m.time_constant));
        }
        num += m.series_resistance * (m.time_constant - m.series_resistance * load_capacitance);
        den += m.series_resistance * m.series_resistance;
    }
    const double estimate = num / den;
    if (!(estimate > 0.0)) {
        throw FitError(FitError::Reason::negative_estimate,
                       fmt::format("fitted body capacitance {} F is not positive; check C_L", estimate));
    }
    FitResult result;
    result.estimate = estimate;
    for (const auto& m : measurements) {
        const double predicted = body_time_constant(m.series_resistance, estimate, load_capacitance);
        result.per_point_residuals.push_back((m.time_constant - predicted) / m.time_constant);
    }
    result.residual_rms = rms(result.per_point_residuals);
    return result;
}

double extract_time_constant(const sampling::SampleTrace& trace, const TimeConstantOptions& options) {
    if (!(options.plateau_fraction > 0.0 && options.plateau_fraction < 0.5) ||
        !(options.window_low > 0.0 && options.window_low < options.window_high && options.window_high < 1.0)) {
        throw DomainError("invalid time-constant extraction options");
    }
    const auto s = trace.samples();
    if (s.size() < 10) {
        throw EstimationError(EstimationError::Reason::no_settling, "trace too short to contain a settling segment");
    }

    const std::size_t tail = std::max<std::size_t>(2, static_cast<std::size_t>(options.plateau_fraction *
                                                                                static_cast<double>(s.size())));
    const std::size_t tail_begin = s.size() - tail;
    double plateau = 0.0;
    for (std::size_t i = tail_begin; i < s.size(); ++i) plateau += s[i].v;
    plateau /= static_cast<double>(tail);
    double var = 0.0;
    for (std::size_t i = tail_begin; i < s.size(); ++i) var += (s[i].v - plateau) * (s[i].v - plateau);
    const double noise = std::sqrt(var / static_cast<double>(tail - 1));

    const double baseline = s.front().v;
    const double step = plateau - baseline;
    const double floor = std::max(5.0 * noise, 1e-12 * std::max(std::abs(plateau), std::abs(baseline)));
    if (!(std::abs(step) > floor)) {
        throw EstimationError(EstimationError::Reason::no_settling, "no step toward a plateau was detected");
    }
    // The tail must be flat: its two halves agree to a small fraction of the step.
    const std::size_t half = tail / 2;
    double first_half = 0.0;
    double second_half = 0.0;
    for (std::size_t i = 0; i < half; ++i) first_half += s[tail_begin + i].v;
    for (std::size_t i = half; i < tail; ++i) second_half += s[tail_begin + i].v;
    first_half /= static_cast<double>(half);
    second_half /= static_cast<double>(tail - half);
    if (std::abs(second_half - first_half) > 0.05 * std::abs(step)) {
        throw EstimationError(EstimationError::Reason::no_settling, "trace has not settled to a plateau");
    }

    // Log-linear fit of ln((plateau - v)/step) = -(t - t0)/tau inside the window.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    const double t0 = s.front().t;
    for (std::size_t i = 0; i < tail_begin; ++i) {
        const double u = (s[i].v - baseline) / step;
        if (u < options.window_low || u > options.window_high) continue;
        const double x = s[i].t - t0;
        const double y = std::log(1.0 - u);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double nn = static_cast<double>(n);
    const double det = nn * sxx - sx * sx;
    if (n < 3 || !(det > 0.0)) {
        throw EstimationError(EstimationError::Reason::no_settling, "too few samples inside the settling window");
    }
    const double slope = (nn * sxy - sx * sy) / det;
    if (!(slope < 0.0)) {
        throw EstimationError(EstimationError::Reason::no_settling, "settling segment does not decay");
    }
    return -1.0 / slope;
}

}  // namespace hbc::estimation
