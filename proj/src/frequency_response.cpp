#include "hbc/frequency_response.hpp"

#include "hbc/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hbc {

ResponsePoint ResponsePoint::from_transfer(double frequency_hz, Complex h) {
    ResponsePoint p;
    p.frequency_hz = frequency_hz;
    const double mag = std::abs(h);
    if (mag == 0.0) {
        p.loss_db = -std::numeric_limits<double>::infinity();
        p.phase_deg = 0.0;
    } else {
        p.loss_db = 20.0 * std::log10(mag);
        p.phase_deg = wrap_degrees(std::arg(h) * 180.0 / std::numbers::pi);
    }
    return p;
}

double ResponsePoint::magnitude() const {
    if (std::isinf(loss_db) && loss_db < 0) return 0.0;
    return std::pow(10.0, loss_db / 20.0);
}

Complex ResponsePoint::transfer() const {
    return std::polar(magnitude(), phase_deg * std::numbers::pi / 180.0);
}

FrequencyResponse::FrequencyResponse(std::vector<ResponsePoint> points) {
    points_.reserve(points.size());
    for (const auto& p : points) push_back(p);
}

void FrequencyResponse::push_back(const ResponsePoint& point) {
    if (!(point.frequency_hz > 0.0) || !std::isfinite(point.frequency_hz)) {
        throw DomainError(fmt::format("frequency must be finite and > 0, got {}", point.frequency_hz));
    }
    if (!points_.empty() && !(point.frequency_hz > points_.back().frequency_hz)) {
        throw DomainError(fmt::format("frequencies must be strictly increasing ({} after {})",
                                      point.frequency_hz, points_.back().frequency_hz));
    }
    points_.push_back(point);
}

std::vector<double> FrequencyResponse::frequencies() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.frequency_hz);
    return out;
}

std::vector<double> FrequencyResponse::loss_db() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.loss_db);
    return out;
}

double FrequencyResponse::mean_loss_db() const {
    if (points_.empty()) throw DomainError("mean of an empty response");
    double sum = 0.0;
    for (const auto& p : points_) sum += p.loss_db;
    return sum / static_cast<double>(points_.size());
}

double FrequencyResponse::band_spread_db() const {
    if (points_.empty()) throw DomainError("spread of an empty response");
    auto [lo, hi] = std::minmax_element(points_.begin(), points_.end(),
                                        [](const auto& a, const auto& b) { return a.loss_db < b.loss_db; });
    return hi->loss_db - lo->loss_db;
}

std::vector<double> log_grid(double start_hz, double stop_hz, int points_per_decade) {
    if (!(start_hz > 0.0) || !(stop_hz >= start_hz) || points_per_decade < 1) {
        throw DomainError(fmt::format("invalid log grid [{}, {}] with {} points/decade", start_hz, stop_hz,
                                      points_per_decade));
    }
    const double decades = std::log10(stop_hz / start_hz);
    const auto steps = static_cast<long>(std::floor(decades * points_per_decade + 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps) + 2);
    grid.push_back(start_hz);
    for (long k = 1; k <= steps; ++k) {
        grid.push_back(start_hz * std::pow(10.0, static_cast<double>(k) / points_per_decade));
    }
    if (grid.back() < stop_hz * (1.0 - 1e-9)) {
        grid.push_back(stop_hz);
    } else {
        grid.back() = stop_hz;
    }
    if (grid.size() >= 2 && !(grid[grid.size() - 1] > grid[grid.size() - 2])) grid.pop_back();
    return grid;
}

double wrap_degrees(double deg) {
    if (deg > -180.0 && deg <= 180.0) return deg;
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

}  // namespace hbc
