#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hbc {

using Complex = std::complex<double>;

/// One sample of a transfer function. The response is stored in polar form
/// (signed dB, degrees) so that dB-domain operations and CSV round trips are
/// exact; `transfer()` recovers the complex value.
struct ResponsePoint {
    double frequency_hz = 0.0;
    double loss_db = 0.0;    ///< 20*log10|H|; -inf when |H| == 0
    double phase_deg = 0.0;  ///< arg(H) in (-180, 180]; 0 when |H| == 0

    static ResponsePoint from_transfer(double frequency_hz, Complex h);

    Complex transfer() const;
    double magnitude() const;
};

/// Ordered transfer-function samples; frequencies strictly increasing and > 0.
class FrequencyResponse {
public:
    FrequencyResponse() = default;
    explicit FrequencyResponse(std::vector<ResponsePoint> points);

    /// Appends a point; throws DomainError if it breaks the ordering invariant.
    void push_back(const ResponsePoint& point);

    std::span<const ResponsePoint> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const ResponsePoint& operator[](std::size_t i) const { return points_[i]; }
    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

    std::vector<double> frequencies() const;
    std::vector<double> loss_db() const;

    /// Arithmetic mean of loss_db over all points.
    double mean_loss_db() const;
    /// max(loss_db) - min(loss_db).
    double band_spread_db() const;

private:
    std::vector<ResponsePoint> points_;
};

/// Logarithmic grid from `start` to `stop` inclusive with `points_per_decade`
/// points per decade. `stop` is always the last element.
std::vector<double> log_grid(double start_hz, double stop_hz, int points_per_decade);

/// Wraps an angle in degrees into (-180, 180]. Values already in range are returned unchanged.
double wrap_degrees(double deg);

}  // namespace hbc
