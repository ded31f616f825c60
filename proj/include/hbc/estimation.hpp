#pragma once

// Recovery of unknown model capacitances from measurement series.

#include "hbc/sampling.hpp"

#include <span>
#include <vector>

namespace hbc::estimation {

/// Loss measured with a known capacitor added between transmitter and receiver grounds.
struct ReturnCapMeasurement {
    double expt_capacitance = 0.0;  ///< farads, >= 0
    double loss_ratio = 0.0;        ///< |Vout/Vin| in (0, 1)
};

/// Settling time constant measured through a known series resistor.
struct TimeConstantMeasurement {
    double series_resistance = 0.0;  ///< ohms
    double time_constant = 0.0;      ///< seconds
};

struct FitResult {
    double estimate = 0.0;  ///< farads
    double residual_rms = 0.0;
    std::vector<double> per_point_residuals;  ///< in input order
};

/// Capacitive-divider loss of the return-path experiment:
/// C_g / (C_L + C_g) with C_g = C_expt + C_ret/2 (equal Tx and Rx return capacitances).
double return_loss_ratio(double expt_capacitance, double return_capacitance, double load_capacitance);

/// R_ext * (C_body + C_L).
double body_time_constant(double series_resistance, double body_capacitance, double load_capacitance);

/// Least-squares C_ret in ratio space. Duplicate C_expt values are averaged first.
/// Residuals are observed - predicted loss ratio.
/// Throws FitError(insufficient_data) for fewer than two distinct C_expt values
/// and FitError(no_positive_solution) when the best fit is C_ret <= 0.
FitResult fit_return_capacitance(std::span<const ReturnCapMeasurement> measurements, double load_capacitance);

/// Least-squares C_body in tau = R_ext * (C_body + C_L). Residuals are
/// relative: (tau - predicted) / tau.
/// Throws FitError(insufficient_data) when empty and FitError(negative_estimate)
/// when the fitted capacitance is not positive.
FitResult fit_body_ground_capacitance(std::span<const TimeConstantMeasurement> measurements,
                                      double load_capacitance);

struct TimeConstantOptions {
    double plateau_fraction = 0.10;  ///< trailing fraction of samples averaged for the plateau
    double window_low = 0.10;        ///< settling window, as a fraction of the step
    double window_high = 0.90;
};

/// Time constant of an exponential settling from the first sample toward the
/// plateau, from a log-linear fit of (plateau - v) inside the settling window.
/// Throws EstimationError(no_settling) when no step toward a plateau is present.
double extract_time_constant(const sampling::SampleTrace& trace, const TimeConstantOptions& options = {});

}  // namespace hbc::estimation
