#pragma once

// CSV exchange formats: response curves, fit measurement series, sample traces.

#include "hbc/estimation.hpp"
#include "hbc/frequency_response.hpp"
#include "hbc/sampling.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hbc::csv {

inline constexpr std::string_view kCurveHeader = "frequency_hz,loss_db,phase_deg";
inline constexpr std::string_view kReturnCapHeader = "c_expt_farads,loss_ratio";
inline constexpr std::string_view kTimeConstantHeader = "r_ext_ohms,tau_seconds";
inline constexpr std::string_view kTraceHeader = "t_seconds,v_volts";

/// Rows use the shortest decimal form that reads back to the same double;
/// a zero-magnitude point is written as "-inf".
void write_curve(std::ostream& out, const FrequencyResponse& curve);
std::string curve_to_string(const FrequencyResponse& curve);
void write_curve_file(const std::filesystem::path& path, const FrequencyResponse& curve);

/// All readers throw ParseError naming the source and 1-based line.
FrequencyResponse read_curve(std::istream& in, const std::string& source = "<input>");
FrequencyResponse read_curve_file(const std::filesystem::path& path);

std::vector<estimation::ReturnCapMeasurement> read_return_cap(std::istream& in,
                                                              const std::string& source = "<input>");
std::vector<estimation::ReturnCapMeasurement> read_return_cap_file(const std::filesystem::path& path);
void write_return_cap(std::ostream& out, const std::vector<estimation::ReturnCapMeasurement>& rows);

std::vector<estimation::TimeConstantMeasurement> read_time_constants(std::istream& in,
                                                                     const std::string& source = "<input>");
std::vector<estimation::TimeConstantMeasurement> read_time_constants_file(const std::filesystem::path& path);
void write_time_constants(std::ostream& out, const std::vector<estimation::TimeConstantMeasurement>& rows);

sampling::SampleTrace read_trace(std::istream& in, const std::string& source = "<input>");
sampling::SampleTrace read_trace_file(const std::filesystem::path& path);
void write_trace(std::ostream& out, const sampling::SampleTrace& trace);

}  // namespace hbc::csv
