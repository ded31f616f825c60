#include "hbc/csv.hpp"

#include "hbc/error.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hbc::csv {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_field(std::string_view text, const std::string& source, std::size_t line, std::string_view column) {
    text = trim(text);
    double v = 0.0;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, v);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError(source, line, std::string(column), fmt::format("'{}' is not a number", text));
    }
    return v;
}

// Reads every data row as N numbers after checking the header.
template <std::size_t N>
std::vector<std::pair<std::size_t, std::array<double, N>>> read_rows(std::istream& in, const std::string& source,
                                                                     std::string_view header) {
    std::vector<std::string_view> columns;
    for (std::size_t start = 0;;) {
        const auto comma = header.find(',', start);
        columns.push_back(header.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }

    std::string text;
    std::size_t line = 0;
    bool seen_header = false;
    std::vector<std::pair<std::size_t, std::array<double, N>>> rows;
    while (std::getline(in, text)) {
        ++line;
        const std::string_view row = trim(text);
        if (row.empty()) continue;
        if (!seen_header) {
            if (row != header) {
                throw ParseError(source, line, "", fmt::format("expected header '{}', got '{}'", header, row));
            }
            seen_header = true;
            continue;
        }
        std::array<double, N> values{};
        std::size_t start = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const auto comma = row.find(',', start);
            const bool last_column = i + 1 == N;
            if (last_column != (comma == std::string_view::npos)) {
                throw ParseError(source, line, "", fmt::format("expected {} columns", N));
            }
            values[i] = parse_field(row.substr(start, comma - start), source, line, columns[i]);
            start = comma + 1;
        }
        rows.emplace_back(line, values);
    }
    // An empty input is an empty series.
    return rows;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "", "cannot open file");
    return in;
}

}  // namespace

void write_curve(std::ostream& out, const FrequencyResponse& curve) {
    out << kCurveHeader << '\n';
    for (const auto& p : curve) fmt::print(out, "{},{},{}\n", p.frequency_hz, p.loss_db, p.phase_deg);
}

std::string curve_to_string(const FrequencyResponse& curve) {
    std::ostringstream s;
    write_curve(s, curve);
    return s.str();
}

void write_curve_file(const std::filesystem::path& path, const FrequencyResponse& curve) {
    std::ofstream out(path);
    if (!out) throw ParseError(path.string(), 0, "", "cannot open file for writing");
    write_curve(out, curve);
}

FrequencyResponse read_curve(std::istream& in, const std::string& source) {
    FrequencyResponse curve;
    for (const auto& [line, v] : read_rows<3>(in, source, kCurveHeader)) {
        try {
            curve.push_back({v[0], v[1], v[2]});
        } catch (const DomainError& e) {
            throw ParseError(source, line, "frequency_hz", e.what());
        }
    }
    return curve;
}

FrequencyResponse read_curve_file(const std::filesystem::path& path) {
    auto in = open(path);
    return read_curve(in, path.string());
}

std::vector<estimation::ReturnCapMeasurement> read_return_cap(std::istream& in, const std::string& source) {
    std::vector<estimation::ReturnCapMeasurement> out;
    for (const auto& [line, v] : read_rows<2>(in, source, kReturnCapHeader)) out.push_back({v[0], v[1]});
    return out;
}

std::vector<estimation::ReturnCapMeasurement> read_return_cap_file(const std::filesystem::path& path) {
    auto in = open(path);
    return read_return_cap(in, path.string());
}

void write_return_cap(std::ostream& out, const std::vector<estimation::ReturnCapMeasurement>& rows) {
    out << kReturnCapHeader << '\n';
    for (const auto& r : rows) fmt::print(out, "{},{}\n", r.expt_capacitance, r.loss_ratio);
}

std::vector<estimation::TimeConstantMeasurement> read_time_constants(std::istream& in, const std::string& source) {
    std::vector<estimation::TimeConstantMeasurement> out;
    for (const auto& [line, v] : read_rows<2>(in, source, kTimeConstantHeader)) out.push_back({v[0], v[1]});
    return out;
}

std::vector<estimation::TimeConstantMeasurement> read_time_constants_file(const std::filesystem::path& path) {
    auto in = open(path);
    return read_time_constants(in, path.string());
}

void write_time_constants(std::ostream& out, const std::vector<estimation::TimeConstantMeasurement>& rows) {
    out << kTimeConstantHeader << '\n';
    for (const auto& r : rows) fmt::print(out, "{},{}\n", r.series_resistance, r.time_constant);
}

sampling::SampleTrace read_trace(std::istream& in, const std::string& source) {
    std::vector<sampling::Sample> samples;
    for (const auto& [line, v] : read_rows<2>(in, source, kTraceHeader)) {
        if (!samples.empty() && !(v[0] > samples.back().t)) {
            throw ParseError(source, line, "t_seconds", "timestamps must be strictly increasing");
        }
        samples.push_back({v[0], v[1]});
    }
    return sampling::SampleTrace(std::move(samples));
}

sampling::SampleTrace read_trace_file(const std::filesystem::path& path) {
    auto in = open(path);
    return read_trace(in, path.string());
}

void write_trace(std::ostream& out, const sampling::SampleTrace& trace) {
    out << kTraceHeader << '\n';
    for (const auto& s : trace.samples()) fmt::print(out, "{},{}\n", s.t, s.v);
}

}  // namespace hbc::csv
