#include "hbc/units.hpp"

#include "hbc/error.hpp"

#include <fmt/format.h>

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

namespace hbc::units {
namespace {

struct Prefix {
    std::string_view text;
    double scale;
};

// Longest spellings first so "µ" (two bytes) wins over nothing.
constexpr std::array<Prefix, 10> kPrefixes{{
    {"µ", 1e-6},
    {"f", 1e-15},
    {"p", 1e-12},
    {"n", 1e-9},
    {"u", 1e-6},
    {"m", 1e-3},
    {"k", 1e3},
    {"K", 1e3},
    {"M", 1e6},
    {"G", 1e9},
}};

std::vector<std::string_view> spellings(Dimension dim) {
    switch (dim) {
        case Dimension::dimensionless: return {};
        case Dimension::ohm: return {"Ω", "ohm", "Ohm", "ohms", "R"};
        case Dimension::farad: return {"F"};
        case Dimension::hertz: return {"Hz", "hz"};
        case Dimension::second: return {"s"};
        case Dimension::volt: return {"V"};
        case Dimension::decibel: return {"dB"};
    }
    return {};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Returns the multiplier for `suffix` (prefix + unit) or nullopt.
std::optional<double> suffix_scale(std::string_view suffix, Dimension dim) {
    if (dim == Dimension::dimensionless) {
        if (suffix.empty()) return 1.0;
        return std::nullopt;
    }
    for (std::string_view unit : spellings(dim)) {
        if (!ends_with(suffix, unit)) continue;
        std::string_view prefix = suffix.substr(0, suffix.size() - unit.size());
        if (prefix.empty()) return 1.0;
        // dB takes no SI prefix
        if (dim == Dimension::decibel) return std::nullopt;
        for (const auto& p : kPrefixes) {
            if (prefix == p.text) return p.scale;
        }
    }
    return std::nullopt;
}

}  // namespace

std::string_view symbol(Dimension dim) {
    switch (dim) {
        case Dimension::dimensionless: return "";
        case Dimension::ohm: return "ohm";
        case Dimension::farad: return "F";
        case Dimension::hertz: return "Hz";
        case Dimension::second: return "s";
        case Dimension::volt: return "V";
        case Dimension::decibel: return "dB";
    }
    return "";
}

double parse_quantity(std::string_view text, Dimension dim) {
    std::string_view s = trim(text);
    if (s.empty()) throw DomainError("empty value");

    double number = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, number);
    if (ec != std::errc{} || ptr == first) {
        throw DomainError(fmt::format("'{}' does not start with a number", s));
    }
    if (!std::isfinite(number)) throw DomainError(fmt::format("'{}' is not finite", s));

    std::string_view suffix = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
    if (suffix.empty() && dim != Dimension::dimensionless) {
        throw DomainError(fmt::format("'{}' is missing a unit (expected {})", s, symbol(dim)));
    }
    auto scale = suffix_scale(suffix, dim);
    if (!scale) {
        if (dim == Dimension::dimensionless) {
            throw DomainError(fmt::format("'{}' must be a plain number", s));
        }
        throw DomainError(fmt::format("unrecognized unit '{}' (expected {})", suffix, symbol(dim)));
    }
    return number * *scale;
}

std::string format_quantity(double value, Dimension dim) {
    if (dim == Dimension::dimensionless || dim == Dimension::decibel || value == 0.0 ||
        !std::isfinite(value)) {
        return fmt::format("{:.6g}{}", value, symbol(dim));
    }
    static constexpr std::array<Prefix, 9> kOut{{
        {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"m", 1e-3},
        {"", 1.0},    {"k", 1e3},   {"M", 1e6},  {"G", 1e9},
    }};
    const double mag = std::abs(value);
    const Prefix* chosen = &kOut.front();
    for (const auto& p : kOut) {
        if (mag >= p.scale * (1.0 - 1e-12)) chosen = &p;
    }
    return fmt::format("{:.6g}{}{}", value / chosen->scale, chosen->text, symbol(dim));
}

}  // namespace hbc::units
