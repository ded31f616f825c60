#include "hbc/error.hpp"
#include "hbc/units.hpp"

#include <catch_amalgamated.hpp>

using Catch::Matchers::WithinRel;
using hbc::units::Dimension;
using hbc::units::parse_quantity;

TEST_CASE("quantities with SI prefixes") {
    CHECK_THAT(parse_quantity("13pF", Dimension::farad), WithinRel(13e-12, 1e-15));
    CHECK_THAT(parse_quantity("300fF", Dimension::farad), WithinRel(300e-15, 1e-15));
    CHECK_THAT(parse_quantity("1.5 pF", Dimension::farad), WithinRel(1.5e-12, 1e-15));
    CHECK_THAT(parse_quantity("10MΩ", Dimension::ohm), WithinRel(10e6, 1e-15));
    CHECK_THAT(parse_quantity("10Mohm", Dimension::ohm), WithinRel(10e6, 1e-15));
    CHECK_THAT(parse_quantity("50ohm", Dimension::ohm), WithinRel(50.0, 1e-15));
    CHECK_THAT(parse_quantity("10kR", Dimension::ohm), WithinRel(10e3, 1e-15));
    CHECK_THAT(parse_quantity("163us", Dimension::second), WithinRel(163e-6, 1e-15));
    CHECK_THAT(parse_quantity("163µs", Dimension::second), WithinRel(163e-6, 1e-15));
    CHECK_THAT(parse_quantity("5kHz", Dimension::hertz), WithinRel(5e3, 1e-15));
    CHECK_THAT(parse_quantity("300mV", Dimension::volt), WithinRel(0.3, 1e-15));
    CHECK_THAT(parse_quantity("3dB", Dimension::decibel), WithinRel(3.0, 1e-15));
    CHECK_THAT(parse_quantity("1e-12", Dimension::dimensionless), WithinRel(1e-12, 1e-15));
}

TEST_CASE("malformed quantities are rejected") {
    CHECK_THROWS_AS(parse_quantity("13qF", Dimension::farad), hbc::DomainError);
    CHECK_THROWS_AS(parse_quantity("13", Dimension::farad), hbc::DomainError);
    CHECK_THROWS_AS(parse_quantity("pF", Dimension::farad), hbc::DomainError);
    CHECK_THROWS_AS(parse_quantity("", Dimension::ohm), hbc::DomainError);
    CHECK_THROWS_AS(parse_quantity("3kdB", Dimension::decibel), hbc::DomainError);
    CHECK_THROWS_AS(parse_quantity("12x", Dimension::dimensionless), hbc::DomainError);
    CHECK_THROWS_AS(parse_quantity("13pF", Dimension::ohm), hbc::DomainError);
}

TEST_CASE("formatting picks an engineering prefix") {
    CHECK(hbc::units::format_quantity(1.5e-12, Dimension::farad) == "1.5pF");
    CHECK(hbc::units::format_quantity(150e-12, Dimension::farad) == "150pF");
    CHECK(hbc::units::format_quantity(10e6, Dimension::ohm) == "10Mohm");
    CHECK(hbc::units::format_quantity(163e-6, Dimension::second) == "163us");
}

TEST_CASE("format and parse round trip") {
    for (double v : {1.5e-12, 300e-15, 4.7e-9, 10e6, 50.0}) {
        const auto text = hbc::units::format_quantity(v, Dimension::farad);
        CHECK_THAT(parse_quantity(text, Dimension::farad), WithinRel(v, 1e-6));
    }
}
