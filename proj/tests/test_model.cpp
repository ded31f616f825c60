#include "hbc/error.hpp"
#include "hbc/model.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace hbc;
using namespace hbc::model;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double loss_at(const ChannelConfig& c, double f) {
    const double freqs[] = {f};
    return channel_loss(c, freqs)[0].loss_db;
}

ChannelConfig with_load(LoadPreset load) {
    ChannelConfig c;
    c.load = load;
    return c;
}

}  // namespace

TEST_CASE("default parameters") {
    const auto p = ModelParameters::defaults();
    CHECK(p.source_resistance == 50.0);
    CHECK(p.band_capacitance == 200e-12);
    CHECK(p.band_resistance == 100.0);
    CHECK(p.skin_resistance == 10e3);
    CHECK(p.skin_capacitance == 90e-12);
    CHECK(p.body_resistance == 200.0);
    CHECK(p.feet_capacitance == 9e-12);
    CHECK(p.tx_body_earth_capacitance == 75e-12);
    CHECK(p.rx_body_earth_capacitance == 75e-12);
    CHECK(p.tx_ground_body_capacitance == 300e-15);
    CHECK(p.rx_ground_body_capacitance == 300e-15);
    CHECK(p.tx_return_capacitance == 1.5e-12);
    CHECK(p.rx_return_capacitance == 1.5e-12);
    CHECK_NOTHROW(p.validate());

    auto bad = p;
    bad.skin_resistance = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("load presets") {
    CHECK(LoadPreset::probe_10x().resistance == 10e6);
    CHECK(LoadPreset::probe_10x().capacitance == 13e-12);
    CHECK(LoadPreset::probe_1x().resistance == 1e6);
    CHECK(LoadPreset::probe_1x().capacitance == 79e-12);
    CHECK(LoadPreset::wearable().resistance == 10e6);
    CHECK(LoadPreset::wearable().capacitance == 1e-12);
    CHECK(!LoadPreset::wearable().ground_return);
    CHECK(LoadPreset::instrument_50ohm().resistance == 50.0);
    CHECK(LoadPreset::instrument_50ohm().capacitance == 0.0);
    CHECK(LoadPreset::from_name("probe-1x").kind == LoadKind::probe_1x);
    CHECK_THROWS_AS(LoadPreset::from_name("probe-100x"), InvalidConfigError);
    CHECK_THROWS_AS(LoadPreset::custom(-1.0, 1e-12), DomainError);
}

TEST_CASE("parallel plate capacitance") {
    CHECK_THAT(parallel_plate_capacitance(4e-4, 0.01e-3, 1.0), WithinRel(354e-12, 0.01));
    CHECK_THAT(parallel_plate_capacitance(4e-4, 4e-3, 100.0), WithinRel(88.5e-12, 0.001));
    CHECK_THAT(parallel_plate_capacitance(100e-4, 1e-2, 1.0), WithinRel(8.85e-12, 0.001));
    CHECK_THROWS_AS(parallel_plate_capacitance(0.0, 1e-3, 1.0), DomainError);
    CHECK_THROWS_AS(parallel_plate_capacitance(1e-4, -1e-3, 1.0), DomainError);
    CHECK_THROWS_AS(parallel_plate_capacitance(1e-4, 1e-3, 0.5), DomainError);
}

TEST_CASE("high-pass cutoff") {
    CHECK_THAT(highpass_cutoff(1e6, 159.155e-12), WithinRel(1e3, 1e-4));
    CHECK_THAT(highpass_cutoff(50.0, 159.155e-12), WithinRel(20e6, 1e-4));
    CHECK_THAT(highpass_cutoff(10e6, 0.75e-12), WithinRel(21.2e3, 0.001));
    CHECK_THROWS_AS(highpass_cutoff(0.0, 1e-12), DomainError);
    CHECK_THROWS_AS(highpass_cutoff(1e6, 0.0), DomainError);
}

TEST_CASE("capacitive-return netlist structure") {
    const auto n = build_channel(channel_preset("probe-10x"));
    CHECK(n.find_element("C_ret_tx") != nullptr);
    CHECK(n.find_element("C_ret_rx") != nullptr);
    CHECK(n.find_element("C_ret_rx")->value == LoadPreset::kInstrumentGroundReturn);
    CHECK(n.find_node(nodes::kTxGround));
    CHECK(n.find_node(nodes::kRxGround));
    // receiver ground-body coupling is folded into the load capacitor
    CHECK_THAT(n.find_element("C_L")->value, WithinRel(13.3e-12, 1e-12));
    CHECK(n.find_element("R_L")->value == 10e6);
    CHECK(n.find_element("R_body_tx")->value == 100.0);
    CHECK(n.find_element("C_feet")->value == 9e-12);

    const auto w = build_channel(channel_preset("wearable"));
    CHECK(w.find_element("C_ret_rx")->value == 1.5e-12);

    const auto r50 = build_channel(channel_preset("instrument-50ohm"));
    CHECK(r50.find_element("C_L") == nullptr);
}

TEST_CASE("common-ground netlist structure") {
    const auto n = build_channel(channel_preset("common-ground-dede"));
    CHECK(n.find_element("C_ret_tx") == nullptr);
    CHECK(n.find_element("C_ret_rx") == nullptr);
    CHECK(n.find_node(nodes::kCommonGround));
    CHECK(!n.find_node(nodes::kTxGround));
    CHECK(n.find_element("R_band_tx_ref") != nullptr);
    CHECK(n.find_element("R_band_rx_ref") != nullptr);
    CHECK(n.output().neg == n.node(nodes::kCommonGround));
}

TEST_CASE("unsupported modality combinations") {
    auto c = channel_preset("probe-10x");
    c.excitation = Modality::differential;
    CHECK_THROWS_AS(build_channel(c), InvalidConfigError);
    c = channel_preset("probe-10x");
    c.termination = Modality::differential;
    CHECK_THROWS_AS(build_channel(c), InvalidConfigError);
    c = channel_preset("common-ground-sese");
    c.termination = Modality::differential;
    CHECK_THROWS_AS(build_channel(c), InvalidConfigError);
    CHECK_THROWS_AS(channel_preset("nonsense"), InvalidConfigError);
    CHECK(parse_modality("de") == Modality::differential);
    CHECK_THROWS_AS(parse_ground_regime("floating"), InvalidConfigError);
}

TEST_CASE("common-ground forward path at 100 kHz") {
    CHECK(loss_at(channel_preset("common-ground-sese"), 100e3) <= 0.0);
    CHECK(loss_at(channel_preset("common-ground-sese"), 100e3) >= -1.5);
    CHECK_THAT(loss_at(channel_preset("common-ground-dese"), 100e3), WithinAbs(-6.0, 1.5));
    CHECK_THAT(loss_at(channel_preset("common-ground-dede"), 100e3), WithinAbs(-10.0, 1.5));
}

TEST_CASE("capacitive-return presets over the band") {
    const auto freqs = log_grid(10e3, 1e6, 50);
    const auto x10 = channel_loss(channel_preset("probe-10x"), freqs);
    const auto x1 = channel_loss(channel_preset("probe-1x"), freqs);
    const auto wear = channel_loss(channel_preset("wearable"), freqs);
    CHECK_THAT(x10.mean_loss_db(), WithinAbs(-43.0, 3.0));
    CHECK(x10.band_spread_db() < 3.0);
    CHECK_THAT(x1.mean_loss_db(), WithinAbs(-47.0, 3.0));
    CHECK(wear.band_spread_db() < 3.0);
    for (std::size_t i = 0; i < freqs.size(); ++i) CHECK(x1[i].loss_db < x10[i].loss_db);
}

TEST_CASE("high-impedance terminations are flat") {
    const auto freqs = log_grid(10e3, 1e6, 50);
    for (double c_l : {1e-12, 13e-12, 50e-12}) {
        for (double r_l : {10e6, 100e6}) {
            for (auto ret : {std::optional<double>{}, std::optional<double>{270e-12}}) {
                const auto curve = channel_loss(with_load(LoadPreset::custom(r_l, c_l, ret)), freqs);
                CHECK(curve.band_spread_db() < 3.0);
            }
        }
    }
}

TEST_CASE("lower termination resistance loses more") {
    const auto freqs = log_grid(1e3, 1e6, 20);
    for (double c_l : {0.0, 13e-12}) {
        const auto r50 = channel_loss(with_load(LoadPreset::custom(50.0, c_l)), freqs);
        const auto r1m = channel_loss(with_load(LoadPreset::custom(1e6, c_l)), freqs);
        const auto r10m = channel_loss(with_load(LoadPreset::custom(10e6, c_l)), freqs);
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            CHECK(r50[i].loss_db <= r1m[i].loss_db);
            CHECK(r1m[i].loss_db <= r10m[i].loss_db);
        }
    }
}

TEST_CASE("more load capacitance loses more") {
    const auto freqs = log_grid(1e3, 1e6, 20);
    for (auto ret : {std::optional<double>{}, std::optional<double>{270e-12}}) {
        std::optional<FrequencyResponse> prev;
        for (double c_l : {1e-12, 5e-12, 13e-12, 40e-12, 79e-12, 200e-12}) {
            const auto curve = channel_loss(with_load(LoadPreset::custom(10e6, c_l, ret)), freqs);
            if (prev) {
                for (std::size_t i = 0; i < freqs.size(); ++i) CHECK(curve[i].loss_db < (*prev)[i].loss_db);
            }
            prev = curve;
        }
    }
}

TEST_CASE("resistive termination is a first-order high-pass") {
    const auto config = with_load(LoadPreset::custom(1e6, 0.0));
    const auto freqs = log_grid(100.0, 100e6, 50);
    const auto curve = channel_loss(config, freqs);

    const double f1[] = {1e3, 10e3};
    const auto low = channel_loss(config, f1);
    CHECK_THAT(low[1].loss_db - low[0].loss_db, WithinAbs(20.0, 2.0));

    double top = -1e300;
    for (const auto& p : curve) top = std::max(top, p.loss_db);
    double corner = 0.0;
    for (const auto& p : curve) {
        if (p.loss_db >= top - 3.0) {
            corner = p.frequency_hz;
            break;
        }
    }
    const double predicted = highpass_cutoff(1e6, effective_return_capacitance(config));
    CHECK(corner > predicted / 2.0);
    CHECK(corner < predicted * 2.0);
}

TEST_CASE("effective return capacitance") {
    const auto c = with_load(LoadPreset::custom(1e6, 0.0));
    const double tx_side = 1.5e-12 + 75e-12 + 75e-12 + 9e-12;
    CHECK_THAT(effective_return_capacitance(c), WithinRel(1.5e-12 * tx_side / (1.5e-12 + tx_side), 1e-12));
    CHECK_THROWS_AS(effective_return_capacitance(channel_preset("common-ground-sese")), InvalidConfigError);
}

TEST_CASE("higher source impedance loses more at 1 MHz") {
    double prev = 1e300;
    for (double rs : {50.0, 10e3, 1e6}) {
        auto c = channel_preset("probe-10x");
        c.params.source_resistance = rs;
        const double l = loss_at(c, 1e6);
        CHECK(l < prev);
        prev = l;
    }
}

TEST_CASE("capacitive termination beats 50 ohm at low frequency") {
    const double cap = loss_at(channel_preset("probe-10x"), 10e3);
    const double res = loss_at(channel_preset("instrument-50ohm"), 10e3);
    CHECK(cap - res >= 40.0);
}

TEST_CASE("validity warning above 1 MHz") {
    CHECK(!validity_warning(log_grid(10e3, 1e6, 50)));
    const auto w = validity_warning(log_grid(10e3, 10e6, 10));
    REQUIRE(w);
    CHECK(w->find("1 MHz") != std::string::npos);
}

TEST_CASE("every preset solves with a small KCL residual") {
    for (auto name : channel_preset_names()) {
        const auto n = build_channel(channel_preset(name));
        for (double f : log_grid(1e3, 100e6, 5)) CHECK(circuit::solve_ac(n, f).kcl_residual <= 1e-9);
    }
}
