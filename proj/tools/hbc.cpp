// hbc: channel sweeps, capacitance fits, amplitude estimation, de-embedding
// and curve comparison from the command line.
//
// Exit codes: 0 ok, 1 compare failed, 2 input error, 3 numeric error,
// 4 fit error, 5 estimation error.

#include "hbc/csv.hpp"
#include "hbc/deembed.hpp"
#include "hbc/error.hpp"
#include "hbc/estimation.hpp"
#include "hbc/model.hpp"
#include "hbc/run_config.hpp"
#include "hbc/sampling.hpp"
#include "hbc/units.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

enum Exit : int { ok = 0, compare_failed = 1, input_error = 2, numeric_error = 3, fit_error = 4, estimation_error = 5 };

// Accepts "13pF" or a bare SI number.
double quantity_arg(const std::string& text, hbc::units::Dimension dim, const std::string& flag) {
    try {
        return hbc::units::parse_quantity(text, dim);
    } catch (const hbc::DomainError&) {
    }
    try {
        return hbc::units::parse_quantity(text, hbc::units::Dimension::dimensionless);
    } catch (const hbc::DomainError& e) {
        throw hbc::ParseError("command line", 0, flag, e.what());
    }
}

void emit(const std::optional<std::string>& out_path, const std::string& text) {
    if (!out_path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*out_path);
    if (!out) throw hbc::ParseError(*out_path, 0, "", "cannot open file for writing");
    out << text;
}

void print_fit(const hbc::estimation::FitResult& r, std::size_t points) {
    fmt::print("estimate_farads: {}\n", r.estimate);
    fmt::print("estimate: {}\n", hbc::units::format_quantity(r.estimate, hbc::units::Dimension::farad));
    fmt::print("residual_rms: {}\n", r.residual_rms);
    fmt::print("points: {}\n", points);
    for (std::size_t i = 0; i < r.per_point_residuals.size(); ++i) {
        fmt::print("residual[{}]: {}\n", i, r.per_point_residuals[i]);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacitive body-channel simulation and measurement processing"};
    app.require_subcommand(1);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Channel loss curve as CSV");
    std::optional<std::string> sweep_config;
    std::optional<std::string> sweep_preset;
    std::optional<std::string> sweep_out;
    std::optional<unsigned> sweep_threads;
    sweep->add_option("config", sweep_config, "YAML run configuration");
    sweep->add_option("--preset", sweep_preset, "Channel preset (overrides the config's)");
    sweep->add_option("--out", sweep_out, "Write CSV here instead of stdout");
    sweep->add_option("--threads", sweep_threads, "Parallel solver workers")->check(CLI::PositiveNumber);

    // fits
    auto* fit_ret = app.add_subcommand("fit-return-cap", "Fit the return-path capacitance");
    std::string fit_ret_csv;
    std::string fit_ret_cl;
    fit_ret->add_option("csv", fit_ret_csv, "c_expt_farads,loss_ratio CSV")->required();
    fit_ret->add_option("--cl", fit_ret_cl, "Load capacitance, e.g. 13pF")->required();

    auto* fit_body = app.add_subcommand("fit-body-cap", "Fit the body-to-ground capacitance");
    std::string fit_body_csv;
    std::string fit_body_cl;
    fit_body->add_option("csv", fit_body_csv, "r_ext_ohms,tau_seconds CSV")->required();
    fit_body->add_option("--cl", fit_body_cl, "Load capacitance, e.g. 13pF")->required();

    auto* tau = app.add_subcommand("time-constant", "Settling time constant of a step trace");
    std::string tau_trace;
    double tau_plateau = 0.1;
    tau->add_option("trace", tau_trace, "t_seconds,v_volts CSV")->required();
    tau->add_option("--plateau-fraction", tau_plateau, "Trailing fraction averaged for the plateau");

    // amplitude
    auto* amp = app.add_subcommand("estimate-amplitude", "Square-wave amplitude from a sample trace");
    std::string amp_trace;
    std::size_t amp_bins = 64;
    std::size_t amp_reps = 10;
    std::optional<std::string> amp_exclude;
    amp->add_option("trace", amp_trace, "t_seconds,v_volts CSV")->required();
    amp->add_option("--bins", amp_bins, "Histogram bins");
    amp->add_option("--reps", amp_reps, "Repetitions averaged");
    amp->add_option("--exclude", amp_exclude, "Zero-cluster exclusion, e.g. 50mV");

    auto* synth = app.add_subcommand("synth-trace", "Sample a synthetic square wave");
    std::string synth_amp = "300mV";
    std::string synth_freq = "1MHz";
    double synth_duty = 0.5;
    std::string synth_noise = "0V";
    std::string synth_rate = "800kHz";
    double synth_jitter = 0.25;
    std::size_t synth_n = 4000;
    std::uint64_t synth_seed = 0;
    std::optional<std::string> synth_out;
    synth->add_option("--amplitude", synth_amp, "Square-wave amplitude");
    synth->add_option("--frequency", synth_freq, "Square-wave frequency");
    synth->add_option("--duty", synth_duty, "Duty cycle");
    synth->add_option("--noise", synth_noise, "Gaussian noise sigma");
    synth->add_option("--rate", synth_rate, "Sampling rate");
    synth->add_option("--jitter", synth_jitter, "Timing jitter as a fraction of the sample period");
    synth->add_option("--samples", synth_n, "Number of samples");
    synth->add_option("--seed", synth_seed, "Random seed")->required();
    synth->add_option("--out", synth_out, "Write CSV here instead of stdout");

    // deembed / compare
    auto* de = app.add_subcommand("deembed", "Divide the receive chain out of a measured curve");
    std::string de_curve;
    std::string de_config;
    std::optional<std::string> de_out;
    de->add_option("curve", de_curve, "Measured curve CSV")->required();
    de->add_option("config", de_config, "YAML config with the chain section")->required();
    de->add_option("--out", de_out, "Write CSV here instead of stdout");

    auto* cmp = app.add_subcommand("compare", "Compare two curves on the same grid");
    std::string cmp_a;
    std::string cmp_b;
    double cmp_tol = 0.0;
    cmp->add_option("a", cmp_a, "First curve CSV")->required();
    cmp->add_option("b", cmp_b, "Second curve CSV")->required();
    cmp->add_option("--tol-db", cmp_tol, "Allowed |loss_a - loss_b| in dB")->required()->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::input_error;
    }

    using hbc::units::Dimension;
    try {
        if (sweep->parsed()) {
            hbc::config::RunConfig cfg;
            if (sweep_config) cfg = hbc::config::load_run_config(*sweep_config);
            if (sweep_preset) {
                try {
                    cfg.channel = hbc::model::channel_preset(*sweep_preset);
                } catch (const hbc::InvalidConfigError& e) {
                    throw hbc::ParseError("command line", 0, "--preset", e.what());
                }
            }
            if (sweep_threads) cfg.sweep.threads = *sweep_threads;
            const auto freqs = cfg.sweep.frequencies();
            if (auto warning = hbc::model::validity_warning(freqs)) fmt::print(stderr, "warning: {}\n", *warning);
            const auto curve = hbc::model::channel_loss(cfg.channel, freqs, cfg.sweep.threads);
            emit(sweep_out, hbc::csv::curve_to_string(curve));
        } else if (fit_ret->parsed()) {
            const double cl = quantity_arg(fit_ret_cl, Dimension::farad, "--cl");
            const auto rows = hbc::csv::read_return_cap_file(fit_ret_csv);
            print_fit(hbc::estimation::fit_return_capacitance(rows, cl), rows.size());
        } else if (fit_body->parsed()) {
            const double cl = quantity_arg(fit_body_cl, Dimension::farad, "--cl");
            const auto rows = hbc::csv::read_time_constants_file(fit_body_csv);
            print_fit(hbc::estimation::fit_body_ground_capacitance(rows, cl), rows.size());
        } else if (tau->parsed()) {
            const auto trace = hbc::csv::read_trace_file(tau_trace);
            hbc::estimation::TimeConstantOptions options;
            options.plateau_fraction = tau_plateau;
            const double t = hbc::estimation::extract_time_constant(trace, options);
            fmt::print("tau_seconds: {}\n", t);
            fmt::print("tau: {}\n", hbc::units::format_quantity(t, Dimension::second));
        } else if (amp->parsed()) {
            const auto trace = hbc::csv::read_trace_file(amp_trace);
            hbc::sampling::EstimatorOptions options;
            options.bins = amp_bins;
            options.repetitions = amp_reps;
            if (amp_exclude) options.zero_exclusion = quantity_arg(*amp_exclude, Dimension::volt, "--exclude");
            const auto est = hbc::sampling::estimate_amplitude(trace, options);
            fmt::print("amplitude_volts: {}\n", est.amplitude);
            fmt::print("spread_volts: {}\n", est.spread);
            fmt::print("bin_width_volts: {}\n", est.bin_width);
            fmt::print("repetitions: {}\n", est.histograms_averaged);
        } else if (synth->parsed()) {
            const double amplitude = quantity_arg(synth_amp, Dimension::volt, "--amplitude");
            const double freq = quantity_arg(synth_freq, Dimension::hertz, "--frequency");
            const double noise = quantity_arg(synth_noise, Dimension::volt, "--noise");
            const double rate = quantity_arg(synth_rate, Dimension::hertz, "--rate");
            const double duration = (static_cast<double>(synth_n) + 1.0) / rate;
            const auto wave = hbc::sampling::synthesize_square(amplitude, freq, synth_duty, noise, duration);
            const auto trace = hbc::sampling::sample_signal(wave, rate, synth_jitter, synth_n, synth_seed);
            std::ostringstream text;
            hbc::csv::write_trace(text, trace);
            emit(synth_out, text.str());
        } else if (de->parsed()) {
            const auto cfg = hbc::config::load_run_config(de_config);
            const auto measured = hbc::csv::read_curve_file(de_curve);
            const auto channel = hbc::deembed::deembed(measured, cfg.chain, cfg.deembed_threshold);
            emit(de_out, hbc::csv::curve_to_string(channel));
        } else if (cmp->parsed()) {
            const auto a = hbc::csv::read_curve_file(cmp_a);
            const auto b = hbc::csv::read_curve_file(cmp_b);
            if (a.size() != b.size()) {
                throw hbc::DomainError(fmt::format("frequency grids differ: {} vs {} points", a.size(), b.size()));
            }
            double worst = 0.0;
            double worst_f = a.empty() ? 0.0 : a[0].frequency_hz;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double fa = a[i].frequency_hz;
                const double fb = b[i].frequency_hz;
                if (std::abs(fa - fb) > 1e-9 * std::max(fa, fb)) {
                    throw hbc::DomainError(fmt::format("frequency grids differ at row {}: {} vs {} Hz", i + 1, fa, fb));
                }
                const double la = a[i].loss_db;
                const double lb = b[i].loss_db;
                // Both -inf counts as agreement.
                const double dev = la == lb ? 0.0 : std::abs(la - lb);
                if (!(dev <= worst)) {
                    worst = dev;
                    worst_f = fa;
                }
            }
            const bool pass = worst <= cmp_tol;
            fmt::print("max_deviation_db: {}\n", worst);
            fmt::print("at_frequency_hz: {}\n", worst_f);
            fmt::print("tolerance_db: {}\n", cmp_tol);
            fmt::print("result: {}\n", pass ? "pass" : "fail");
            return pass ? Exit::ok : Exit::compare_failed;
        }
        return Exit::ok;
    } catch (const hbc::FitError& e) {
        fmt::print(stderr, "fit error: {}\n", e.what());
        return Exit::fit_error;
    } catch (const hbc::EstimationError& e) {
        fmt::print(stderr, "estimation error: {}\n", e.what());
        return Exit::estimation_error;
    } catch (const hbc::SingularCircuitError& e) {
        fmt::print(stderr, "solver error: {} (node '{}')\n", e.what(), e.node());
        return Exit::numeric_error;
    } catch (const hbc::DeembedError& e) {
        fmt::print(stderr, "de-embedding error: {}\n", e.what());
        return Exit::numeric_error;
    } catch (const hbc::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return Exit::input_error;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return Exit::input_error;
    }
}
