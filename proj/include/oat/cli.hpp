// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cli.hpp
 * @brief Command-line front end (`oatmetro`).
 *
 * Exit codes: 0 success, 1 numerical failure, 2 argument error. Data goes to
 * the selected sink only; diagnostics go to the error stream.
 */

#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oat/experiments.hpp"
#include "oat/imperfections.hpp"
#include "oat/io.hpp"
#include "oat/metrology.hpp"

namespace oat::cli {

/// Parses "1.25", "0.02pi", "pi", "-0.5pi".
inline double parse_angle(const std::string& text)
{
    std::string s = text;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    double scale = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        scale = std::numbers::pi;
        s.erase(s.size() - 2);
        if (s.empty() || s == "+") s = "1";
        if (s == "-") s = "-1";
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(v)) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return v * scale;
}

/**
 * Grid syntax: either an explicit list "a,b,c" or "min:max:count" with an
 * optional "log" suffix on the count for geometric spacing ("1:10:8log").
 * Every number may carry the "pi" suffix.
 */
inline std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(item);
        if (parts.size() != 3) {
            throw std::invalid_argument("range must be min:max:count, got '" + text + "'");
        }
        const double lo = parse_angle(parts[0]);
        const double hi = parse_angle(parts[1]);
        std::string count_text = parts[2];
        bool geometric = false;
        if (count_text.size() > 3 && count_text.compare(count_text.size() - 3, 3, "log") == 0) {
            geometric = true;
            count_text.erase(count_text.size() - 3);
        }
        std::size_t used = 0;
        long count = 0;
        try {
            count = std::stol(count_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != count_text.size() || count < 1) {
            throw std::invalid_argument("bad point count in '" + text + "'");
        }
        if (geometric && !(lo > 0.0 && hi > 0.0)) {
            throw std::invalid_argument("log range needs positive bounds in '" + text + "'");
        }
        for (long i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
            if (i == count - 1 && count > 1) {
                out.push_back(hi);
            } else if (geometric) {
                out.push_back(lo * std::pow(hi / lo, t));
            } else {
                out.push_back(lo + t * (hi - lo));
            }
        }
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_angle(item));
    }
    if (out.empty()) {
        throw std::invalid_argument("empty list");
    }
    return out;
}

/// Everything a single invocation was asked to do; echoed into JSON metadata.
struct RunConfig {
    std::string subcommand;
    int n_particles = 100;
    std::string alpha;
    std::string delta_alpha = "0";
    std::optional<double> sigma;
    std::string theta;
    std::string interferometer = "bs";
    std::string alphas = "0:pi:314";
    std::string thetas = "0.02pi,0.07pi,0.14pi";
    std::string sigmas = "1,1.5,2,3,4,6,8,10";
    std::string dalphas = "0,0.01,0.03,0.1,0.3,1.0";
    std::string dthetas = "0,0.0005,0.001,0.002,0.005,0.01";
    std::string input;
    std::string format;
    std::string output;
    int jobs = 0;

    io::json to_json() const
    {
        io::json j = io::json::object();
        j["subcommand"] = subcommand;
        auto put = [&](const char* key, const std::string& v) {
            if (!v.empty()) j[key] = v;
        };
        if (subcommand != "fit") {
            j["n_particles"] = n_particles;
        }
        if (subcommand == "state" || subcommand == "report" || subcommand == "scan-sigma" ||
            subcommand == "scan-dalpha" || subcommand == "fidelity") {
            put("alpha", alpha);
        }
        if (subcommand == "report") {
            put("delta_alpha", delta_alpha);
            if (sigma) j["sigma"] = *sigma;
        }
        if (subcommand != "fit" && subcommand != "scan-sigma") put("theta", theta);
        if (subcommand == "state" || subcommand == "report" || subcommand == "fidelity") {
            put("interferometer", interferometer);
        }
        if (subcommand == "scan-alpha") put("alphas", alphas);
        if (subcommand == "scan-sigma") {
            put("thetas", thetas);
            put("sigmas", sigmas);
        }
        if (subcommand == "scan-dalpha") put("dalphas", dalphas);
        if (subcommand == "fidelity") put("dthetas", dthetas);
        if (subcommand == "fit") put("input", input);
        j["format"] = format;
        j["output"] = output.empty() ? "-" : output;
        j["jobs"] = jobs;
        return j;
    }
};

namespace detail {

inline Direction parse_interferometer(const std::string& name)
{
    if (name == "bs") return Direction::x_axis();
    if (name == "mzi") return Direction::y_axis();
    if (name == "phase") return Direction::z_axis();
    throw std::invalid_argument("unknown interferometer '" + name + "'");
}

/// Parse failure attributed to a flag, reported with exit code 2.
struct FlagError : std::invalid_argument {
    FlagError(const std::string& flag, const std::string& what)
        : std::invalid_argument(flag + ": " + what)
    {
    }
};

template <typename F>
auto with_flag(const std::string& flag, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const FlagError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw FlagError(flag, e.what());
    }
}

inline io::json metadata(const RunConfig& cfg)
{
    io::json m = io::json::object();
    m["version"] = std::string(kVersion);
    m["config"] = cfg.to_json();
    return m;
}

inline void emit_sweep(const RunConfig& cfg, const SweepResult& result, std::ostream& sink)
{
    if (cfg.format == "json") {
        io::json meta = metadata(cfg);
        io::add_sweep_metadata(meta, result);
        sink << io::document(std::move(meta), io::sweep_records(result)).dump(2) << '\n';
    } else {
        io::write_sweep_csv(sink, result);
    }
}

} // namespace detail

/// Runs one invocation. argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Metrology of one-axis-twisted two-mode states", "oatmetro"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub, const std::string& default_format) {
        sub->add_option("--format", cfg.format, "Output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->default_str(default_format);
        sub->add_option("--output", cfg.output, "Output file path (default: standard output)");
        sub->add_option("--jobs", cfg.jobs,
                        "Worker threads, count (default 0 = all cores; output is identical for any value)")
            ->check(CLI::NonNegativeNumber);
    };
    auto add_n = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n_particles, "Particle number N, atoms (>= 1)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    auto add_alpha = [&](CLI::App* sub, const std::string& def) {
        sub->add_option("--alpha", cfg.alpha,
                        "Twisting strength alpha = chi t, radians (real or <x>pi)")
            ->default_str(def);
    };
    auto add_theta = [&](CLI::App* sub, const std::string& def, const std::string& what) {
        sub->add_option("--theta", cfg.theta, what + ", radians (real or <x>pi; default " + def + ")");
    };
    auto add_interferometer = [&](CLI::App* sub) {
        sub->add_option("--interferometer", cfg.interferometer,
                        "Interferometer: bs (J_x), mzi (J_y) or phase (J_z)")
            ->check(CLI::IsMember({"bs", "mzi", "phase"}))
            ->capture_default_str();
    };

    auto* state = app.add_subcommand("state", "Dump the twisted state, optionally rotated");
    add_n(state);
    add_alpha(state, "0");
    add_theta(state, "0", "Rotation angle applied after twisting");
    add_interferometer(state);
    add_common(state, "csv");

    auto* report = app.add_subcommand("report", "Squeezing, QFI, FI and Cramer-Rao bounds at one alpha");
    add_n(report);
    report->add_option("--alpha", cfg.alpha, "Twisting strength, radians (real or <x>pi)")
        ->default_str("1.0");
    report->add_option("--dalpha", cfg.delta_alpha,
                       "Gaussian jitter of alpha, radians (>= 0; adds fi_imperfect)")
        ->default_str("0");
    report->add_option("--sigma", cfg.sigma,
                       "Detector resolution, atoms (> 0; adds fi_imperfect)")
        ->check(CLI::PositiveNumber);
    add_theta(report, "0.02pi", "Probe phase for the classical FI");
    add_interferometer(report);
    add_common(report, "json");

    auto* scan_alpha = app.add_subcommand("scan-alpha", "Sweep alpha: squeezing, QFI and FI curves");
    add_n(scan_alpha);
    scan_alpha->add_option("--alphas", cfg.alphas,
                           "Alpha grid in [0, pi], radians: list a,b,c or min:max:count")
        ->capture_default_str();
    add_theta(scan_alpha, "0.02pi", "Probe phase for the classical FI");
    add_common(scan_alpha, "csv");

    auto* scan_sigma = app.add_subcommand("scan-sigma", "Sweep detector resolution sigma (beam splitter)");
    add_n(scan_sigma);
    scan_sigma->add_option("--alpha", cfg.alpha, "Twisting strength, radians (real or <x>pi)")
        ->default_str("1.0");
    scan_sigma->add_option("--thetas", cfg.thetas, "Probe phases, radians: list or min:max:count")
        ->capture_default_str();
    scan_sigma->add_option("--sigmas", cfg.sigmas,
                           "Resolution grid, atoms (> 0, increasing): list or min:max:count[log]")
        ->capture_default_str();
    add_common(scan_sigma, "csv");

    auto* scan_dalpha = app.add_subcommand("scan-dalpha", "Sweep alpha jitter delta_alpha (beam splitter)");
    add_n(scan_dalpha);
    scan_dalpha->add_option("--alpha", cfg.alpha, "Twisting strength, radians (real or <x>pi)")
        ->default_str("1.0");
    add_theta(scan_dalpha, "0.02pi", "Probe phase for the classical FI");
    scan_dalpha->add_option("--dalphas", cfg.dalphas,
                            "Jitter grid in [0, 1], radians: list or min:max:count")
        ->capture_default_str();
    add_common(scan_dalpha, "csv");

    auto* fid = app.add_subcommand("fidelity", "Fidelity between p(m|theta) and p(m|theta+dtheta)");
    add_n(fid);
    fid->add_option("--alpha", cfg.alpha, "Twisting strength, radians (real or <x>pi)")
        ->default_str("1.0");
    add_theta(fid, "0.02pi", "Base phase");
    add_interferometer(fid);
    fid->add_option("--dthetas", cfg.dthetas,
                    "Phase offsets, radians (>= 0, increasing): list or min:max:count")
        ->capture_default_str();
    add_common(fid, "csv");

    auto* fit = app.add_subcommand("fit", "Fit y = prefactor * x^exponent to a two-column CSV");
    fit->add_option("--input", cfg.input, "Two-column CSV file x,y (optional header row)")
        ->required();
    add_common(fit, "csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();
    if (cfg.format.empty()) {
        cfg.format = (cfg.subcommand == "report") ? "json" : "csv";
    }
    if (cfg.alpha.empty()) {
        cfg.alpha = (cfg.subcommand == "state") ? "0" : "1.0";
    }
    if (cfg.theta.empty()) {
        cfg.theta = (cfg.subcommand == "state") ? "0" : "0.02pi";
    }

    std::ostringstream buffer;
    try {
        const double alpha = detail::with_flag("--alpha", [&] { return parse_angle(cfg.alpha); });
        const double theta = detail::with_flag("--theta", [&] { return parse_angle(cfg.theta); });
        const Direction n = detail::with_flag(
            "--interferometer", [&] { return detail::parse_interferometer(cfg.interferometer); });
        const int jobs = cfg.jobs;
        const int npart = cfg.n_particles;

        if (cfg.subcommand == "state") {
            const SpinState psi = rotate(make_twisted_state(npart, alpha), n, theta);
            if (cfg.format == "json") {
                buffer << io::document(detail::metadata(cfg), io::state_records(psi)).dump(2) << '\n';
            } else {
                io::write_state_csv(buffer, psi);
            }
        } else if (cfg.subcommand == "report") {
            const double da = detail::with_flag("--dalpha", [&] {
                const double v = parse_angle(cfg.delta_alpha);
                if (v < 0.0) throw std::invalid_argument("must be >= 0");
                return v;
            });
            const InterferometerPair rig(npart);
            const MetrologyReport r = metrology_report(rig, alpha, theta);
            const Rotor rotor(rig.ops, n);
            const SpinState psi = make_twisted_state(npart, alpha);
            const double qfi = qfi_pure(psi, rig.ops, n);
            const double fi = classical_fi(psi, rotor, theta);
            io::json rec = io::report_record(r);
            rec["interferometer"] = cfg.interferometer;
            rec["qfi"] = io::number(qfi);
            rec["fi"] = io::number(fi);
            rec["crlb_qfi"] = io::number(qfi > 0.0 ? crlb(qfi) : std::numeric_limits<double>::infinity());
            rec["crlb_fi"] = io::number(fi > 0.0 ? crlb(fi) : std::numeric_limits<double>::infinity());
            rec["crlb_snl"] = io::number(crlb(static_cast<double>(npart)));
            if (da > 0.0 || cfg.sigma) {
                const DensityFamily mixed(alpha_averaged_density(npart, alpha, da), rotor);
                double fi_imp = 0.0;
                if (cfg.sigma) {
                    fi_imp = classical_fi(ResolvedFamily(mixed, make_resolution_kernel(*cfg.sigma)), theta);
                } else {
                    fi_imp = classical_fi(mixed, theta);
                }
                rec["fi_imperfect"] = io::number(fi_imp);
            }
            if (cfg.format == "json") {
                io::json records = io::json::array();
                records.push_back(rec);
                buffer << io::document(detail::metadata(cfg), records).dump(2) << '\n';
            } else {
                std::vector<std::string_view> names;
                std::vector<double> values;
                for (auto it = rec.begin(); it != rec.end(); ++it) {
                    if (it.value().is_array() || it.key() == "interferometer") {
                        continue;
                    }
                    names.push_back(it.key());
                    values.push_back(io::to_double(it.value()));
                }
                io::write_csv_header(buffer, names);
                io::write_csv_row(buffer, values);
            }
        } else if (cfg.subcommand == "scan-alpha") {
            const auto grid = detail::with_flag("--alphas", [&] { return parse_grid(cfg.alphas); });
            const auto result = detail::with_flag("--alphas", [&] { return sweep_alpha(npart, grid, theta, jobs); });
            detail::emit_sweep(cfg, result, buffer);
        } else if (cfg.subcommand == "scan-sigma") {
            const auto thetas = detail::with_flag("--thetas", [&] { return parse_grid(cfg.thetas); });
            const auto sigmas = detail::with_flag("--sigmas", [&] { return parse_grid(cfg.sigmas); });
            const auto result = detail::with_flag("--sigmas", [&] {
                return sweep_sigma(npart, alpha, thetas, sigmas, jobs);
            });
            if (result.fit) {
                err << "fit: fi_ratio = " << io::format_number(result.fit->prefactor) << " * sigma^"
                    << io::format_number(result.fit->exponent) << '\n';
            }
            detail::emit_sweep(cfg, result, buffer);
        } else if (cfg.subcommand == "scan-dalpha") {
            const auto grid = detail::with_flag("--dalphas", [&] { return parse_grid(cfg.dalphas); });
            const auto result = detail::with_flag("--dalphas", [&] {
                return sweep_dalpha(npart, alpha, theta, grid, jobs);
            });
            detail::emit_sweep(cfg, result, buffer);
        } else if (cfg.subcommand == "fidelity") {
            const auto grid = detail::with_flag("--dthetas", [&] { return parse_grid(cfg.dthetas); });
            const auto result = detail::with_flag("--dthetas", [&] {
                return probe_fidelity(npart, alpha, n, theta, grid, jobs);
            });
            detail::emit_sweep(cfg, result, buffer);
        } else if (cfg.subcommand == "fit") {
            std::ifstream in(cfg.input);
            if (!in) {
                throw detail::FlagError("--input", "cannot open '" + cfg.input + "'");
            }
            const auto [xs, ys] = detail::with_flag("--input", [&] { return io::read_two_column_csv(in); });
            const PowerLawFit f = detail::with_flag("--input", [&] { return fit_power_law(xs, ys); });
            if (cfg.format == "json") {
                io::json records = io::json::array();
                records.push_back({{"prefactor", io::number(f.prefactor)},
                                   {"exponent", io::number(f.exponent)},
                                   {"points", xs.size()}});
                buffer << io::document(detail::metadata(cfg), records).dump(2) << '\n';
            } else {
                io::write_csv_header(buffer, {"prefactor", "exponent"});
                io::write_csv_row(buffer, {f.prefactor, f.exponent});
            }
        }
    } catch (const detail::FlagError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 1;
    }

    if (cfg.output.empty() || cfg.output == "-") {
        out << buffer.str();
    } else {
        std::ofstream file(cfg.output, std::ios::binary);
        file << buffer.str();
        if (!file) {
            err << "error: --output: cannot write '" << cfg.output << "'\n";
            return 1;
        }
    }
    return 0;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("oatmetro");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace oat::cli
