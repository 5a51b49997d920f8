// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file experiments.hpp
 * @brief Parameter sweeps over twisting strength, detector resolution,
 *        twisting jitter and phase offset.
 *
 * Grid points are independent and may be evaluated on several threads; the
 * records always come back in grid order and do not depend on the thread
 * count.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "oat/imperfections.hpp"
#include "oat/metrology.hpp"

namespace oat {

inline constexpr std::string_view kVersion = "1.0.0";

using NamedValues = std::vector<std::pair<std::string, double>>;

/// One grid point: the swept value, computed figures and fixed context.
struct SweepRecord {
    double grid_value = 0.0;
    NamedValues metrics;
    NamedValues context;

    double metric(std::string_view name) const { return lookup(metrics, name); }
    double context_value(std::string_view name) const { return lookup(context, name); }

  private:
    static double lookup(const NamedValues& values, std::string_view name)
    {
        for (const auto& [k, v] : values) {
            if (k == name) {
                return v;
            }
        }
        throw std::out_of_range("SweepRecord: no value named " + std::string(name));
    }
};

struct SweepResult {
    std::string kind;
    std::vector<SweepRecord> records;
    std::optional<PowerLawFit> fit;
    /// Reference levels drawn alongside the data (e.g. shot-noise ratios).
    NamedValues references;
};

// ---------------------------------------------------------------------------
// Parallel map
// ---------------------------------------------------------------------------

inline int resolve_jobs(int jobs)
{
    if (jobs > 0) {
        return jobs;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// out[i] = fn(i) for i < count, on up to `jobs` threads (<= 0: all cores).
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t count, int jobs, F&& fn)
{
    std::vector<std::optional<R>> slots(count);
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(resolve_jobs(jobs)), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            slots[i].emplace(fn(i));
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    slots[i].emplace(fn(i));
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        };
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        pool.clear();
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

namespace detail {

inline void require_ascending(std::span<const double> grid, std::string_view what)
{
    if (grid.empty()) {
        throw std::invalid_argument(std::string(what) + ": grid is empty");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) {
            throw std::invalid_argument(std::string(what) + ": grid value is not finite");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
        }
    }
}

inline void require_range(std::span<const double> grid, double lo, double hi, std::string_view what)
{
    constexpr double slack = 1e-12;
    for (double v : grid) {
        if (v < lo - slack || v > hi + slack) {
            throw std::invalid_argument(std::string(what) + ": grid value " + std::to_string(v) +
                                        " outside [" + std::to_string(lo) + ", " +
                                        std::to_string(hi) + "]");
        }
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Squeezing, QFI and FI of the twisted state across alpha in [0, pi].
inline SweepResult sweep_alpha(int n_particles, std::span<const double> alpha_grid,
                               double theta_probe = kDefaultThetaProbe, int jobs = 0)
{
    detail::require_ascending(alpha_grid, "sweep_alpha");
    detail::require_range(alpha_grid, 0.0, std::numbers::pi, "sweep_alpha");
    const InterferometerPair rig(n_particles);

    SweepResult result{.kind = "scan-alpha", .records = {}, .fit = {}, .references = {}};
    result.records = parallel_map<SweepRecord>(alpha_grid.size(), jobs, [&](std::size_t i) {
        const MetrologyReport r = metrology_report(rig, alpha_grid[i], theta_probe);
        const double inv_xi2 = 1.0 / r.xi2_optimized;
        return SweepRecord{
            .grid_value = r.alpha,
            .metrics = {{"xi2_opt", r.xi2_optimized},
                        {"inv_xi2_opt", inv_xi2},
                        {"qfi_opt", r.qfi_optimized},
                        {"qfi_bs", r.qfi_bs},
                        {"qfi_mzi", r.qfi_mzi},
                        {"fi_bs", r.fi_bs},
                        {"fi_mzi", r.fi_mzi}},
            .context = {{"n_particles", static_cast<double>(n_particles)},
                        {"theta", theta_probe}},
        };
    });
    return result;
}

/// FI under finite detector resolution, normalized to the ideal detector,
/// for each theta in `thetas` and sigma in `sigmas` (beam splitter).
inline SweepResult sweep_sigma(int n_particles, double alpha, std::span<const double> thetas,
                               std::span<const double> sigmas, int jobs = 0)
{
    detail::require_ascending(sigmas, "sweep_sigma");
    if (!(sigmas.front() > 0.0)) {
        throw std::invalid_argument("sweep_sigma: sigma values must be positive");
    }
    if (thetas.empty()) {
        throw std::invalid_argument("sweep_sigma: no theta values");
    }
    const CollectiveOps ops(n_particles);
    const Rotor bs(ops, Direction::x_axis());
    const SpinState psi = make_twisted_state(n_particles, alpha);
    const PureStateFamily ideal(psi, bs);

    struct Task {
        double theta;
        double sigma;
    };
    std::vector<Task> tasks;
    for (double t : thetas) {
        for (double s : sigmas) {
            tasks.push_back({t, s});
        }
    }
    std::vector<double> ideal_fi = parallel_map<double>(
        thetas.size(), jobs, [&](std::size_t i) { return classical_fi(ideal, thetas[i]); });

    SweepResult result{.kind = "scan-sigma", .records = {}, .fit = {}, .references = {}};
    result.records = parallel_map<SweepRecord>(tasks.size(), jobs, [&](std::size_t i) {
        const Task& t = tasks[i];
        const ResolvedFamily resolved(ideal, make_resolution_kernel(t.sigma));
        const double fi = classical_fi(resolved, t.theta);
        const double reference = ideal_fi[i / sigmas.size()];
        return SweepRecord{
            .grid_value = t.sigma,
            .metrics = {{"fi", fi}, {"fi_ratio", fi / reference}},
            .context = {{"n_particles", static_cast<double>(n_particles)},
                        {"alpha", alpha},
                        {"theta", t.theta},
                        {"fi_ideal", reference}},
        };
    });

    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : result.records) {
        xs.push_back(r.grid_value);
        ys.push_back(r.metric("fi_ratio"));
    }
    if (xs.size() >= 3 && sigmas.size() >= 2) {
        result.fit = resolution_scaling_fit(xs, ys);
    }
    // FI = N is the shot-noise level; as a ratio to N^2/4 it is 4/N.
    for (int n : {100, 300, 1000}) {
        result.references.emplace_back("snl_ratio_n" + std::to_string(n), 4.0 / n);
    }
    return result;
}

/// Mixed-state FI under twisting jitter next to the closed-form prediction.
inline SweepResult sweep_dalpha(int n_particles, double alpha, double theta_probe,
                                std::span<const double> dalpha_grid, int jobs = 0)
{
    detail::require_ascending(dalpha_grid, "sweep_dalpha");
    detail::require_range(dalpha_grid, 0.0, 1.0, "sweep_dalpha");
    const CollectiveOps ops(n_particles);
    const Rotor bs(ops, Direction::x_axis());

    SweepResult result{.kind = "scan-dalpha", .records = {}, .fit = {}, .references = {}};
    result.records = parallel_map<SweepRecord>(dalpha_grid.size(), jobs, [&](std::size_t i) {
        const double da = dalpha_grid[i];
        const DensityFamily mixed(alpha_averaged_density(n_particles, alpha, da), bs);
        const double simulated = classical_fi(mixed, theta_probe);
        const double predicted = dalpha_scaling_prediction(n_particles, da);
        return SweepRecord{
            .grid_value = da,
            .metrics = {{"fi_simulated", simulated},
                        {"fi_predicted", predicted},
                        {"rel_dev", (simulated - predicted) / predicted}},
            .context = {{"n_particles", static_cast<double>(n_particles)},
                        {"alpha", alpha},
                        {"theta", theta_probe}},
        };
    });
    return result;
}

/**
 * Bhattacharyya fidelity between p(.|theta) and p(.|theta + dtheta).
 *
 * fi_local_estimate = 8 (1 - f) / dtheta^2 tends to the classical FI as
 * dtheta -> 0; at dtheta = 0 the FI itself is reported.
 */
inline SweepResult probe_fidelity(int n_particles, double alpha, const Direction& n,
                                  double theta, std::span<const double> dtheta_grid, int jobs = 0)
{
    detail::require_ascending(dtheta_grid, "probe_fidelity");
    if (dtheta_grid.front() < 0.0) {
        throw std::invalid_argument("probe_fidelity: dtheta must be non-negative");
    }
    const CollectiveOps ops(n_particles);
    const Rotor rotor(ops, n);
    const SpinState psi = make_twisted_state(n_particles, alpha);
    const OutcomeDistribution base = outcome_distribution(psi, rotor, theta);
    const double fi = classical_fi(psi, rotor, theta);

    SweepResult result{.kind = "fidelity", .records = {}, .fit = {}, .references = {}};
    result.records = parallel_map<SweepRecord>(dtheta_grid.size(), jobs, [&](std::size_t i) {
        const double dt = dtheta_grid[i];
        const double f = fidelity(base, outcome_distribution(psi, rotor, theta + dt));
        const double estimate = dt > 0.0 ? 8.0 * (1.0 - f) / (dt * dt) : fi;
        return SweepRecord{
            .grid_value = dt,
            .metrics = {{"fidelity", f}, {"fi_local_estimate", estimate}},
            .context = {{"n_particles", static_cast<double>(n_particles)},
                        {"alpha", alpha},
                        {"theta", theta},
                        {"fi", fi}},
        };
    });
    return result;
}

} // namespace oat
