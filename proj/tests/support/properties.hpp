// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

// Randomized property checks shared by the unit tests and the acceptance
// runner. Each check draws `cases` parameter sets from a fixed-seed generator
// and reports how many violated the stated tolerance.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "oat/metrology.hpp"

namespace props {

struct Tally {
    int cases = 0;
    int failures = 0;
    double worst = 0.0;  // largest observed error, in the check's own units
    std::string first_failure;

    void record(double error, double tolerance, const std::string& where)
    {
        ++cases;
        worst = std::max(worst, error);
        if (!(error <= tolerance)) {
            if (failures == 0) first_failure = where;
            ++failures;
        }
    }
    bool ok() const { return failures == 0 && cases > 0; }
};

class Draws {
  public:
    explicit Draws(unsigned seed) : rng_(seed) {}

    int even_n(int lo, int hi) { return 2 * std::uniform_int_distribution<int>(lo / 2, hi / 2)(rng_); }
    int any_n(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    oat::Direction direction()
    {
        std::normal_distribution<double> g;
        for (;;) {
            const double x = g(rng_), y = g(rng_), z = g(rng_);
            if (x * x + y * y + z * z > 1e-6) return {x, y, z};
        }
    }

    oat::SpinState state(int n)
    {
        std::normal_distribution<double> g;
        oat::Amplitudes a(n + 1);
        for (auto& c : a) c = oat::cplx(g(rng_), g(rng_));
        a /= a.norm();
        return oat::SpinState(n, a);
    }

    std::mt19937& engine() { return rng_; }

  private:
    std::mt19937 rng_;
};

inline std::string describe(int n, double alpha, double theta)
{
    return "N=" + std::to_string(n) + " alpha=" + std::to_string(alpha) + " theta=" + std::to_string(theta);
}

/// classical_fi <= qfi_pure <= qfi_optimized, relative slack 1e-6.
inline Tally crlb_chain(int cases, unsigned seed = 1001)
{
    Draws draw(seed);
    Tally t;
    for (int k = 0; k < cases; ++k) {
        const int n = draw.any_n(2, 60);
        const double alpha = draw.uniform(0.0, std::numbers::pi);
        const double theta = draw.uniform(-std::numbers::pi, std::numbers::pi);
        const oat::Direction dir = draw.direction();
        const oat::CollectiveOps ops(n);
        const oat::Rotor rotor(ops, dir);
        const oat::SpinState s = oat::make_twisted_state(n, alpha);
        const double f = oat::classical_fi(s, rotor, theta);
        const double q = oat::qfi_pure(s, ops, dir);
        const double qo = oat::qfi_optimized(s, ops).value;
        const double scale = std::max(qo, 1.0);
        const double excess = std::max({(f - q) / scale, (q - qo) / scale, -f / scale});
        t.record(excess, 1e-6, describe(n, alpha, theta));
    }
    return t;
}

/// Phase-decomposition FI equals the direct FI for BS and MZI.
inline Tally decomposition(int cases, unsigned seed = 2002)
{
    Draws draw(seed);
    Tally t;
    for (int k = 0; k < cases; ++k) {
        const int n = draw.any_n(2, 80);
        const double alpha = draw.uniform(0.0, std::numbers::pi);
        const double theta = draw.uniform(-std::numbers::pi, std::numbers::pi);
        const bool bs = (k % 2) == 0;
        const oat::CollectiveOps ops(n);
        const oat::Rotor rotor(ops, bs ? oat::Direction::x_axis() : oat::Direction::y_axis());
        const oat::SpinState s = oat::make_twisted_state(n, alpha);
        const double direct = oat::classical_fi(s, rotor, theta);
        const double split = oat::fi_exact_decomposition(oat::outcome_amplitudes(s, rotor, theta), ops);
        // Relative to the FI itself; values far below the QFI scale N are
        // compared on that scale instead.
        const double scale = std::max(std::abs(direct), 1e-6 * n);
        t.record(std::abs(split - direct) / scale, 1e-6, describe(n, alpha, theta) + (bs ? " bs" : " mzi"));
    }
    return t;
}

/// Analytic dp/dtheta against a central difference with h = 1e-5, per outcome.
inline Tally derivative(int cases, unsigned seed = 3003)
{
    Draws draw(seed);
    Tally t;
    constexpr double h = 1e-5;
    for (int k = 0; k < cases; ++k) {
        const int n = draw.any_n(1, 40);
        const double alpha = draw.uniform(0.0, std::numbers::pi);
        const double theta = draw.uniform(-std::numbers::pi, std::numbers::pi);
        const oat::Direction dir = draw.direction();
        const oat::CollectiveOps ops(n);
        const oat::Rotor rotor(ops, dir);
        const oat::PureStateFamily family(oat::make_twisted_state(n, alpha), rotor);
        const auto jet = family(theta);
        const auto plus = family(theta + h);
        const auto minus = family(theta - h);
        double err = 0.0;
        for (Eigen::Index i = 0; i < jet.p.size(); ++i) {
            err = std::max(err, std::abs(jet.dp(i) - (plus.p(i) - minus.p(i)) / (2 * h)));
        }
        t.record(err, 1e-6, describe(n, alpha, theta));
    }
    return t;
}

/// Rotations of random states keep the norm, and outcome distributions sum to one.
inline Tally unitarity(int cases, unsigned seed = 4004)
{
    Draws draw(seed);
    Tally t;
    for (int k = 0; k < cases; ++k) {
        const int n = draw.any_n(1, 120);
        const double theta = draw.uniform(-10.0, 10.0);
        const oat::SpinState s = draw.state(n);
        const oat::Direction dir = draw.direction();
        const oat::CollectiveOps ops(n);
        const oat::Rotor rotor(ops, dir);
        const oat::Amplitudes out = rotor.apply(s.amplitudes(), theta);
        const double norm_err = std::abs(out.norm() - 1.0);
        const double sum_err = std::abs(out.cwiseAbs2().sum() - 1.0);
        t.record(std::max(norm_err, sum_err), 1e-10, describe(n, 0.0, theta));
    }
    return t;
}

/// qfi_pure(alpha, x) == qfi_pure(pi - alpha, x) for even N.
inline Tally plateau_symmetry(int cases, unsigned seed = 5005)
{
    Draws draw(seed);
    Tally t;
    for (int k = 0; k < cases; ++k) {
        const int n = draw.even_n(2, 200);
        const double alpha = draw.uniform(0.0, std::numbers::pi);
        const oat::CollectiveOps ops(n);
        const double a = oat::qfi_pure(oat::make_twisted_state(n, alpha), ops, oat::Direction::x_axis());
        const double b =
            oat::qfi_pure(oat::make_twisted_state(n, std::numbers::pi - alpha), ops, oat::Direction::x_axis());
        t.record(std::abs(a - b) / std::max(a, 1.0), 1e-9, describe(n, alpha, 0.0));
    }
    return t;
}

} // namespace props
