// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spin_state.hpp
 * @brief N-particle two-mode states in the population-imbalance basis.
 *
 * A state of N bosons shared between modes a and b is stored as N+1 complex
 * amplitudes over |m>, m = -N/2, ..., N/2, where |m> holds N/2+m particles
 * in mode a. Index i of the amplitude vector corresponds to m = i - N/2, so
 * amplitudes are always ordered by increasing m. Odd N gives half-integer m.
 */

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace oat {

using cplx = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;

/// Population imbalance m of basis index i for an N-particle system.
constexpr double imbalance(int n_particles, Eigen::Index i) noexcept
{
    return static_cast<double>(i) - 0.5 * static_cast<double>(n_particles);
}

/**
 * Unit vector selecting a collective-spin component J_n = J . n.
 *
 * Construction from arbitrary components normalizes; the axis helpers give
 * the three interferometer generators (x: beam splitter, y: Mach-Zehnder,
 * z: pure phase imprint).
 */
class Direction {
  public:
    Direction() = default;

    Direction(double x, double y, double z)
    {
        const double len = std::sqrt(x * x + y * y + z * z);
        if (!(len > 0.0) || !std::isfinite(len)) {
            throw std::invalid_argument("Direction: zero or non-finite vector");
        }
        v_ = Eigen::Vector3d(x / len, y / len, z / len);
    }

    explicit Direction(const Eigen::Vector3d& v) : Direction(v.x(), v.y(), v.z()) {}

    /// Direction at polar angle `polar` from +z and azimuth `azimuth` from +x.
    static Direction spherical(double polar, double azimuth)
    {
        return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                std::cos(polar)};
    }

    static Direction x_axis() { return {1.0, 0.0, 0.0}; }
    static Direction y_axis() { return {0.0, 1.0, 0.0}; }
    static Direction z_axis() { return {0.0, 0.0, 1.0}; }

    double x() const noexcept { return v_.x(); }
    double y() const noexcept { return v_.y(); }
    double z() const noexcept { return v_.z(); }
    const Eigen::Vector3d& vector() const noexcept { return v_; }

    bool operator==(const Direction&) const = default;

  private:
    Eigen::Vector3d v_{0.0, 0.0, 1.0};
};

/**
 * Pure state of N particles in the |m> basis.
 *
 * Immutable once built. The public constructor checks length and norm
 * (|1 - sum |c_m|^2| <= 1e-12); library operations that are exactly
 * norm-preserving build through the unchecked path.
 */
class SpinState {
  public:
    static constexpr double kNormTolerance = 1e-12;

    SpinState(int n_particles, Amplitudes amplitudes)
        : n_(n_particles), amp_(std::move(amplitudes))
    {
        if (n_ < 1) {
            throw std::invalid_argument("SpinState: n_particles must be >= 1");
        }
        if (amp_.size() != n_ + 1) {
            throw std::invalid_argument("SpinState: expected " + std::to_string(n_ + 1) +
                                        " amplitudes, got " + std::to_string(amp_.size()));
        }
        const double norm = amp_.squaredNorm();
        if (std::abs(norm - 1.0) > kNormTolerance) {
            throw std::invalid_argument("SpinState: amplitudes not normalized (norm^2 = " +
                                        std::to_string(norm) + ")");
        }
    }

    /// Builds without the norm check; callers guarantee the invariants.
    static SpinState trusted(int n_particles, Amplitudes amplitudes)
    {
        return SpinState(n_particles, std::move(amplitudes), Unchecked{});
    }

    int n_particles() const noexcept { return n_; }
    Eigen::Index dim() const noexcept { return amp_.size(); }
    const Amplitudes& amplitudes() const noexcept { return amp_; }
    cplx amplitude(Eigen::Index i) const { return amp_(i); }
    double m(Eigen::Index i) const noexcept { return imbalance(n_, i); }

    Eigen::VectorXd probabilities() const { return amp_.cwiseAbs2(); }

  private:
    struct Unchecked {};
    SpinState(int n, Amplitudes a, Unchecked) : n_(n), amp_(std::move(a)) {}

    int n_;
    Amplitudes amp_;
};

/**
 * Coherent state (a^+ + b^+)^N / sqrt(2^N N!) |0>.
 *
 * Amplitudes are the real binomial C_m = sqrt(2^-N binom(N, N/2+m)),
 * evaluated through lgamma so that large N does not overflow.
 */
inline SpinState make_coherent_state(int n_particles)
{
    if (n_particles < 1) {
        throw std::invalid_argument("make_coherent_state: n_particles must be >= 1");
    }
    const int n = n_particles;
    const double log_norm = std::lgamma(n + 1.0) - n * std::numbers::ln2;
    Amplitudes amp(n + 1);
    double total = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double log_c2 = log_norm - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        const double c = std::exp(0.5 * log_c2);
        amp(k) = c;
        total += c * c;
    }
    amp /= std::sqrt(total);
    return SpinState::trusted(n, std::move(amp));
}

/// One-axis twisting exp(-i alpha J_z^2): phase e^{-i alpha m^2} on each |m>.
inline SpinState apply_oat(const SpinState& state, double alpha)
{
    Amplitudes out = state.amplitudes();
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double m = state.m(i);
        out(i) *= std::polar(1.0, -alpha * m * m);
    }
    return SpinState::trusted(state.n_particles(), std::move(out));
}

/// Twisted coherent state |psi_alpha>.
inline SpinState make_twisted_state(int n_particles, double alpha)
{
    return apply_oat(make_coherent_state(n_particles), alpha);
}

/// <a|b>
inline cplx inner(const SpinState& a, const SpinState& b)
{
    return a.amplitudes().dot(b.amplitudes());
}

} // namespace oat
