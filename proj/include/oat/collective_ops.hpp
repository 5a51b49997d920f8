// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file collective_ops.hpp
 * @brief Collective angular-momentum operators J_x, J_y, J_z in the |m> basis.
 *
 * With J_+ = a^+ b raising m by one,
 *
 *   J_+ |m> = beta_m |m+1>,   beta_m = sqrt((N/2 + m + 1)(N/2 - m)),
 *
 * J_x = (J_+ + J_-)/2 and J_y = (J_+ - J_-)/(2i) are tridiagonal and J_z is
 * diag(m). Only the N couplings are stored; dense matrices are produced on
 * request.
 */

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "oat/spin_state.hpp"

namespace oat {

class CollectiveOps {
  public:
    explicit CollectiveOps(int n_particles) : n_(n_particles)
    {
        if (n_ < 1) {
            throw std::invalid_argument("CollectiveOps: n_particles must be >= 1");
        }
        coupling_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            // (N/2 + m + 1)(N/2 - m) with m = i - N/2
            coupling_[i] = std::sqrt(static_cast<double>(i + 1) * static_cast<double>(n_ - i));
        }
    }

    int n_particles() const noexcept { return n_; }
    Eigen::Index dim() const noexcept { return n_ + 1; }

    /// beta_m for the basis index i of m; zero at the top of the ladder.
    double coupling(Eigen::Index i) const noexcept
    {
        return (i >= 0 && i < n_) ? coupling_[static_cast<std::size_t>(i)] : 0.0;
    }

    /// beta_m looked up by imbalance value; zero outside [-N/2, N/2 - 1].
    double beta(double m) const noexcept
    {
        const double idx = m + 0.5 * n_;
        const auto i = static_cast<Eigen::Index>(std::llround(idx));
        if (std::abs(idx - static_cast<double>(i)) > 1e-9) {
            return 0.0;
        }
        return coupling(i);
    }

    double m(Eigen::Index i) const noexcept { return imbalance(n_, i); }

    /// Element <m_{i+1}| J_n |m_i> of the generator along n.
    cplx lower_element(const Direction& n, Eigen::Index i) const noexcept
    {
        return 0.5 * coupling(i) * cplx(n.x(), -n.y());
    }

    /// J_n |psi> in O(N).
    Amplitudes apply(const Direction& n, const Amplitudes& psi) const
    {
        const Eigen::Index d = dim();
        Amplitudes out(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            out(i) = n.z() * m(i) * psi(i);
        }
        const cplx lower(0.5 * n.x(), -0.5 * n.y());
        const cplx upper = std::conj(lower);
        for (Eigen::Index i = 0; i + 1 < d; ++i) {
            const double b = coupling(i);
            out(i + 1) += lower * b * psi(i);
            out(i) += upper * b * psi(i + 1);
        }
        return out;
    }

    Amplitudes apply(const Direction& n, const SpinState& s) const { return apply(n, s.amplitudes()); }

    Eigen::MatrixXcd jx() const { return dense(Direction::x_axis()); }
    Eigen::MatrixXcd jy() const { return dense(Direction::y_axis()); }
    Eigen::MatrixXcd jz() const { return dense(Direction::z_axis()); }

    Eigen::MatrixXcd dense(const Direction& n) const
    {
        const Eigen::Index d = dim();
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            out(i, i) = n.z() * m(i);
        }
        for (Eigen::Index i = 0; i + 1 < d; ++i) {
            out(i + 1, i) = lower_element(n, i);
            out(i, i + 1) = std::conj(out(i + 1, i));
        }
        return out;
    }

  private:
    int n_;
    std::vector<double> coupling_;
};

inline CollectiveOps build_ops(int n_particles) { return CollectiveOps(n_particles); }

/// <J_n> in state psi.
inline double expectation(const SpinState& s, const CollectiveOps& ops, const Direction& n)
{
    return s.amplitudes().dot(ops.apply(n, s)).real();
}

} // namespace oat
