// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file rotation.hpp
 * @brief Interferometer rotations U_n(theta) = exp(-i theta J_n).
 *
 * J_n is Hermitian tridiagonal. Writing n = (r cos(phi), r sin(phi), n_z),
 *
 *   J_n = D T D^+,   D = diag(e^{-i phi m}),
 *
 * with T real symmetric tridiagonal (diagonal n_z m, off-diagonal r beta_m / 2).
 * A Rotor diagonalizes T once, T = V L V^T, after which every angle costs two
 * dense mat-vecs:
 *
 *   U_n(theta) psi = D V e^{-i theta L} V^T D^+ psi.
 */

#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "oat/collective_ops.hpp"
#include "oat/spin_state.hpp"

namespace oat {

class Rotor {
  public:
    Rotor(const CollectiveOps& ops, const Direction& n) : ops_(ops), n_(n)
    {
        const Eigen::Index d = ops.dim();
        const double r = std::hypot(n.x(), n.y());
        azimuth_ = (r > 0.0) ? std::atan2(n.y(), n.x()) : 0.0;

        Eigen::VectorXd diag(d);
        Eigen::VectorXd sub(d > 1 ? d - 1 : 0);
        for (Eigen::Index i = 0; i < d; ++i) {
            diag(i) = n.z() * ops.m(i);
        }
        for (Eigen::Index i = 0; i + 1 < d; ++i) {
            sub(i) = 0.5 * r * ops.coupling(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("Rotor: tridiagonal eigensolver did not converge");
        }
        eigenvalues_ = solver.eigenvalues();
        eigenvectors_ = solver.eigenvectors();

        phase_.resize(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            phase_(i) = std::polar(1.0, -azimuth_ * ops.m(i));
        }
    }

    const CollectiveOps& ops() const noexcept { return ops_; }
    const Direction& direction() const noexcept { return n_; }
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

    Amplitudes apply(const Amplitudes& psi, double theta) const
    {
        const Amplitudes w = phase_.conjugate().cwiseProduct(psi);
        Amplitudes c = real_product(eigenvectors_.transpose(), w);
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            c(k) *= std::polar(1.0, -theta * eigenvalues_(k));
        }
        return phase_.cwiseProduct(real_product(eigenvectors_, c));
    }

    SpinState apply(const SpinState& s, double theta) const
    {
        return SpinState::trusted(s.n_particles(), apply(s.amplitudes(), theta));
    }

    /// Dense exp(-i theta J_n).
    Eigen::MatrixXcd matrix(double theta) const
    {
        Eigen::VectorXcd e(eigenvalues_.size());
        for (Eigen::Index k = 0; k < e.size(); ++k) {
            e(k) = std::polar(1.0, -theta * eigenvalues_(k));
        }
        const Eigen::MatrixXcd v = eigenvectors_.cast<cplx>();
        Eigen::MatrixXcd u = v * e.asDiagonal() * v.transpose();
        return phase_.asDiagonal() * u * phase_.conjugate().asDiagonal();
    }

    /// -i J_n psi, the theta-derivative of U_n(theta) psi at the rotated state.
    Amplitudes generator_derivative(const Amplitudes& rotated) const
    {
        return cplx(0.0, -1.0) * ops_.apply(n_, rotated);
    }

  private:
    template <typename Mat>
    static Amplitudes real_product(const Mat& a, const Amplitudes& v)
    {
        const Eigen::VectorXd re = a * v.real();
        const Eigen::VectorXd im = a * v.imag();
        Amplitudes out(re.size());
        out.real() = re;
        out.imag() = im;
        return out;
    }

    CollectiveOps ops_;
    Direction n_;
    double azimuth_ = 0.0;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    Eigen::VectorXcd phase_;
};

/// exp(-i theta J_n) |state>. Builds a fresh Rotor; hold a Rotor for sweeps.
inline SpinState rotate(const SpinState& state, const Direction& n, double theta)
{
    const Rotor rotor(CollectiveOps(state.n_particles()), n);
    return rotor.apply(state, theta);
}

} // namespace oat
