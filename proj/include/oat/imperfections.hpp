// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file imperfections.hpp
 * @brief Detection imperfections: Gaussian jitter of the twisting strength and
 *        finite atom-counting resolution.
 *
 * Twisting jitter replaces |psi_alpha> by the mixture
 *
 *   rho_alpha = int d(a) P(a - alpha) |psi_a><psi_a|,  P Gaussian with width delta_alpha.
 *
 * Two representations are provided. mix_over_alpha() discretizes P with
 * Gauss-Hermite nodes into a weighted list of pure states. Because alpha only
 * enters through e^{-i alpha m^2}, the Gaussian average is also available in
 * closed form,
 *
 *   (rho_alpha)_{m m'} = c_m conj(c_m') e^{-i alpha (m^2 - m'^2)} e^{-delta_alpha^2 (m^2 - m'^2)^2 / 2},
 *
 * which alpha_averaged_density() builds exactly. The quadrature aliases badly
 * once delta_alpha |m^2 - m'^2| is large, so sweeps use the closed form.
 *
 * Finite resolution convolves p(m|theta) with a discrete Gaussian R(m) of
 * width sigma, truncated at ceil(6 sigma) and renormalized.
 */

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "oat/collective_ops.hpp"
#include "oat/metrology.hpp"
#include "oat/rotation.hpp"
#include "oat/spin_state.hpp"

namespace oat {

// ---------------------------------------------------------------------------
// Gauss-Hermite rule
// ---------------------------------------------------------------------------

/// Nodes and weights for int e^{-x^2} f(x) dx.
struct GaussHermiteRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Golub-Welsch: eigen-decomposition of the Hermite Jacobi matrix.
inline GaussHermiteRule gauss_hermite(int n)
{
    if (n < 1) {
        throw std::invalid_argument("gauss_hermite: need at least one node");
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) {
        sub(k - 1) = std::sqrt(0.5 * k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("gauss_hermite: eigensolver did not converge");
    }
    GaussHermiteRule rule{solver.eigenvalues(), Eigen::VectorXd(n)};
    const double mu0 = std::sqrt(std::numbers::pi);
    for (int k = 0; k < n; ++k) {
        const double v = solver.eigenvectors()(0, k);
        rule.weights(k) = mu0 * v * v;
    }
    return rule;
}

// ---------------------------------------------------------------------------
// Twisting jitter
// ---------------------------------------------------------------------------

inline constexpr int kDefaultAlphaNodes = 41;

struct EnsembleComponent {
    double weight;
    double alpha;
    SpinState state;
};

/// Weighted mixture of pure states sharing one particle number.
class StateEnsemble {
  public:
    static constexpr double kWeightTolerance = 1e-12;

    StateEnsemble(std::vector<EnsembleComponent> components, double alpha_center,
                  double delta_alpha)
        : components_(std::move(components)), alpha_center_(alpha_center),
          delta_alpha_(delta_alpha)
    {
        if (components_.empty()) {
            throw std::invalid_argument("StateEnsemble: no components");
        }
        double total = 0.0;
        const int n = components_.front().state.n_particles();
        for (const auto& c : components_) {
            if (!(c.weight > 0.0)) {
                throw std::invalid_argument("StateEnsemble: weights must be positive");
            }
            if (c.state.n_particles() != n) {
                throw std::invalid_argument("StateEnsemble: components differ in N");
            }
            total += c.weight;
        }
        if (std::abs(total - 1.0) > kWeightTolerance) {
            throw std::invalid_argument("StateEnsemble: weights do not sum to one");
        }
    }

    const std::vector<EnsembleComponent>& components() const noexcept { return components_; }
    std::size_t size() const noexcept { return components_.size(); }
    int n_particles() const noexcept { return components_.front().state.n_particles(); }
    double alpha_center() const noexcept { return alpha_center_; }
    double delta_alpha() const noexcept { return delta_alpha_; }

    /// sum_k w_k |psi_k><psi_k|
    Eigen::MatrixXcd density_matrix() const
    {
        const Eigen::Index d = components_.front().state.dim();
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
        for (const auto& c : components_) {
            rho.noalias() += c.weight * c.state.amplitudes() * c.state.amplitudes().adjoint();
        }
        return rho;
    }

  private:
    std::vector<EnsembleComponent> components_;
    double alpha_center_;
    double delta_alpha_;
};

/**
 * Gauss-Hermite discretization of the twisting jitter: node k sits at
 * alpha + sqrt(2) delta_alpha x_k with weight w_k / sqrt(pi). Nodes whose
 * weight underflows to zero are dropped. delta_alpha = 0 gives one component.
 */
inline StateEnsemble mix_over_alpha(int n_particles, double alpha, double delta_alpha,
                                    int nodes = kDefaultAlphaNodes)
{
    if (nodes < 1) {
        throw std::invalid_argument("mix_over_alpha: nodes must be >= 1");
    }
    if (!(delta_alpha >= 0.0)) {
        throw std::invalid_argument("mix_over_alpha: delta_alpha must be >= 0");
    }
    const SpinState coherent = make_coherent_state(n_particles);
    std::vector<EnsembleComponent> comps;
    if (delta_alpha == 0.0) {
        comps.push_back({1.0, alpha, apply_oat(coherent, alpha)});
        return StateEnsemble(std::move(comps), alpha, 0.0);
    }
    const GaussHermiteRule rule = gauss_hermite(nodes);
    const double scale = 1.0 / std::sqrt(std::numbers::pi);
    double total = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double w = rule.weights(k) * scale;
        if (w > 0.0) {
            total += w;
        }
    }
    for (int k = 0; k < nodes; ++k) {
        const double w = rule.weights(k) * scale;
        if (!(w > 0.0)) {
            continue;
        }
        const double a = alpha + std::numbers::sqrt2 * delta_alpha * rule.nodes(k);
        comps.push_back({w / total, a, apply_oat(coherent, a)});
    }
    return StateEnsemble(std::move(comps), alpha, delta_alpha);
}

/// Exact Gaussian average over alpha of |psi_alpha><psi_alpha|.
inline Eigen::MatrixXcd alpha_averaged_density(int n_particles, double alpha, double delta_alpha)
{
    if (!(delta_alpha >= 0.0)) {
        throw std::invalid_argument("alpha_averaged_density: delta_alpha must be >= 0");
    }
    const SpinState psi = make_twisted_state(n_particles, alpha);
    const Eigen::Index d = psi.dim();
    Eigen::MatrixXcd rho(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double mj = psi.m(j);
        for (Eigen::Index i = 0; i < d; ++i) {
            const double mi = psi.m(i);
            const double gap = mi * mi - mj * mj;
            const double damping = std::exp(-0.5 * delta_alpha * delta_alpha * gap * gap);
            rho(i, j) = psi.amplitude(i) * std::conj(psi.amplitude(j)) * damping;
        }
    }
    return rho;
}

/// theta -> sum_k w_k p_k(.|theta) for a Gauss-Hermite ensemble.
class EnsembleFamily {
  public:
    EnsembleFamily(const StateEnsemble& ensemble, const Rotor& rotor)
        : ensemble_(&ensemble), rotor_(&rotor)
    {
    }

    DistributionJet operator()(double theta) const
    {
        const Eigen::Index d = ensemble_->components().front().state.dim();
        DistributionJet jet{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
        for (const auto& c : ensemble_->components()) {
            const DistributionJet part =
                pure_state_jet(rotor_->apply(c.state.amplitudes(), theta), *rotor_);
            jet.p += c.weight * part.p;
            jet.dp += c.weight * part.dp;
        }
        return jet;
    }

  private:
    const StateEnsemble* ensemble_;
    const Rotor* rotor_;
};

/**
 * theta -> diag(U rho U^+) for an arbitrary density matrix.
 *
 * With r = U rho U^+, dr/dtheta = -i [J_n, r], so dp_m = 2 Im (J_n r)_{mm};
 * J_n being tridiagonal this costs O(N) once r is known.
 */
class DensityFamily {
  public:
    DensityFamily(Eigen::MatrixXcd rho, const Rotor& rotor) : rho_(std::move(rho)), rotor_(&rotor)
    {
        if (rho_.rows() != rotor.ops().dim() || rho_.cols() != rho_.rows()) {
            throw std::invalid_argument("DensityFamily: density matrix has wrong shape");
        }
    }

    DistributionJet operator()(double theta) const
    {
        const Eigen::MatrixXcd u = rotor_->matrix(theta);
        const Eigen::MatrixXcd r = u * rho_ * u.adjoint();
        const CollectiveOps& ops = rotor_->ops();
        const Direction& n = rotor_->direction();
        const Eigen::Index d = r.rows();
        DistributionJet jet{Eigen::VectorXd(d), Eigen::VectorXd(d)};
        for (Eigen::Index i = 0; i < d; ++i) {
            jet.p(i) = r(i, i).real();
            cplx z = n.z() * ops.m(i) * r(i, i);
            if (i > 0) {
                z += ops.lower_element(n, i - 1) * r(i - 1, i);
            }
            if (i + 1 < d) {
                z += std::conj(ops.lower_element(n, i)) * r(i + 1, i);
            }
            jet.dp(i) = 2.0 * z.imag();
        }
        return jet;
    }

  private:
    Eigen::MatrixXcd rho_;
    const Rotor* rotor_;
};

/// Outcome distribution of a mixed state.
inline OutcomeDistribution outcome_distribution(const DensityFamily& family, double theta,
                                                const Direction& n, Provenance provenance = {})
{
    return {family(theta).p, theta, n, provenance};
}

/// Large-N estimate of the plateau FI under twisting jitter:
/// (N^2/4) / sqrt(1 + 2 N delta_alpha^2).
inline double dalpha_scaling_prediction(int n_particles, double delta_alpha)
{
    const double n = n_particles;
    return 0.25 * n * n / std::sqrt(1.0 + 2.0 * n * delta_alpha * delta_alpha);
}

// ---------------------------------------------------------------------------
// Detector resolution
// ---------------------------------------------------------------------------

/// Discrete Gaussian R(k) ~ exp(-k^2 / 2 sigma^2), k in [-half_width, half_width].
struct ResolutionKernel {
    double sigma;
    int half_width;
    std::vector<double> weights;

    double operator()(int k) const
    {
        return std::abs(k) > half_width ? 0.0 : weights[static_cast<std::size_t>(k + half_width)];
    }
};

inline ResolutionKernel make_resolution_kernel(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("make_resolution_kernel: sigma must be positive");
    }
    const int h = static_cast<int>(std::ceil(6.0 * sigma));
    ResolutionKernel kernel{sigma, h, std::vector<double>(static_cast<std::size_t>(2 * h + 1))};
    double total = 0.0;
    for (int k = -h; k <= h; ++k) {
        const double w = std::exp(-0.5 * k * k / (sigma * sigma));
        kernel.weights[static_cast<std::size_t>(k + h)] = w;
        total += w;
    }
    for (double& w : kernel.weights) {
        w /= total;
    }
    return kernel;
}

namespace detail {

inline Eigen::VectorXd convolve_raw(const Eigen::VectorXd& p, const ResolutionKernel& kernel)
{
    const auto d = static_cast<int>(p.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) {
        const int lo = std::max(0, i - kernel.half_width);
        const int hi = std::min(d - 1, i + kernel.half_width);
        double acc = 0.0;
        double window = 0.0;
        for (int j = lo; j <= hi; ++j) {
            acc += kernel(i - j) * p(j);
            window += kernel(i - j);
        }
        out(i) = acc / window;
    }
    return out;
}

} // namespace detail

/// p~(m) = sum_m' R(m - m') p(m'). Near the edges each output point is
/// normalized by the part of its kernel window that lies on the grid, then the
/// whole distribution is renormalized.
inline DistributionJet convolve_resolution(const DistributionJet& jet, const ResolutionKernel& kernel)
{
    const Eigen::VectorXd q = detail::convolve_raw(jet.p, kernel);
    const Eigen::VectorXd dq = detail::convolve_raw(jet.dp, kernel);
    const double s = q.sum();
    const double ds = dq.sum();
    return {q / s, dq / s - (ds / (s * s)) * q};
}

inline OutcomeDistribution convolve_resolution(const OutcomeDistribution& dist,
                                               const ResolutionKernel& kernel)
{
    const Eigen::VectorXd q = detail::convolve_raw(dist.probabilities(), kernel);
    Provenance prov = dist.provenance();
    prov.sigma = kernel.sigma;
    return {q / q.sum(), dist.theta(), dist.direction(), prov};
}

/// Coarse-grained view of another outcome family.
template <OutcomeFamily Base>
class ResolvedFamily {
  public:
    ResolvedFamily(Base base, ResolutionKernel kernel)
        : base_(std::move(base)), kernel_(std::move(kernel))
    {
    }

    DistributionJet operator()(double theta) const
    {
        return convolve_resolution(base_(theta), kernel_);
    }

  private:
    Base base_;
    ResolutionKernel kernel_;
};

// ---------------------------------------------------------------------------
// Power-law fits
// ---------------------------------------------------------------------------

struct PowerLawFit {
    double prefactor;
    double exponent;
};

/// Least squares of log y = log(prefactor) + exponent log x.
inline PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw std::invalid_argument("fit_power_law: x and y differ in length");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("fit_power_law: need at least two points");
    }
    const auto n = static_cast<double>(x.size());
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("fit_power_law: inputs must be positive");
        }
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_power_law: x values are all equal");
    }
    const double slope = sxy / sxx;
    return {std::exp(my - slope * mx), slope};
}

/// Fits fi_ratio ~ prefactor * sigma^exponent; needs at least three points.
inline PowerLawFit resolution_scaling_fit(std::span<const double> sigma,
                                          std::span<const double> fi_ratio)
{
    if (sigma.size() < 3) {
        throw std::invalid_argument("resolution_scaling_fit: need at least three points");
    }
    return fit_power_law(sigma, fi_ratio);
}

} // namespace oat
