// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file metrology.hpp
 * @brief Spin squeezing, quantum and classical Fisher information, Cramer-Rao
 *        bounds and distribution fidelity for states in the |m> basis.
 *
 * Classical Fisher information is computed from a "jet" (p, dp/dtheta) of the
 * outcome distribution. The derivative is analytic: for a pure state,
 *
 *   d/dtheta <m|U_n(theta)|psi> = <m|(-i J_n) U_n(theta)|psi>,
 *
 * so dp_m = 2 Re(conj(c_m) (-i J_n c)_m). Mixed and coarse-grained families
 * (see imperfections.hpp) produce jets through the same interface.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "oat/collective_ops.hpp"
#include "oat/detail/nelder_mead.hpp"
#include "oat/rotation.hpp"
#include "oat/spin_state.hpp"

namespace oat {

/// Probe angle used wherever a single "theta close to zero" is needed.
inline constexpr double kDefaultThetaProbe = 0.02 * std::numbers::pi;

/// Returned by spin_squeezing when the mean spin is parallel to n1.
inline constexpr double kSqueezingUndefined = std::numeric_limits<double>::infinity();

enum class Interferometer { BeamSplitter, MachZehnder, Phase, Custom };

inline Direction interferometer_direction(Interferometer kind)
{
    switch (kind) {
    case Interferometer::BeamSplitter: return Direction::x_axis();
    case Interferometer::MachZehnder: return Direction::y_axis();
    case Interferometer::Phase: return Direction::z_axis();
    case Interferometer::Custom: break;
    }
    throw std::invalid_argument("interferometer_direction: custom interferometer has no fixed axis");
}

inline std::string_view to_string(Interferometer kind)
{
    switch (kind) {
    case Interferometer::BeamSplitter: return "bs";
    case Interferometer::MachZehnder: return "mzi";
    case Interferometer::Phase: return "phase";
    case Interferometer::Custom: return "custom";
    }
    return "custom";
}

inline Interferometer classify(const Direction& n)
{
    if (n == Direction::x_axis()) return Interferometer::BeamSplitter;
    if (n == Direction::y_axis()) return Interferometer::MachZehnder;
    if (n == Direction::z_axis()) return Interferometer::Phase;
    return Interferometer::Custom;
}

/// Imperfection settings a distribution was generated with.
struct Provenance {
    std::optional<double> alpha;
    double delta_alpha = 0.0;
    std::optional<double> sigma;
};

/**
 * p(m|theta) over the N+1 outcomes, ordered by increasing m.
 *
 * Negative entries above -1e-15 are clipped to zero; anything more negative,
 * or a total differing from one by more than 1e-10, is rejected.
 */
class OutcomeDistribution {
  public:
    static constexpr double kSumTolerance = 1e-10;
    static constexpr double kClipThreshold = 1e-15;

    OutcomeDistribution(Eigen::VectorXd probabilities, double theta, Direction direction,
                        Provenance provenance = {})
        : p_(std::move(probabilities)), theta_(theta), direction_(direction),
          provenance_(provenance)
    {
        if (p_.size() < 2) {
            throw std::invalid_argument("OutcomeDistribution: need at least two outcomes");
        }
        for (Eigen::Index i = 0; i < p_.size(); ++i) {
            if (!(p_(i) >= 0.0)) {
                if (p_(i) >= -kClipThreshold) {
                    p_(i) = 0.0;
                } else {
                    throw std::invalid_argument("OutcomeDistribution: negative probability " +
                                                std::to_string(p_(i)));
                }
            }
        }
        if (std::abs(p_.sum() - 1.0) > kSumTolerance) {
            throw std::invalid_argument("OutcomeDistribution: probabilities sum to " +
                                        std::to_string(p_.sum()));
        }
    }

    const Eigen::VectorXd& probabilities() const noexcept { return p_; }
    double operator[](Eigen::Index i) const { return p_(i); }
    Eigen::Index size() const noexcept { return p_.size(); }
    int n_particles() const noexcept { return static_cast<int>(p_.size()) - 1; }
    double theta() const noexcept { return theta_; }
    const Direction& direction() const noexcept { return direction_; }
    Interferometer interferometer() const { return classify(direction_); }
    const Provenance& provenance() const noexcept { return provenance_; }

  private:
    Eigen::VectorXd p_;
    double theta_;
    Direction direction_;
    Provenance provenance_;
};

/// Complex output amplitudes C~_m = <m|U_n(theta)|psi>.
struct OutcomeAmplitudes {
    Amplitudes amplitudes;
    double theta = 0.0;
    Direction direction;
    Provenance provenance;

    Eigen::VectorXd magnitudes() const { return amplitudes.cwiseAbs(); }
    Eigen::VectorXd phases() const
    {
        Eigen::VectorXd out(amplitudes.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            out(i) = std::arg(amplitudes(i));
        }
        return out;
    }
    OutcomeDistribution distribution() const
    {
        return {amplitudes.cwiseAbs2(), theta, direction, provenance};
    }
};

// ---------------------------------------------------------------------------
// First and second moments
// ---------------------------------------------------------------------------

/// Mean spin <J> and symmetrized covariance
/// G_ij = <J_i J_j + J_j J_i>/2 - <J_i><J_j>, so Var(J_n) = n^T G n.
struct SpinMoments {
    Eigen::Vector3d mean;
    Eigen::Matrix3d covariance;
};

inline SpinMoments spin_moments(const SpinState& s, const CollectiveOps& ops)
{
    const std::array<Direction, 3> axes{Direction::x_axis(), Direction::y_axis(),
                                        Direction::z_axis()};
    std::array<Amplitudes, 3> centered;
    SpinMoments out;
    for (int k = 0; k < 3; ++k) {
        Amplitudes j = ops.apply(axes[k], s);
        out.mean(k) = s.amplitudes().dot(j).real();
        centered[k] = j - out.mean(k) * s.amplitudes();
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            const double g = centered[a].dot(centered[b]).real();
            out.covariance(a, b) = g;
            out.covariance(b, a) = g;
        }
    }
    return out;
}

/// <(J_n - <J_n>)^2>, computed as ||(J_n - <J_n>) psi||^2.
inline double variance(const SpinState& s, const CollectiveOps& ops, const Direction& n)
{
    const Amplitudes j = ops.apply(n, s);
    const double mean = s.amplitudes().dot(j).real();
    return (j - mean * s.amplitudes()).squaredNorm();
}

/// Pure-state QFI for the rotation generated by J_n: 4 Var(J_n).
inline double qfi_pure(const SpinState& s, const CollectiveOps& ops, const Direction& n)
{
    return 4.0 * variance(s, ops, n);
}

struct DirectionalOptimum {
    double value;
    Direction direction;
};

namespace detail {

inline Direction canonical_sign(const Eigen::Vector3d& v)
{
    for (int k = 0; k < 3; ++k) {
        if (std::abs(v(k)) > 1e-12) {
            return Direction(v(k) < 0.0 ? Eigen::Vector3d(-v) : v);
        }
    }
    return Direction(v);
}

} // namespace detail

/// max_n 4 n^T G n: four times the top eigenvalue of the covariance matrix.
inline DirectionalOptimum qfi_optimized(const SpinMoments& moments)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(moments.covariance);
    const Eigen::Vector3d top = solver.eigenvectors().col(2);
    return {4.0 * std::max(solver.eigenvalues()(2), 0.0), detail::canonical_sign(top)};
}

inline DirectionalOptimum qfi_optimized(const SpinState& s, const CollectiveOps& ops)
{
    return qfi_optimized(spin_moments(s, ops));
}

// ---------------------------------------------------------------------------
// Spin squeezing
// ---------------------------------------------------------------------------

/// Deterministic orthonormal (n2, n3) completing n1: Gram-Schmidt on the
/// coordinate axis least aligned with n1, then n3 = n1 x n2.
inline std::pair<Direction, Direction> orthonormal_completion(const Direction& n1)
{
    const Eigen::Vector3d& v = n1.vector();
    int axis = 0;
    for (int k = 1; k < 3; ++k) {
        if (std::abs(v(k)) < std::abs(v(axis))) {
            axis = k;
        }
    }
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(axis) = 1.0;
    const Eigen::Vector3d n2 = (e - v.dot(e) * v).normalized();
    return {Direction(n2), Direction(v.cross(n2))};
}

namespace detail {

/// Transverse mean-spin lengths below 1e-12 of the maximal spin N/2 count as
/// zero; squared this is the sentinel threshold for the denominator.
inline double squeezing_denominator_floor(int n_particles)
{
    const double half = 0.5 * n_particles;
    return std::max(1e-30, 1e-24 * half * half);
}

inline double squeezing_from_moments(const SpinMoments& mom, int n_particles,
                                     const Eigen::Vector3d& n1)
{
    const double along = n1.dot(mom.mean);
    const double transverse = mom.mean.squaredNorm() - along * along;
    if (!(transverse >= squeezing_denominator_floor(n_particles))) {
        return kSqueezingUndefined;
    }
    return n_particles * (n1.dot(mom.covariance * n1)) / transverse;
}

} // namespace detail

/// xi^2 = N Var(J_n1) / (<J_n2>^2 + <J_n3>^2) for an explicit orthonormal triad.
inline double spin_squeezing(const SpinState& s, const CollectiveOps& ops, const Direction& n1,
                             const Direction& n2, const Direction& n3)
{
    const double m2 = expectation(s, ops, n2);
    const double m3 = expectation(s, ops, n3);
    const double denom = m2 * m2 + m3 * m3;
    if (!(denom >= detail::squeezing_denominator_floor(s.n_particles()))) {
        return kSqueezingUndefined;
    }
    return s.n_particles() * variance(s, ops, n1) / denom;
}

inline double spin_squeezing(const SpinState& s, const CollectiveOps& ops, const Direction& n1)
{
    const auto [n2, n3] = orthonormal_completion(n1);
    return spin_squeezing(s, ops, n1, n2, n3);
}

/**
 * Minimum of xi^2 over the unit sphere.
 *
 * A 33 x 64 (polar x azimuth) grid seeds a Nelder-Mead refinement in the two
 * angles; ties on the grid keep the first point found. Returns the sentinel
 * when every direction is degenerate.
 */
inline DirectionalOptimum optimize_squeezing(const SpinMoments& mom, int n_particles)
{
    constexpr int kPolar = 33;
    constexpr int kAzimuth = 64;
    const double d_polar = std::numbers::pi / (kPolar - 1);
    const double d_azimuth = 2.0 * std::numbers::pi / kAzimuth;

    auto xi2 = [&](const std::array<double, 2>& a) {
        return detail::squeezing_from_moments(mom, n_particles,
                                              Direction::spherical(a[0], a[1]).vector());
    };

    std::array<double, 2> best{0.0, 0.0};
    double best_value = kSqueezingUndefined;
    for (int i = 0; i < kPolar; ++i) {
        for (int j = 0; j < kAzimuth; ++j) {
            const std::array<double, 2> a{i * d_polar, j * d_azimuth};
            const double v = xi2(a);
            if (v < best_value) {
                best = a;
                best_value = v;
            }
        }
    }
    if (!std::isfinite(best_value)) {
        return {kSqueezingUndefined, Direction::spherical(best[0], best[1])};
    }
    const auto refined = detail::nelder_mead_2d(xi2, best, {0.5 * d_polar, 0.5 * d_azimuth});
    if (refined.value < best_value) {
        best = refined.x;
        best_value = refined.value;
    }
    return {best_value, Direction::spherical(best[0], best[1])};
}

inline DirectionalOptimum optimize_squeezing(const SpinState& s, const CollectiveOps& ops)
{
    return optimize_squeezing(spin_moments(s, ops), s.n_particles());
}

// ---------------------------------------------------------------------------
// Fast-phase QFI estimate
// ---------------------------------------------------------------------------

/**
 * Plateau estimate of the BS (+) / MZI (-) QFI of the twisted coherent state,
 *
 *   2 [ sum C_m^2 beta_m^2  +/-  Re sum C_m C_{m+2} beta_m beta_{m+1} e^{4 i alpha m} ],
 *
 * evaluated as written for any alpha. It neglects <J_x>, <J_y>, which is only
 * justified once alpha >~ N^{-1/2}.
 */
inline double qfi_fast_phase_approx(int n_particles, double alpha, Interferometer which)
{
    if (which != Interferometer::BeamSplitter && which != Interferometer::MachZehnder) {
        throw std::invalid_argument("qfi_fast_phase_approx: only bs and mzi are defined");
    }
    const SpinState coherent = make_coherent_state(n_particles);
    const CollectiveOps ops(n_particles);
    const Eigen::Index d = coherent.dim();
    double diag = 0.0;
    cplx cross = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double c = coherent.amplitude(i).real();
        const double b = ops.coupling(i);
        diag += c * c * b * b;
        if (i + 2 < d) {
            const double m = coherent.m(i);
            cross += c * coherent.amplitude(i + 2).real() * b * ops.coupling(i + 1) *
                     std::polar(1.0, 4.0 * alpha * m);
        }
    }
    const double sign = which == Interferometer::BeamSplitter ? 1.0 : -1.0;
    return 2.0 * (diag + sign * cross.real());
}

// ---------------------------------------------------------------------------
// Outcome distributions
// ---------------------------------------------------------------------------

inline OutcomeAmplitudes outcome_amplitudes(const SpinState& s, const Rotor& rotor, double theta)
{
    return {rotor.apply(s.amplitudes(), theta), theta, rotor.direction(), {}};
}

inline OutcomeAmplitudes outcome_amplitudes(const SpinState& s, const CollectiveOps& ops,
                                            const Direction& n, double theta)
{
    return outcome_amplitudes(s, Rotor(ops, n), theta);
}

inline OutcomeDistribution outcome_distribution(const SpinState& s, const Rotor& rotor,
                                                double theta)
{
    return outcome_amplitudes(s, rotor, theta).distribution();
}

inline OutcomeDistribution outcome_distribution(const SpinState& s, const CollectiveOps& ops,
                                                const Direction& n, double theta)
{
    return outcome_distribution(s, Rotor(ops, n), theta);
}

// ---------------------------------------------------------------------------
// Classical Fisher information
// ---------------------------------------------------------------------------

/// Outcome probabilities and their theta-derivatives at one angle.
struct DistributionJet {
    Eigen::VectorXd p;
    Eigen::VectorXd dp;
};

/// Any theta -> DistributionJet map: pure, mixed, or coarse-grained.
template <typename F>
concept OutcomeFamily = requires(const F& f, double theta) {
    { f(theta) } -> std::convertible_to<DistributionJet>;
};

/// Terms whose probability is below this fraction of the largest are skipped.
inline constexpr double kFisherRelativeFloor = 1e-14;

/// sum_m (dp_m)^2 / p_m over outcomes with non-negligible probability.
inline double fisher_information(const DistributionJet& jet)
{
    const double floor = kFisherRelativeFloor * jet.p.maxCoeff();
    double f = 0.0;
    for (Eigen::Index i = 0; i < jet.p.size(); ++i) {
        if (jet.p(i) > floor && jet.p(i) > 0.0) {
            f += jet.dp(i) * jet.dp(i) / jet.p(i);
        }
    }
    return f;
}

/// Jet of a rotated pure state: p = |c|^2, dp = 2 Re(conj(c) (-i J_n c)).
inline DistributionJet pure_state_jet(const Amplitudes& rotated, const Rotor& rotor)
{
    const Amplitudes d = rotor.generator_derivative(rotated);
    DistributionJet jet{rotated.cwiseAbs2(), Eigen::VectorXd(rotated.size())};
    for (Eigen::Index i = 0; i < rotated.size(); ++i) {
        jet.dp(i) = 2.0 * (std::conj(rotated(i)) * d(i)).real();
    }
    return jet;
}

/// theta -> p(.|theta) for a pure state and a fixed interferometer.
class PureStateFamily {
  public:
    PureStateFamily(SpinState state, const Rotor& rotor) : state_(std::move(state)), rotor_(&rotor)
    {
    }

    DistributionJet operator()(double theta) const
    {
        return pure_state_jet(rotor_->apply(state_.amplitudes(), theta), *rotor_);
    }

  private:
    SpinState state_;
    const Rotor* rotor_;
};

template <OutcomeFamily F>
double classical_fi(const F& family, double theta)
{
    return fisher_information(family(theta));
}

inline double classical_fi(const SpinState& s, const Rotor& rotor, double theta)
{
    return classical_fi(PureStateFamily(s, rotor), theta);
}

/**
 * Classical FI rewritten in amplitude magnitudes |C~_m| and phases phi_m:
 *
 *   BS:  sum_m ( beta_m sin(phi_{m+1}-phi_m)|C~_{m+1}| - beta_{m-1} sin(phi_m-phi_{m-1})|C~_{m-1}| )^2
 *   MZI: sum_m ( beta_m cos(phi_{m+1}-phi_m)|C~_{m+1}| - beta_{m-1} cos(phi_m-phi_{m-1})|C~_{m-1}| )^2
 *
 * Neighbours outside [-N/2, N/2] contribute zero. Outcomes that the direct
 * formula skips as negligible are skipped here too.
 */
inline double fi_exact_decomposition(const OutcomeAmplitudes& out, const CollectiveOps& ops)
{
    const Interferometer kind = classify(out.direction);
    if (kind != Interferometer::BeamSplitter && kind != Interferometer::MachZehnder) {
        throw std::invalid_argument("fi_exact_decomposition: only bs and mzi are defined");
    }
    const bool bs = kind == Interferometer::BeamSplitter;
    const Eigen::VectorXd mag = out.magnitudes();
    const Eigen::VectorXd phi = out.phases();
    const Eigen::Index d = mag.size();
    const double floor = kFisherRelativeFloor * mag.cwiseAbs2().maxCoeff();
    auto trig = [bs](double x) { return bs ? std::sin(x) : std::cos(x); };

    double f = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!(mag(i) * mag(i) > floor)) {
            continue;
        }
        double up = 0.0;
        double down = 0.0;
        if (i + 1 < d) {
            up = ops.coupling(i) * trig(phi(i + 1) - phi(i)) * mag(i + 1);
        }
        if (i > 0) {
            down = ops.coupling(i - 1) * trig(phi(i) - phi(i - 1)) * mag(i - 1);
        }
        f += (up - down) * (up - down);
    }
    return f;
}

/// Plateau estimate of the classical FI: sum_m beta_m^2 |C~_m|^2.
inline double fi_plateau_approx(const OutcomeAmplitudes& out, const CollectiveOps& ops)
{
    double f = 0.0;
    for (Eigen::Index i = 0; i < out.amplitudes.size(); ++i) {
        const double b = ops.coupling(i);
        f += b * b * std::norm(out.amplitudes(i));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Bounds and distances
// ---------------------------------------------------------------------------

/// Cramer-Rao bound 1/sqrt(mu F) on the phase error after mu repetitions.
inline double crlb(double fisher, long long repetitions = 1)
{
    if (!(fisher > 0.0)) {
        throw std::invalid_argument("crlb: Fisher information must be positive");
    }
    if (repetitions < 1) {
        throw std::invalid_argument("crlb: repetitions must be >= 1");
    }
    return 1.0 / std::sqrt(static_cast<double>(repetitions) * fisher);
}

/// Bhattacharyya overlap sum_n sqrt(p_n q_n).
inline double fidelity(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size()) {
        throw std::invalid_argument("fidelity: outcome grids differ in size");
    }
    double f = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        f += std::sqrt(std::max(p[i], 0.0) * std::max(q[i], 0.0));
    }
    return std::min(f, 1.0);
}

inline double fidelity(const OutcomeDistribution& p, const OutcomeDistribution& q)
{
    const auto& a = p.probabilities();
    const auto& b = q.probabilities();
    return fidelity(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                    std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

// ---------------------------------------------------------------------------
// Aggregate report
// ---------------------------------------------------------------------------

struct MetrologyReport {
    double alpha;
    double xi2_optimized;
    Direction xi2_direction;
    double qfi_bs;
    double qfi_mzi;
    double qfi_optimized;
    Direction qfi_direction;
    double fi_bs;
    double fi_mzi;
    double theta_probe;
};

/// Rotors for the two fixed interferometers at one particle number.
struct InterferometerPair {
    explicit InterferometerPair(int n_particles)
        : ops(n_particles), bs(ops, Direction::x_axis()), mzi(ops, Direction::y_axis())
    {
    }
    CollectiveOps ops;
    Rotor bs;
    Rotor mzi;
};

inline MetrologyReport metrology_report(const InterferometerPair& rig, double alpha,
                                        double theta_probe = kDefaultThetaProbe)
{
    const SpinState psi = make_twisted_state(rig.ops.n_particles(), alpha);
    const SpinMoments mom = spin_moments(psi, rig.ops);
    const auto squeezing = optimize_squeezing(mom, psi.n_particles());
    const auto qfi_opt = qfi_optimized(mom);
    return MetrologyReport{
        .alpha = alpha,
        .xi2_optimized = squeezing.value,
        .xi2_direction = squeezing.direction,
        .qfi_bs = 4.0 * mom.covariance(0, 0),
        .qfi_mzi = 4.0 * mom.covariance(1, 1),
        .qfi_optimized = qfi_opt.value,
        .qfi_direction = qfi_opt.direction,
        .fi_bs = classical_fi(psi, rig.bs, theta_probe),
        .fi_mzi = classical_fi(psi, rig.mzi, theta_probe),
        .theta_probe = theta_probe,
    };
}

inline MetrologyReport metrology_report(int n_particles, double alpha,
                                        double theta_probe = kDefaultThetaProbe)
{
    return metrology_report(InterferometerPair(n_particles), alpha, theta_probe);
}

} // namespace oat
