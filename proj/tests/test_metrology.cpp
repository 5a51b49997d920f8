// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oat/metrology.hpp"
#include "oracle/brute_force.hpp"

using namespace oat;
using std::numbers::pi;

namespace {

std::vector<double> oracle_probs(int n, double alpha, double nx, double ny, double nz, double theta)
{
    const auto ops = oracle::ladder_ops(n);
    return oracle::probabilities(
        oracle::apply(oracle::rotation(ops, nx, ny, nz, theta), oracle::twisted_coherent(n, alpha)));
}

} // namespace

// --- variance / QFI ------------------------------------------------------

TEST(Variance, CoherentState)
{
    const int n = 100;
    const SpinState s = make_coherent_state(n);
    const CollectiveOps ops(n);
    EXPECT_NEAR(variance(s, ops, Direction::z_axis()), 25.0, 1e-9);
    EXPECT_NEAR(variance(s, ops, Direction::x_axis()), 0.0, 1e-10);
}

TEST(Variance, HeisenbergPointAlongX)
{
    const CollectiveOps ops(100);
    EXPECT_NEAR(variance(make_twisted_state(100, pi / 2), ops, Direction::x_axis()), 2500.0, 1e-6);
}

TEST(QfiPure, Examples)
{
    const CollectiveOps ops(100);
    EXPECT_NEAR(qfi_pure(make_coherent_state(100), ops, Direction::y_axis()), 100.0, 1e-9);
    EXPECT_NEAR(qfi_pure(make_twisted_state(100, pi / 2), ops, Direction::x_axis()), 10000.0, 1e-2);
    EXPECT_NEAR(qfi_pure(make_twisted_state(100, 1.0), ops, Direction::x_axis()), 5000.0, 250.0);
}

TEST(QfiOptimized, CoherentIsShotNoiseWithTransverseDirection)
{
    const CollectiveOps ops(100);
    const auto q = qfi_optimized(make_coherent_state(100), ops);
    EXPECT_NEAR(q.value, 100.0, 1e-9);
    EXPECT_NEAR(q.direction.x(), 0.0, 1e-9);
}

TEST(QfiOptimized, DominatesFixedDirections)
{
    const CollectiveOps ops(100);
    const SpinState s = make_twisted_state(100, 1.0);
    const double best = qfi_optimized(s, ops).value;
    EXPECT_GE(best, qfi_pure(s, ops, Direction::x_axis()) * (1 - 1e-12));
    EXPECT_GE(best, qfi_pure(s, ops, Direction::y_axis()) * (1 - 1e-12));
    EXPECT_NEAR(qfi_optimized(make_twisted_state(100, pi / 2), ops).value, 10000.0, 1e-2);
}

TEST(QfiOptimized, BoundaryValues)
{
    const CollectiveOps ops(100);
    EXPECT_NEAR(qfi_optimized(make_twisted_state(100, 0.0), ops).value, 100.0, 1e-4);
    EXPECT_NEAR(qfi_optimized(make_twisted_state(100, pi), ops).value, 100.0, 1e-4);
}

// --- squeezing -------------------------------------------------------------

TEST(Squeezing, CoherentBenchmarks)
{
    const CollectiveOps ops(100);
    const SpinState s = make_coherent_state(100);
    EXPECT_NEAR(spin_squeezing(s, ops, Direction::z_axis()), 1.0, 1e-10);
    EXPECT_EQ(spin_squeezing(s, ops, Direction::x_axis()), kSqueezingUndefined);
    EXPECT_NEAR(optimize_squeezing(s, ops).value, 1.0, 1e-6);
}

TEST(Squeezing, CompletionInvariance)
{
    const CollectiveOps ops(40);
    const SpinState s = rotate(make_twisted_state(40, 0.05), Direction(0.1, 0.4, 0.9), 0.6);
    const Direction n1(0.3, -0.2, 0.9);
    const auto [a, b] = orthonormal_completion(n1);
    EXPECT_NEAR(a.vector().dot(n1.vector()), 0.0, 1e-14);
    EXPECT_NEAR(b.vector().dot(n1.vector()), 0.0, 1e-14);
    EXPECT_NEAR(a.vector().dot(b.vector()), 0.0, 1e-14);
    const double c = std::cos(0.7);
    const double sn = std::sin(0.7);
    const Direction a2(c * a.vector() + sn * b.vector());
    const Direction b2(-sn * a.vector() + c * b.vector());
    EXPECT_NEAR(spin_squeezing(s, ops, n1, a, b), spin_squeezing(s, ops, n1, a2, b2), 1e-10);
    EXPECT_NEAR(spin_squeezing(s, ops, n1), spin_squeezing(s, ops, n1, a2, b2), 1e-10);
}

TEST(Squeezing, Window)
{
    const CollectiveOps ops(100);
    EXPECT_LT(optimize_squeezing(make_twisted_state(100, 0.02), ops).value, 1.0);
    EXPECT_LT(optimize_squeezing(make_twisted_state(100, 0.05), ops).value, 1.0);
    EXPECT_GT(optimize_squeezing(make_twisted_state(100, 1.0), ops).value, 1.0);
    for (int n : {50, 100}) {
        const CollectiveOps o(n);
        EXPECT_LT(optimize_squeezing(make_twisted_state(n, 0.5 / std::sqrt(n)), o).value, 1.0);
        EXPECT_GT(optimize_squeezing(make_twisted_state(n, 1.0), o).value, 1.0);
    }
}

TEST(Squeezing, OptimumNotWorseThanAxes)
{
    const CollectiveOps ops(60);
    const SpinState s = make_twisted_state(60, 0.04);
    const auto best = optimize_squeezing(s, ops);
    EXPECT_LE(best.value, spin_squeezing(s, ops, Direction::z_axis()));
    EXPECT_LE(best.value, spin_squeezing(s, ops, Direction::y_axis()));
    EXPECT_NEAR(spin_squeezing(s, ops, best.direction), best.value, 1e-9);
}

TEST(Squeezing, ZeroMeanSpinGivesSentinel)
{
    const CollectiveOps ops(100);
    EXPECT_EQ(optimize_squeezing(make_twisted_state(100, pi / 2), ops).value, kSqueezingUndefined);
}

// --- fast-phase approximation --------------------------------------------

TEST(FastPhase, PlateauAndHeisenbergPoint)
{
    const CollectiveOps ops(100);
    const SpinState s = make_twisted_state(100, 1.0);
    const double bs = qfi_fast_phase_approx(100, 1.0, Interferometer::BeamSplitter);
    const double mzi = qfi_fast_phase_approx(100, 1.0, Interferometer::MachZehnder);
    EXPECT_NEAR(bs, 5000.0, 250.0);
    EXPECT_LT(std::abs(bs - qfi_pure(s, ops, Direction::x_axis())) / qfi_pure(s, ops, Direction::x_axis()), 0.05);
    EXPECT_LT(std::abs(mzi - qfi_pure(s, ops, Direction::y_axis())) / qfi_pure(s, ops, Direction::y_axis()), 0.05);

    const double bs_half = qfi_fast_phase_approx(100, pi / 2, Interferometer::BeamSplitter);
    const double mzi_half = qfi_fast_phase_approx(100, pi / 2, Interferometer::MachZehnder);
    EXPECT_NEAR(bs_half, 10000.0, 500.0);
    EXPECT_LT(mzi_half, 0.1 * bs_half);
    EXPECT_THROW(qfi_fast_phase_approx(100, 1.0, Interferometer::Phase), std::invalid_argument);
}

// --- outcome distributions -----------------------------------------------

TEST(Outcome, IdentityAndPhaseRotations)
{
    const SpinState s = make_twisted_state(10, 0.3);
    const CollectiveOps ops(10);
    const auto p0 = outcome_distribution(s, ops, Direction(0.4, 0.1, 0.3), 0.0);
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        EXPECT_NEAR(p0[i], std::norm(s.amplitude(i)), 1e-14);
    }
    const SpinState c = make_coherent_state(10);
    const auto pz = outcome_distribution(c, ops, Direction::z_axis(), 1.234);
    for (Eigen::Index i = 0; i < c.dim(); ++i) {
        EXPECT_NEAR(pz[i], std::norm(c.amplitude(i)), 1e-14);
    }
    EXPECT_EQ(pz.interferometer(), Interferometer::Phase);
}

TEST(Outcome, TwoParticleYHalfPiMatchesWignerMatrix)
{
    const CollectiveOps ops(2);
    const auto p = outcome_distribution(make_coherent_state(2), ops, Direction::y_axis(), pi / 2);
    const auto amp = oracle::apply(oracle::spin1_ry(pi / 2), oracle::twisted_coherent(2, 0.0));
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(p[i], std::norm(amp[static_cast<std::size_t>(i)]), 1e-12);
    }
    // A quarter turn about y carries the +x coherent state onto m = -1.
    EXPECT_NEAR(p[0], 1.0, 1e-12);
    EXPECT_NEAR(p[1], 0.0, 1e-12);
    EXPECT_NEAR(p[2], 0.0, 1e-12);
}

TEST(Outcome, DistributionValidation)
{
    Eigen::VectorXd ok(3);
    ok << 0.5, 0.5, -1e-16;
    const OutcomeDistribution d(ok, 0.0, Direction::x_axis());
    EXPECT_EQ(d[2], 0.0);
    Eigen::VectorXd neg(3);
    neg << 0.6, 0.5, -0.1;
    EXPECT_THROW(OutcomeDistribution(neg, 0.0, Direction::x_axis()), std::invalid_argument);
    Eigen::VectorXd bad(3);
    bad << 0.5, 0.5, 0.1;
    EXPECT_THROW(OutcomeDistribution(bad, 0.0, Direction::x_axis()), std::invalid_argument);
}

TEST(Outcome, AmplitudeVariantCarriesPhases)
{
    const CollectiveOps ops(6);
    const auto out = outcome_amplitudes(make_twisted_state(6, 0.5), ops, Direction::x_axis(), 0.2);
    const Eigen::VectorXd mag = out.magnitudes();
    const Eigen::VectorXd phi = out.phases();
    for (Eigen::Index i = 0; i < mag.size(); ++i) {
        EXPECT_NEAR(std::abs(std::polar(mag(i), phi(i)) - out.amplitudes(i)), 0.0, 1e-14);
    }
    EXPECT_NEAR(out.distribution().probabilities().sum(), 1.0, 1e-12);
}

// --- classical FI ----------------------------------------------------------

TEST(ClassicalFi, CoherentMziEqualsN)
{
    const CollectiveOps ops(2);
    const Rotor mzi(ops, Direction::y_axis());
    for (double theta : {0.1, 0.7, 1.3, 2.9}) {
        EXPECT_NEAR(classical_fi(make_coherent_state(2), mzi, theta), 2.0, 1e-10);
        const double fd = oracle::finite_difference_fi(
            [](double t) { return oracle_probs(2, 0.0, 0, 1, 0, t); }, theta);
        EXPECT_NEAR(fd, 2.0, 1e-6);
    }
}

TEST(ClassicalFi, PlateauLevels)
{
    const InterferometerPair rig(100);
    const SpinState s = make_twisted_state(100, 1.0);
    EXPECT_NEAR(classical_fi(s, rig.bs, kDefaultThetaProbe), 2500.0, 250.0);
    EXPECT_NEAR(classical_fi(s, rig.mzi, kDefaultThetaProbe), 2500.0, 250.0);
}

TEST(ClassicalFi, AnalyticDerivativeMatchesFiniteDifference)
{
    const int n = 8;
    const CollectiveOps ops(n);
    const Direction dir(0.6, 0.3, 0.2);
    const Rotor rotor(ops, dir);
    const SpinState s = make_twisted_state(n, 0.9);
    const PureStateFamily family(s, rotor);
    const double theta = 0.4;
    const double h = 1e-5;
    const auto jet = family(theta);
    const auto plus = family(theta + h);
    const auto minus = family(theta - h);
    for (Eigen::Index i = 0; i < jet.p.size(); ++i) {
        EXPECT_NEAR(jet.dp(i), (plus.p(i) - minus.p(i)) / (2 * h), 1e-6);
    }
    const auto ref = oracle_probs(n, 0.9, dir.x(), dir.y(), dir.z(), theta);
    for (Eigen::Index i = 0; i < jet.p.size(); ++i) {
        EXPECT_NEAR(jet.p(i), ref[static_cast<std::size_t>(i)], 1e-12);
    }
}

TEST(ClassicalFi, BoundedByQfi)
{
    const CollectiveOps ops(30);
    const Rotor bs(ops, Direction::x_axis());
    for (double alpha : {0.0, 0.1, 0.5, 1.0, 2.0}) {
        const SpinState s = make_twisted_state(30, alpha);
        const double q = qfi_pure(s, ops, Direction::x_axis());
        for (double theta : {0.01, 0.3, 1.0}) {
            const double f = classical_fi(s, bs, theta);
            EXPECT_GE(f, 0.0);
            EXPECT_LE(f, q * (1 + 1e-6) + 1e-9);
        }
    }
}

// --- exact decomposition --------------------------------------------------

TEST(Decomposition, MatchesDirectFi)
{
    const CollectiveOps ops(100);
    const SpinState s = make_twisted_state(100, 1.0);
    for (const Direction& dir : {Direction::x_axis(), Direction::y_axis()}) {
        const Rotor rotor(ops, dir);
        const double direct = classical_fi(s, rotor, 0.05);
        const double decomposed = fi_exact_decomposition(outcome_amplitudes(s, rotor, 0.05), ops);
        EXPECT_NEAR(decomposed / direct, 1.0, 1e-6);
    }
}

TEST(Decomposition, SmallInstanceMatchesFiniteDifference)
{
    const CollectiveOps ops(2);
    const Rotor bs(ops, Direction::x_axis());
    const double decomposed =
        fi_exact_decomposition(outcome_amplitudes(make_twisted_state(2, 0.7), bs, 0.3), ops);
    const double fd = oracle::finite_difference_fi(
        [](double t) { return oracle_probs(2, 0.7, 1, 0, 0, t); }, 0.3);
    EXPECT_NEAR(decomposed, fd, 1e-6);
}

TEST(Decomposition, RealAmplitudesGiveZeroForBs)
{
    const CollectiveOps ops(20);
    const Rotor bs(ops, Direction::x_axis());
    EXPECT_NEAR(fi_exact_decomposition(outcome_amplitudes(make_coherent_state(20), bs, 0.0), ops), 0.0,
                1e-20);
    const Rotor phase(ops, Direction::z_axis());
    EXPECT_THROW(fi_exact_decomposition(outcome_amplitudes(make_coherent_state(20), phase, 0.1), ops),
                 std::invalid_argument);
}

// --- plateau approximation --------------------------------------------------

TEST(PlateauApprox, QualityOnPlateau)
{
    const CollectiveOps ops(100);
    const Rotor bs(ops, Direction::x_axis());
    const SpinState s = make_twisted_state(100, 1.0);
    const double approx = fi_plateau_approx(outcome_amplitudes(s, bs, kDefaultThetaProbe), ops);
    const double exact = classical_fi(s, bs, kDefaultThetaProbe);
    EXPECT_LT(std::abs(approx - exact) / exact, 0.15);
    EXPECT_NEAR(approx, 2500.0, 250.0);
}

TEST(PlateauApprox, SingleTerm)
{
    const int n = 10;
    const CollectiveOps ops(n);
    Amplitudes a = Amplitudes::Zero(n + 1);
    a(n / 2) = 1.0;
    const OutcomeAmplitudes out{a, 0.0, Direction::x_axis(), {}};
    EXPECT_DOUBLE_EQ(fi_plateau_approx(out, ops), (n / 2.0) * (n / 2.0 + 1));
}

// --- bounds and distances ---------------------------------------------------

TEST(Crlb, Arithmetic)
{
    EXPECT_NEAR(crlb(10000.0, 100), 0.001, 1e-15);
    EXPECT_NEAR(crlb(100.0), 0.1, 1e-15);
    EXPECT_NEAR(crlb(100.0 * 100.0), 0.01, 1e-15);
    EXPECT_THROW(crlb(0.0), std::invalid_argument);
    EXPECT_THROW(crlb(-1.0), std::invalid_argument);
    EXPECT_THROW(crlb(1.0, 0), std::invalid_argument);
}

TEST(Fidelity, BasicProperties)
{
    const std::vector<double> p{0.2, 0.3, 0.5};
    EXPECT_NEAR(fidelity(p, p), 1.0, 1e-15);
    const std::vector<double> a{1.0, 0.0, 0.0};
    const std::vector<double> b{0.0, 0.5, 0.5};
    EXPECT_EQ(fidelity(a, b), 0.0);
    const std::vector<double> short_grid{0.5, 0.5};
    EXPECT_THROW(fidelity(p, short_grid), std::invalid_argument);
}

TEST(Fidelity, DecreasesWithPhaseOffset)
{
    const CollectiveOps ops(100);
    const Rotor bs(ops, Direction::x_axis());
    const SpinState s = make_twisted_state(100, 1.0);
    const auto base = outcome_distribution(s, bs, kDefaultThetaProbe);
    double previous = 1.0;
    for (double dt : {0.0005, 0.001, 0.002, 0.005, 0.01}) {
        const double f = fidelity(base, outcome_distribution(s, bs, kDefaultThetaProbe + dt));
        EXPECT_LT(f, previous);
        previous = f;
    }
}

// --- report -------------------------------------------------------------------

TEST(Report, CrlbChainAndRanges)
{
    const InterferometerPair rig(40);
    for (double alpha : {0.0, 0.05, 0.4, 1.0, pi / 2, 2.5, pi}) {
        const MetrologyReport r = metrology_report(rig, alpha);
        EXPECT_LE(r.fi_bs, r.qfi_bs * (1 + 1e-6) + 1e-9) << alpha;
        EXPECT_LE(r.fi_mzi, r.qfi_mzi * (1 + 1e-6) + 1e-9) << alpha;
        EXPECT_LE(r.qfi_bs, r.qfi_optimized * (1 + 1e-6));
        EXPECT_LE(r.qfi_mzi, r.qfi_optimized * (1 + 1e-6));
        EXPECT_GE(r.qfi_bs, 0.0);
        EXPECT_LE(r.qfi_optimized, 1600.0 * (1 + 1e-9));
    }
}

TEST(Report, MziDipAtHalfPi)
{
    const MetrologyReport r = metrology_report(100, pi / 2);
    EXPECT_NEAR(r.qfi_bs, 10000.0, 1e-2);
    EXPECT_GT(r.qfi_bs / r.qfi_mzi, 5.0);
}
