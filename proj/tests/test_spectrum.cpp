#include "conequant/spectrum.hpp"
#include "conequant/special_functions.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace conequant;
using namespace conequant::spec;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::array<double, 3>> random_points(std::uint64_t seed, int count)
{
    return sym::sample_points(seed, count);
}

double solve_level(VariantTag tag, double k, double omega, int p, int n)
{
    const PdeVariant v(tag, cone::ModelParams::harmonic(k, omega));
    const auto bs = solve_bound_states(reduce_radial(v, {p, 0.0, 0}), n);
    return bs.pairs.at(static_cast<std::size_t>(n)).E;
}

// Radial factor R with int_0^inf R^2 r dr = 1, sampled at r.
double radial_closed_form(double mu, double omega, int n, double r)
{
    const double x = omega * r * r;
    const double log_norm = std::log(2.0) + std::lgamma(n + 1.0) + (mu + 1.0) * std::log(omega) - std::lgamma(n + mu + 1.0);
    return std::exp(0.5 * log_norm) * std::pow(r, mu) * std::exp(-0.5 * x) *
           special::laguerre(special::LaguerreIndex(n, mu), x);
}

}  // namespace

TEST(Variant, RejectsMismatchedParameters)
{
    EXPECT_THROW(PdeVariant(VariantTag::kNoetherHo, cone::ModelParams::free(0.5)), std::invalid_argument);
    EXPECT_THROW(PdeVariant(VariantTag::kKowalskiFree, cone::ModelParams::harmonic(0.5, 1.0)), std::invalid_argument);
    EXPECT_EQ(PdeVariant(VariantTag::kKowalskiHo, cone::ModelParams::harmonic(0.5, 1.0)).name(), "KOWALSKI_HO");
}

TEST(EffectiveIndex, Examples)
{
    EXPECT_EQ(effective_index(Quantization::kNoether, 0, 0.7), 0.0);
    EXPECT_NEAR(effective_index(Quantization::kNoether, 1, 0.5), 2.0, 1e-15);
    EXPECT_NEAR(effective_index(Quantization::kNoether, -1, 0.5), 2.0, 1e-15);
    EXPECT_NEAR(effective_index(Quantization::kKowalski, 0, 0.3), 0.5, 1e-15);
    EXPECT_NEAR(effective_index(Quantization::kKowalski, 1, 0.5), std::sqrt(1.25), 1e-15);
}

TEST(EffectiveIndex, PrintedRivalFormAgreesOnlyAtZero)
{
    EXPECT_NEAR(printed_kowalski_index(0, 0.4), effective_index(Quantization::kKowalski, 0, 0.4), 1e-15);
    for (int p : {-2, -1, 1, 2}) {
        EXPECT_GT(std::abs(printed_kowalski_index(p, 0.4) - effective_index(Quantization::kKowalski, p, 0.4)), 0.1);
    }
}

TEST(ReduceRadial, Examples)
{
    const PdeVariant free(VariantTag::kNoetherFree, cone::ModelParams::free(0.8));
    const auto a = reduce_radial(free, {2, 0.5, 0});
    EXPECT_NEAR(a.mu_eff, 2.5, 1e-15);
    EXPECT_EQ(a.omega, 0.0);
    EXPECT_EQ(a.energy, 0.5);

    const PdeVariant ho(VariantTag::kNoetherHo, cone::ModelParams::harmonic(0.6, 1.3));
    const auto b = reduce_radial(ho, {0, 0.0, 2});
    EXPECT_EQ(b.mu_eff, 0.0);
    EXPECT_EQ(b.omega, 1.3);

    const PdeVariant kow(VariantTag::kKowalskiHo, cone::ModelParams::harmonic(0.5, 1.0));
    EXPECT_NEAR(reduce_radial(kow, {1, 0.0, 0}).mu_eff, 1.1180339887, 1e-9);
}

TEST(Tridiagonal, MatchesKnownSpectrum)
{
    // second difference matrix: eigenvalues 2 - 2 cos(j pi / (n + 1))
    const int n = 50;
    std::vector<double> d(n, 2.0), e(n - 1, -1.0);
    const auto ev = tridiagonal_eigenvalues(d, e, 5);
    for (int j = 0; j < 5; ++j) {
        EXPECT_NEAR(ev[static_cast<std::size_t>(j)], 2.0 - 2.0 * std::cos((j + 1) * kPi / (n + 1)), 1e-13);
    }
    EXPECT_THROW(tridiagonal_eigenvalues(d, e, n + 1), SolverError);
}

TEST(BoundStates, Examples)
{
    // k close to 1 with p = 0 is the planar oscillator
    const double e0 = solve_level(VariantTag::kNoetherHo, 0.99, 1.0, 0, 0);
    const double e1 = solve_level(VariantTag::kNoetherHo, 0.99, 1.0, 0, 1);
    EXPECT_NEAR(e0, 1.0, 1e-4);
    EXPECT_NEAR(e1, 3.0, 3e-4);
    EXPECT_NEAR(solve_level(VariantTag::kNoetherHo, 0.5, 1.0, 1, 0), 3.0, 3e-4);
    EXPECT_NEAR(solve_level(VariantTag::kKowalskiHo, 0.3, 1.0, 0, 0), 1.5, 1.5e-4);
}

TEST(BoundStates, SecondOrderConvergence)
{
    for (double mu : {0.0, 0.5, 2.0}) {
        const RadialProblem rp{VariantTag::kNoetherHo, mu, 1.0, 0.0};
        const double exact = oscillator_energy(1.0, 0, mu);
        const auto a = solve_bound_states(rp, 0, {10.0, 400});
        const auto b = solve_bound_states(rp, 0, {10.0, 800});
        const double ratio = (a.pairs[0].E_coarse - exact) / (b.pairs[0].E_coarse - exact);
        EXPECT_NEAR(ratio, 4.0, 0.1) << "mu = " << mu;
        EXPECT_NEAR(b.pairs[0].E / a.pairs[0].E, 1.0, 1e-6);
        EXPECT_LT(std::abs(b.pairs[0].E - exact) / exact, 1e-7);
    }
}

TEST(BoundStates, NoetherSweepMatchesFormula)
{
    double worst = 0.0;
    for (double k : {0.3, 0.6, 0.9}) {
        for (double w : {0.5, 1.0, 2.0}) {
            for (int p : {0, 1, 2}) {  // E depends on |p| only
                const PdeVariant v(VariantTag::kNoetherHo, cone::ModelParams::harmonic(k, w));
                const auto bs = solve_bound_states(reduce_radial(v, {p, 0.0, 0}), 5);
                EXPECT_FALSE(bs.boundary_warning);
                for (const auto& ep : bs.pairs) {
                    const double exact = oscillator_energy(w, ep.n, std::abs(p) / k);
                    worst = std::max(worst, std::abs(ep.E - exact) / exact);
                }
            }
        }
    }
    EXPECT_LE(worst, 1e-4);
}

TEST(BoundStates, KowalskiSpectrumDiffersFromNoether)
{
    for (double k : {0.3, 0.6}) {
        for (int p : {0, 1, 2}) {
            const PdeVariant v(VariantTag::kKowalskiHo, cone::ModelParams::harmonic(k, 1.0));
            const auto bs = solve_bound_states(reduce_radial(v, {p, 0.0, 0}), 3);
            for (const auto& ep : bs.pairs) {
                const double mu = effective_index(Quantization::kKowalski, p, k);
                const double expected = oscillator_energy(1.0, ep.n, mu);
                EXPECT_LE(std::abs(ep.E - expected) / expected, 1e-4);
                const double noether = oscillator_energy(1.0, ep.n, std::abs(p) / k);
                EXPECT_GT(std::abs(ep.E - noether), 0.1);
            }
        }
    }
}

TEST(BoundStates, DegeneracyAtHalfOpening)
{
    const double a = solve_level(VariantTag::kNoetherHo, 0.5, 1.0, 0, 1);
    const double b = solve_level(VariantTag::kNoetherHo, 0.5, 1.0, 1, 0);
    EXPECT_NEAR(a, 3.0, 3e-4);
    EXPECT_NEAR(b, 3.0, 3e-4);
}

TEST(BoundStates, SmallDomainWarns)
{
    const RadialProblem rp{VariantTag::kNoetherHo, 1.0, 1.0, 0.0};
    EXPECT_TRUE(solve_bound_states(rp, 2, {2.0, 400}).boundary_warning);
    EXPECT_THROW(solve_bound_states({VariantTag::kNoetherFree, 1.0, 0.0, 0.5}, 0), std::invalid_argument);
}

TEST(BoundStates, NumericMatchesClosedForm)
{
    const double w = 1.3;
    for (const auto& [mu, n] : {std::pair{0.0, 0}, std::pair{0.0, 2}, std::pair{1.5, 1}, std::pair{10.0 / 3.0, 3}}) {
        const RadialProblem rp{VariantTag::kNoetherHo, mu, w, 0.0};
        const auto bs = solve_bound_states(rp, n);
        const auto& ep = bs.pairs.back();
        double err = 0.0;
        for (std::size_t i = 0; i < ep.chi.size(); ++i) {
            const double r = (static_cast<double>(i) + 0.5) * ep.h;
            const double diff = ep.chi[i] - std::sqrt(r) * radial_closed_form(mu, w, n, r);
            err += diff * diff * ep.h;
        }
        EXPECT_LE(std::sqrt(err), 1e-4) << "mu " << mu << " n " << n;
    }
}

TEST(Pde, ContinuumSolutionsSolveFreeEquations)
{
    const auto pts = random_points(7, 50);
    for (VariantTag tag : {VariantTag::kNoetherFree, VariantTag::kKowalskiFree}) {
        const PdeVariant v(tag, cone::ModelParams::free(0.6));
        for (const auto& [p, eps] : {std::pair{0, 0.5}, std::pair{1, 1.2}, std::pair{-2, 0.3}}) {
            const auto psi = continuum_solution(v, p, eps);
            for (const auto& pt : pts) {
                EXPECT_LE(std::abs(pde_residual(v, psi, pt)), 1e-9);
            }
        }
    }
}

TEST(Pde, EigenfunctionsSolveOscillatorEquations)
{
    const auto pts = random_points(11, 50);
    for (VariantTag tag : {VariantTag::kNoetherHo, VariantTag::kKowalskiHo}) {
        const PdeVariant v(tag, cone::ModelParams::harmonic(0.6, 1.5));
        for (int n = 0; n <= 3; ++n) {
            for (int p = -2; p <= 2; ++p) {
                const auto psi = closed_form_eigenfunction(v, n, p);
                double worst = 0.0;
                for (const auto& pt : pts) {
                    worst = std::max(worst, std::abs(pde_residual(v, psi, pt)));
                }
                EXPECT_LE(worst, 1e-9) << v.name() << " n " << n << " p " << p;
            }
        }
    }
}

TEST(Pde, ConstantSolvesFreeAndGroundStateIsGaussian)
{
    const PdeVariant free(VariantTag::kNoetherFree, cone::ModelParams::free(0.6));
    EXPECT_EQ(std::abs(pde_residual(free, ScalarField(1.0), {0.3, 1.1, 2.0})), 0.0);
    EXPECT_THROW(pde_residual(free, ScalarField(1.0), {0.3, 0.0, 2.0}), cone::VertexError);

    const PdeVariant ho(VariantTag::kNoetherHo, cone::ModelParams::harmonic(0.5, 1.2));
    const auto psi = closed_form_eigenfunction(ho, 0, 0);
    const std::array<double, 3> p{0.7, -1.1, 0.4};
    const Complex expected = std::exp(Complex(0.0, -1.2 * 0.7)) * std::exp(-0.6 * 1.21);
    EXPECT_NEAR(std::abs(jet::eval_jet_complex(psi, p, 0).value - expected), 0.0, 1e-14);

    const auto psi01 = closed_form_eigenfunction(ho, 0, 1);
    const Complex v = jet::eval_jet_complex(psi01, std::array<double, 3>{0.0, -1.1, 0.0}, 0).value;
    EXPECT_NEAR(v.real(), 1.21 * std::exp(-0.6 * 1.21), 1e-14);
}

TEST(InnerProduct, OrthonormalityOfEigenfunctions)
{
    const PdeVariant ho(VariantTag::kNoetherHo, cone::ModelParams::harmonic(0.6, 1.0));
    for (int p : {0, 1}) {
        std::vector<ScalarField> basis;
        for (int n = 0; n <= 3; ++n) {
            basis.push_back(eigenfunction_normalization(ho, n, p) * closed_form_eigenfunction(ho, n, p));
        }
        for (int i = 0; i <= 3; ++i) {
            for (int j = i; j <= 3; ++j) {
                const auto ip = inner_product(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
                EXPECT_FALSE(ip.tail_warning);
                EXPECT_NEAR(std::abs(ip.value - Complex(i == j ? 1.0 : 0.0)), 0.0, 1e-8)
                    << "p " << p << " (" << i << ", " << j << ")";
            }
        }
    }
}

TEST(InnerProduct, AngularOrthogonality)
{
    const PdeVariant ho(VariantTag::kNoetherHo, cone::ModelParams::harmonic(0.6, 1.0));
    const auto ip = inner_product(closed_form_eigenfunction(ho, 0, 1), closed_form_eigenfunction(ho, 0, 2));
    EXPECT_LE(std::abs(ip.value), 1e-12);
}

TEST(InnerProduct, SerialAndParallelAgree)
{
    const PdeVariant ho(VariantTag::kNoetherHo, cone::ModelParams::harmonic(0.6, 1.0));
    const auto f = closed_form_eigenfunction(ho, 1, 1);
    InnerProductOptions serial;
    serial.execution = Execution::kSerial;
    serial.panels = 40;
    InnerProductOptions parallel = serial;
    parallel.execution = Execution::kParallel;
    EXPECT_EQ(inner_product(f, f, serial).value, inner_product(f, f, parallel).value);
}

TEST(InnerProduct, TailWarning)
{
    const PdeVariant ho(VariantTag::kNoetherHo, cone::ModelParams::harmonic(0.6, 0.1));
    InnerProductOptions opts;
    opts.r_max = 3.0;
    opts.panels = 20;
    EXPECT_TRUE(inner_product(closed_form_eigenfunction(ho, 0, 0), closed_form_eigenfunction(ho, 0, 0), opts).tail_warning);
}

TEST(Continuum, BesselSolvesRadialEquation)
{
    std::vector<double> radii;
    for (int i = 0; i <= 100; ++i) {
        radii.push_back(0.1 + 19.9 * i / 100.0);
    }
    for (double k : {0.3, 0.6, 0.9}) {
        EXPECT_LE(continuum_check(0, 0.5, cone::ModelParams::free(k), radii), 1e-9);
    }
    EXPECT_LE(continuum_check(3, 2.0, cone::ModelParams::free(0.6), radii), 1e-8);
    EXPECT_THROW(continuum_check(1, 0.0, cone::ModelParams::free(0.6), radii), std::invalid_argument);
}

TEST(Continuum, EnergyScalingSymmetry)
{
    // R(r) at energy eps equals R(r sqrt(2 eps)) at eps = 1/2; the residual scales by 2 eps
    const auto params = cone::ModelParams::free(0.6);
    const double eps = 1.7;
    const double s = std::sqrt(2.0 * eps);
    for (double r : {0.4, 1.3, 5.0}) {
        const double a = continuum_check(2, eps, params, {r / s});
        const double b = continuum_check(2, 0.5, params, {r});
        EXPECT_NEAR(a / (2.0 * eps), b, 1e-10);
    }
}

TEST(EvolutionaryAction, NoetherQuantizationKeepsAllEight)
{
    for (VariantTag tag : {VariantTag::kNoetherFree, VariantTag::kNoetherHo}) {
        const auto params = tag == VariantTag::kNoetherFree ? cone::ModelParams::free(0.6)
                                                            : cone::ModelParams::harmonic(0.6, 1.5);
        const PdeVariant v(tag, params);
        const auto report = evolutionary_action_report(v, sym::Transcription::kCorrected, 3, 40, 1e-8);
        ASSERT_EQ(report.size(), 8u);
        for (const auto& r : report) {
            EXPECT_TRUE(r.preserved) << v.name() << " " << r.generator << " " << r.max_residual;
        }
    }
}

TEST(EvolutionaryAction, RivalQuantizationKeepsExactlyFour)
{
    for (VariantTag tag : {VariantTag::kKowalskiFree, VariantTag::kKowalskiHo}) {
        const auto params = tag == VariantTag::kKowalskiFree ? cone::ModelParams::free(0.6)
                                                             : cone::ModelParams::harmonic(0.6, 1.5);
        const PdeVariant v(tag, params);
        const auto keep = rival_preserved_names(v);
        const auto report = evolutionary_action_report(v, sym::Transcription::kCorrected, 3, 40, 1e-8);
        for (const auto& r : report) {
            const bool expected = std::find(keep.begin(), keep.end(), r.generator) != keep.end();
            EXPECT_EQ(r.preserved, expected) << v.name() << " " << r.generator << " " << r.max_residual;
            if (!expected) {
                EXPECT_GE(r.max_residual, 1e-2) << r.generator;
            }
        }
    }
}

TEST(EvolutionaryAction, PrintedFormulasBreakOnlyTheMisprintedGenerators)
{
    const PdeVariant v(VariantTag::kNoetherFree, cone::ModelParams::free(0.6));
    const auto report = evolutionary_action_report(v, sym::Transcription::kPrinted, 3, 40, 1e-8);
    const auto wrong = sym::corrected_generator_names(sym::GeneratorSet::kLambda);
    for (const auto& r : report) {
        const bool misprinted = std::find(wrong.begin(), wrong.end(), r.generator) != wrong.end();
        EXPECT_EQ(r.preserved, !misprinted) << r.generator << " " << r.max_residual;
    }
}

TEST(EvolutionaryAction, SerialAndParallelAgree)
{
    const PdeVariant v(VariantTag::kKowalskiHo, cone::ModelParams::harmonic(0.6, 1.5));
    const auto a = evolutionary_action_report(v, sym::Transcription::kCorrected, 5, 16, 1e-8, Execution::kSerial);
    const auto b = evolutionary_action_report(v, sym::Transcription::kCorrected, 5, 16, 1e-8, Execution::kParallel);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].max_residual, b[i].max_residual);
    }
}

TEST(Pde, SolutionsDoNotCrossQuantizations)
{
    const auto params = cone::ModelParams::free(0.6);
    const PdeVariant noether(VariantTag::kNoetherFree, params);
    const PdeVariant kowalski(VariantTag::kKowalskiFree, params);
    const auto psi = continuum_solution(noether, 1, 0.8);
    double worst = 0.0;
    for (const auto& pt : random_points(13, 20)) {
        worst = std::max(worst, std::abs(pde_residual(kowalski, psi, pt)));
    }
    EXPECT_GE(worst, 1e-2);
}
