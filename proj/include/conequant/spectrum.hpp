#pragma once

#include "conequant/cone_model.hpp"
#include "conequant/execution.hpp"
#include "conequant/field.hpp"
#include "conequant/symmetry.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace conequant::spec {

using jet::Complex;
using jet::ScalarField;

enum class Quantization { kNoether, kKowalski };

enum class VariantTag { kNoetherFree, kNoetherHo, kKowalskiFree, kKowalskiHo };

/// One of the four Schrodinger equations. Oscillator tags require harmonic
/// parameters and free tags free ones.
class PdeVariant {
public:
    PdeVariant(VariantTag tag, const cone::ModelParams& params);

    [[nodiscard]] VariantTag tag() const noexcept { return tag_; }
    [[nodiscard]] const cone::ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] Quantization quantization() const noexcept;
    [[nodiscard]] bool harmonic() const noexcept;
    [[nodiscard]] std::string name() const;

private:
    VariantTag tag_;
    cone::ModelParams params_;
};

/// Left-hand side 2i psi_t + psi_rr + psi_r / r + a psi_phiphi / (k^2 r^2) - V psi
/// with a = 1 (Noether) or 1/4 (Kowalski) and V = w^2 r^2 and/or 1/(4 r^2).
/// `psi` holds the jet of the wave function at `p` = (t, r, phi).
Complex pde_residual(const PdeVariant& variant, const jet::ComplexJet& psi, const std::array<double, 3>& p);

/// Same, evaluating the closed-form field at p. Throws VertexError at r = 0.
Complex pde_residual(const PdeVariant& variant, const ScalarField& psi, const std::array<double, 3>& p);

/// mu in R'' + R'/r + (2E - mu^2/r^2 - w^2 r^2) R = 0 for angular number p.
double effective_index(Quantization q, int p, double k);

/// The index printed for the rival spectrum, (1/2) sqrt(1 + 4 p^2 / k^2).
double printed_kowalski_index(int p, double k);

struct ModeNumbers {
    int p = 0;
    double epsilon = 0.0;  // continuum energy, free variants
    int n = 0;             // radial quantum number, bound states
};

struct RadialProblem {
    VariantTag tag;
    double mu_eff;
    double omega;  // 0 for the free variants
    double energy; // epsilon for free variants; 0 (unknown) for bound states
};

RadialProblem reduce_radial(const PdeVariant& variant, const ModeNumbers& modes);

/// E_n = w (2n + mu + 1) of the isotropic radial oscillator.
double oscillator_energy(double omega, int n, double mu);

struct GridSpec {
    double r_max = 0.0;  // 0 selects sqrt(2 E_est) / w + 8 / sqrt(w)
    int n = 2000;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Eigenpair {
    int n = 0;
    double E = 0.0;         // Richardson value from grids N and 2N
    double E_coarse = 0.0;  // grid N
    double E_fine = 0.0;    // grid 2N
    /// chi = sqrt(r) R on the cell-centred nodes r_i = (i - 1/2) h of the
    /// fine grid, normalized to h sum chi_i^2 = 1 (the cone norm of the full
    /// wave function chi / sqrt(r) e^{i p phi} / sqrt(4 pi)).
    std::vector<double> chi;
    double h = 0.0;
    double r_max = 0.0;
};

struct BoundStates {
    std::vector<Eigenpair> pairs;
    /// Some eigenvector exceeds 1e-8 of its peak at the outer boundary.
    bool boundary_warning = false;
    double r_max = 0.0;
};

/// Lowest n_max + 1 levels of the radial oscillator. The radial operator is
/// discretized in flux form on a cell-centred grid, which keeps second order
/// accuracy for every mu including mu = 0; eigenvalues come from Sturm
/// bisection on the symmetric tridiagonal matrix and vectors from inverse
/// iteration.
BoundStates solve_bound_states(const RadialProblem& rp, int n_max, const GridSpec& grid = {});

/// Eigenvalues 2E of the tridiagonal matrix with diagonal d and off-diagonal
/// e, indices [0, count), by Sturm bisection. Exposed for testing.
std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& d, const std::vector<double>& e, int count);

/// Oscillator eigenfunction e^{-i E t + i p phi} |r|^mu e^{-w r^2 / 2} L_n^mu(w r^2)
/// with mu = effective_index and E = oscillator_energy.
ScalarField closed_form_eigenfunction(const PdeVariant& variant, int n, int p);

/// 1 / sqrt(<psi, psi>) for closed_form_eigenfunction under the cone measure.
double eigenfunction_normalization(const PdeVariant& variant, int n, int p);

/// J_mu(sqrt(2 eps) |r|) e^{-i (eps t + p phi)} for the free variants.
ScalarField continuum_solution(const PdeVariant& variant, int p, double epsilon);

struct InnerProductOptions {
    double r_max = 12.0;
    int quad_order = 20;  // Gauss-Legendre points per panel
    int panels = 60;      // per half-line
    int phi_points = 32;  // trapezoidal nodes on [0, 2 pi)
    double t = 0.0;
    Execution execution = Execution::kParallel;
};

struct InnerProduct {
    Complex value;
    /// |f| or |g| exceeds 1e-10 at |r| = r_max.
    bool tail_warning = false;
};

/// <f, g> = int_0^{2 pi} int_{-r_max}^{r_max} conj(f) g |r| dr dphi at time t.
InnerProduct inner_product(const ScalarField& f, const ScalarField& g, const InnerProductOptions& options = {});

/// Largest |R'' + R'/r + (2 eps - p^2/(k^2 r^2)) R| for R = J_{|p|/k}(sqrt(2 eps) r)
/// over the sample radii.
double continuum_check(int p, double epsilon, const cone::ModelParams& params,
                       const std::vector<double>& radii);

struct ActionResult {
    std::string generator;
    double max_residual = 0.0;
    bool preserved = false;
};

/// Residual of Q psi under `variant` for each of the eight candidate
/// generators (Lambda_1..8 for free variants, Omega_1..8 for oscillators),
/// maximized over test solutions of `variant` and `samples` random points.
/// A generator is preserved when the residual is at most `threshold`.
std::vector<ActionResult> evolutionary_action_report(const PdeVariant& variant, sym::Transcription transcription,
                                                     std::uint64_t seed, int samples, double threshold,
                                                     Execution execution = Execution::kParallel);

/// Candidate names that the rival equation is expected to keep: the Upsilon
/// set for free variants, the Pi set for oscillators.
std::vector<std::string> rival_preserved_names(const PdeVariant& variant);

}  // namespace conequant::spec
