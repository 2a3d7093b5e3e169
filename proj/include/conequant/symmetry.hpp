#pragma once

#include "conequant/cone_model.hpp"
#include "conequant/execution.hpp"
#include "conequant/field.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conequant::sym {

using conequant::Execution;
using jet::Complex;
using jet::ScalarField;

/// Coordinates of the chart shared by every generator: (t, r, phi).
inline constexpr int kChartArity = 3;

ScalarField t_field();
ScalarField r_field();
ScalarField phi_field();

/// Point symmetry generator V d_t + V_r d_r + V_phi d_phi (+ g psi d_psi).
struct VectorField {
    std::string name;
    ScalarField xi;
    std::array<ScalarField, 2> etas;
    std::optional<ScalarField> psi_coeff;

    /// Coefficient of component c: 0 = t, 1 = r, 2 = phi, 3 = psi.
    [[nodiscard]] ScalarField component(int c) const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
/// Adds g psi d_psi to the field.
VectorField with_psi(VectorField base, const ScalarField& g, std::string name);

enum class GeneratorSet { kGamma, kXi, kLambda, kOmega, kUpsilon, kPi };

/// kPrinted keeps the original formulas verbatim. kCorrected replaces
/// the psi coefficients that fail the determining equations (Lambda_2,
/// Lambda_4, Omega_2, Omega_3, Omega_6 and the matching Pi_2, Pi_3) with the
/// forms forced by the Galilei and projective symmetries of the planar
/// equation. The Gamma and Xi lists are identical under both.
enum class Transcription { kPrinted, kCorrected };

/// Generators in their conventional order; Gamma and Lambda use k, the rest also omega.
std::vector<VectorField> builtin_generators(GeneratorSet set, const cone::ModelParams& params,
                                            Transcription transcription = Transcription::kPrinted);

/// Names of the generators that differ between the two transcriptions.
std::vector<std::string> corrected_generator_names(GeneratorSet set);

/// Time, position, velocity and acceleration of a curve at one instant.
struct JetPoint2 {
    double t = 0.0;
    std::array<double, 2> x{};
    std::array<double, 2> xdot{};
    std::array<double, 2> xddot{};
};

struct Prolongation {
    double xi;
    std::array<double, 2> eta;
    std::array<double, 2> eta1;
    std::array<double, 2> eta2;
};

/// Second prolongation of the base part of X at jp.
Prolongation prolong2_ode(const VectorField& x, const JetPoint2& jp);

/// jp with xddot replaced by the equations of motion.
JetPoint2 on_shell(const cone::ModelParams& params, JetPoint2 jp);

struct DeterminingResidual {
    std::array<double, 2> raw;
    double scale;  // 1 + max |prolonged coefficient|
    [[nodiscard]] double normalized() const;
};

/// X^(2)(xddot - F) on-shell at jp. The accelerations of jp are overwritten.
DeterminingResidual determining_residual(const VectorField& x, const cone::ModelParams& params,
                                         const JetPoint2& jp);

/// Random jets: t in [-2, 2], r in +-[0.3, 3], phi in [0, 2 pi), velocities in
/// [-2, 2]. Point i depends only on (seed, i).
std::vector<JetPoint2> sample_jets(std::uint64_t seed, int count);

struct ResidualStats {
    double max = 0.0;
    double mean = 0.0;
    int samples = 0;
};

/// Normalized determining residuals of X over jets. Serial and parallel
/// execution produce bitwise identical results.
ResidualStats determining_residual_stats(const VectorField& x, const cone::ModelParams& params,
                                         const std::vector<JetPoint2>& jets,
                                         Execution execution = Execution::kParallel);

/// Coefficients (t, r, phi, psi) of a field at a point; psi is 0 if absent.
using Coefficients = std::array<Complex, 4>;

Coefficients evaluate(const VectorField& x, const std::array<double, 3>& p);

/// Pointwise Lie bracket [X, Y] at p, including the psi coefficient
/// X(g_Y) - Y(g_X).
Coefficients commutator_at(const VectorField& x, const VectorField& y,
                           const std::array<double, 3>& p);

/// [X, Y] as a closed-form field, for nested brackets.
VectorField commutator(const VectorField& x, const VectorField& y);

class IllConditionedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StructureConstants {
    int n = 0;
    /// c[(i * n + j) * n + m]: coefficient of X_m in [X_i, X_j].
    std::vector<double> c;
    double fit_residual = 0.0;
    double condition_number = 0.0;

    [[nodiscard]] double at(int i, int j, int m) const
    {
        return c[static_cast<std::size_t>((i * n + j) * n + m)];
    }
};

/// Least-squares fit of pointwise brackets against the basis at the same
/// points. Throws IllConditionedError when the sampled basis matrix has
/// condition number above 1e10.
StructureConstants structure_constants(const std::vector<VectorField>& basis,
                                       const std::vector<std::array<double, 3>>& points);

/// Random (t, r, phi) points with the same ranges as sample_jets.
std::vector<std::array<double, 3>> sample_points(std::uint64_t seed, int count);

struct KillingForm {
    std::vector<double> matrix;  // row-major n x n
    double determinant = 0.0;    // |det K|
    /// |det| of D^-1 K D^-1 with D_i = sqrt of the 2-norm of row i of K;
    /// rows of a zero Killing form are left unscaled.
    double normalized_determinant = 0.0;
};

KillingForm killing_form(const StructureConstants& c);

/// Largest violation of antisymmetry of c.
double antisymmetry_defect(const StructureConstants& c);

/// |[[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y]| at p, maximum over components.
double jacobi_residual(const VectorField& x, const VectorField& y, const VectorField& z,
                       const std::array<double, 3>& p);

struct SubalgebraReport {
    bool pass = false;
    double max_residual = 0.0;
    std::vector<std::pair<std::string, double>> relations;
};

/// Gamma_7, Gamma_9, Gamma_11 and Gamma_16 = Gamma_6 + Gamma_12 / 2 against
/// [X_i, X_j] = 0 and [X_i, X_4] = X_i at 20 random points.
SubalgebraReport verify_subalgebra_A4511(const cone::ModelParams& params, std::uint64_t seed = 1);

using cone::inverse_linearize;
using cone::linearize;

/// Q psi = g psi - V psi_t - V_r psi_r - V_phi psi_phi as a closed-form field.
ScalarField evolutionary_field(const VectorField& x, const ScalarField& psi);

/// Value and partials through second order of Q psi at p.
jet::ComplexJet evolutionary_apply(const VectorField& x, const ScalarField& psi,
                                   const std::array<double, 3>& p);

}  // namespace conequant::sym
