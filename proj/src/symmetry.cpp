#include "conequant/symmetry.hpp"

#include "conequant/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conequant::sym {

namespace {

using jet::ComplexJet;
using jet::RealJet;

constexpr double kPi = std::numbers::pi;

VectorField make(std::string name, ScalarField xi, ScalarField eta_r, ScalarField eta_phi)
{
    return VectorField{std::move(name), std::move(xi), {std::move(eta_r), std::move(eta_phi)}, std::nullopt};
}

VectorField rename(VectorField v, std::string name)
{
    v.name = std::move(name);
    return v;
}

VectorField psi_scaling(std::string name)
{
    return with_psi(make("", 0.0, 0.0, 0.0), 1.0, std::move(name));
}

std::vector<VectorField> gamma_set(double k)
{
    const ScalarField t = t_field();
    const ScalarField r = r_field();
    const ScalarField kp = k * phi_field();
    const ScalarField c1 = cos(kp);
    const ScalarField s1 = sin(kp);
    const ScalarField c2 = cos(2.0 * kp);
    const ScalarField s2 = sin(2.0 * kp);
    const ScalarField kr = k * r;
    return {
        make("Gamma_1", c1 * r * t, c1 * r * r, 0.0),
        make("Gamma_2", c1 * r, 0.0, 0.0),
        make("Gamma_3", s1 * r * t, s1 * r * r, 0.0),
        make("Gamma_4", s1 * r, 0.0, 0.0),
        make("Gamma_5", t * t, t * r, 0.0),
        make("Gamma_6", t, 0.5 * r, 0.0),
        make("Gamma_7", 1.0, 0.0, 0.0),
        make("Gamma_8", 0.0, t * c1, -(t * s1 / kr)),
        make("Gamma_9", 0.0, c1, -(s1 / kr)),
        make("Gamma_10", 0.0, t * s1, t * c1 / kr),
        make("Gamma_11", 0.0, s1, c1 / kr),
        make("Gamma_12", 0.0, r, 0.0),
        make("Gamma_13", 0.0, kr * c2, -s2),
        make("Gamma_14", 0.0, kr * s2, c2),
        make("Gamma_15", 0.0, 0.0, 1.0),
    };
}

std::vector<VectorField> xi_set(double k, double w)
{
    const ScalarField t = t_field();
    const ScalarField r = r_field();
    const ScalarField kp = k * phi_field();
    const ScalarField c1 = cos(kp);
    const ScalarField s1 = sin(kp);
    const ScalarField c2 = cos(2.0 * kp);
    const ScalarField s2 = sin(2.0 * kp);
    const ScalarField cw = cos(w * t);
    const ScalarField sw = sin(w * t);
    const ScalarField c2w = cos(2.0 * w * t);
    const ScalarField s2w = sin(2.0 * w * t);
    const ScalarField kr = k * r;
    return {
        make("Xi_1", c1 * r * cw, -(c1 * r * (w * r) * sw), 0.0),
        make("Xi_2", c1 * r * sw, c1 * r * (w * r) * cw, 0.0),
        make("Xi_3", s1 * r * cw, -(s1 * r * (w * r) * sw), 0.0),
        make("Xi_4", s1 * r * sw, s1 * r * (w * r) * cw, 0.0),
        make("Xi_5", 0.0, c2 * r, -(s2 / k)),
        make("Xi_6", 0.0, s2 * r, c2 / k),
        make("Xi_7", 0.0, r, 0.0),
        make("Xi_8", 0.0, 0.0, 1.0),
        make("Xi_9", 1.0, 0.0, 0.0),
        make("Xi_10", c2w, -(w * s2w * r), 0.0),
        make("Xi_11", s2w, w * c2w * r, 0.0),
        make("Xi_12", 0.0, cw * c1, -(cw * s1 / kr)),
        make("Xi_13", 0.0, sw * c1, -(sw * s1 / kr)),
        make("Xi_14", 0.0, cw * s1, cw * c1 / kr),
        make("Xi_15", 0.0, sw * s1, sw * c1 / kr),
    };
}

const Complex kI{0.0, 1.0};

// psi coefficient of Gamma_5 + (i r^2 - 2 t)/2 psi d_psi
ScalarField projective_psi()
{
    const ScalarField r = r_field();
    return 0.5 * (ScalarField(kI) * r * r - 2.0 * t_field());
}

// Omega_2 / Pi_3 and Omega_3 / Pi_2 psi coefficients; the printed lists carry
// a factor 2 on the imaginary part
ScalarField dilation_cos_psi(double w, double imag_factor)
{
    const ScalarField t = t_field();
    const ScalarField r = r_field();
    return w * (sin(2.0 * w * t) - ScalarField(imag_factor * kI) * cos(2.0 * w * t) * (w * r * r));
}

ScalarField dilation_sin_psi(double w, double imag_factor)
{
    const ScalarField t = t_field();
    const ScalarField r = r_field();
    return -(w * (cos(2.0 * w * t) + ScalarField(imag_factor * kI) * sin(2.0 * w * t) * (w * r * r)));
}

std::vector<VectorField> lambda_set(double k, Transcription tr)
{
    const auto g = gamma_set(k);
    const ScalarField r = r_field();
    const ScalarField kp = k * phi_field();
    // Galilei boosts t d_u, t d_v carry i u, i v; the printed form has i k^2 u, i k^2 v
    const double boost = tr == Transcription::kPrinted ? k * k : 1.0;
    return {
        rename(g[14], "Lambda_1"),
        with_psi(g[7], ScalarField(boost * kI) * r * cos(kp), "Lambda_2"),
        rename(g[8], "Lambda_3"),
        with_psi(g[9], ScalarField(boost * kI) * r * sin(kp), "Lambda_4"),
        rename(g[10], "Lambda_5"),
        with_psi(g[4], projective_psi(), "Lambda_6"),
        rename(g[5], "Lambda_7"),
        rename(g[6], "Lambda_8"),
        psi_scaling("Lambda_9"),
    };
}

std::vector<VectorField> omega_set(double k, double w, Transcription tr)
{
    const auto x = xi_set(k, w);
    const ScalarField t = t_field();
    const ScalarField r = r_field();
    const ScalarField kp = k * phi_field();
    const ScalarField iwr = ScalarField(w * kI) * r;
    const double imag = tr == Transcription::kPrinted ? 2.0 : 1.0;
    // printed Omega_6 repeats the cos(k phi) of Omega_8
    const ScalarField omega6_angle = tr == Transcription::kPrinted ? cos(kp) : sin(kp);
    return {
        rename(x[7], "Omega_1"),
        with_psi(x[9], dilation_cos_psi(w, imag), "Omega_2"),
        with_psi(x[10], dilation_sin_psi(w, imag), "Omega_3"),
        rename(x[8], "Omega_4"),
        with_psi(x[13], -(iwr * sin(w * t) * sin(kp)), "Omega_5"),
        with_psi(x[14], iwr * cos(w * t) * omega6_angle, "Omega_6"),
        with_psi(x[11], -(iwr * sin(w * t) * cos(kp)), "Omega_7"),
        with_psi(x[12], iwr * cos(w * t) * cos(kp), "Omega_8"),
        psi_scaling("Omega_9"),
    };
}

std::vector<VectorField> upsilon_set(double k)
{
    const auto g = gamma_set(k);
    return {
        rename(g[14], "Upsilon_1"),
        with_psi(g[4], projective_psi(), "Upsilon_2"),
        rename(g[5], "Upsilon_3"),
        rename(g[6], "Upsilon_4"),
        psi_scaling("Upsilon_5"),
    };
}

std::vector<VectorField> pi_set(double k, double w, Transcription tr)
{
    const auto x = xi_set(k, w);
    const double imag = tr == Transcription::kPrinted ? 2.0 : 1.0;
    return {
        rename(x[7], "Pi_1"),
        with_psi(x[10], dilation_sin_psi(w, imag), "Pi_2"),
        with_psi(x[9], dilation_cos_psi(w, imag), "Pi_3"),
        rename(x[8], "Pi_4"),
        psi_scaling("Pi_5"),
    };
}

double require_omega(const cone::ModelParams& params)
{
    if (!params.harmonic()) {
        throw std::invalid_argument("generator set needs the oscillator frequency");
    }
    return params.omega();
}

std::array<double, 3> chart_point(const JetPoint2& jp) { return {jp.t, jp.x[0], jp.x[1]}; }

// Total derivatives of a coefficient along the curve through jp.
struct TotalDerivatives {
    double value;
    double d1;
    double d2;
};

TotalDerivatives total(const RealJet& f, const JetPoint2& jp)
{
    const double v[3] = {1.0, jp.xdot[0], jp.xdot[1]};
    double d1 = 0.0;
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        d1 += v[a] * f.d(a);
        for (int b = 0; b < 3; ++b) {
            d2 += v[a] * v[b] * f.dd(a, b);
        }
    }
    d2 += jp.xddot[0] * f.d(1) + jp.xddot[1] * f.d(2);
    return {f.value, d1, d2};
}

}  // namespace

ScalarField t_field() { return ScalarField::coordinate(0, kChartArity); }
ScalarField r_field() { return ScalarField::coordinate(1, kChartArity); }
ScalarField phi_field() { return ScalarField::coordinate(2, kChartArity); }

ScalarField VectorField::component(int c) const
{
    switch (c) {
    case 0:
        return xi;
    case 1:
    case 2:
        return etas[static_cast<std::size_t>(c - 1)];
    case 3:
        return psi_coeff.value_or(ScalarField(0.0));
    default:
        throw std::out_of_range("vector field component");
    }
}

VectorField operator+(const VectorField& a, const VectorField& b)
{
    VectorField out{a.name + "+" + b.name, a.xi + b.xi, {a.etas[0] + b.etas[0], a.etas[1] + b.etas[1]}, std::nullopt};
    if (a.psi_coeff || b.psi_coeff) {
        out.psi_coeff = a.component(3) + b.component(3);
    }
    return out;
}

VectorField operator*(double s, const VectorField& a)
{
    VectorField out{a.name, s * a.xi, {s * a.etas[0], s * a.etas[1]}, std::nullopt};
    if (a.psi_coeff) {
        out.psi_coeff = s * *a.psi_coeff;
    }
    return out;
}

VectorField with_psi(VectorField base, const ScalarField& g, std::string name)
{
    base.psi_coeff = g;
    base.name = std::move(name);
    return base;
}

std::vector<VectorField> builtin_generators(GeneratorSet set, const cone::ModelParams& params,
                                            Transcription transcription)
{
    const double k = params.k();
    switch (set) {
    case GeneratorSet::kGamma:
        return gamma_set(k);
    case GeneratorSet::kXi:
        return xi_set(k, require_omega(params));
    case GeneratorSet::kLambda:
        return lambda_set(k, transcription);
    case GeneratorSet::kOmega:
        return omega_set(k, require_omega(params), transcription);
    case GeneratorSet::kUpsilon:
        return upsilon_set(k);
    case GeneratorSet::kPi:
        return pi_set(k, require_omega(params), transcription);
    }
    throw std::invalid_argument("unknown generator set");
}

std::vector<std::string> corrected_generator_names(GeneratorSet set)
{
    switch (set) {
    case GeneratorSet::kLambda:
        return {"Lambda_2", "Lambda_4"};
    case GeneratorSet::kOmega:
        return {"Omega_2", "Omega_3", "Omega_6"};
    case GeneratorSet::kPi:
        return {"Pi_2", "Pi_3"};
    default:
        return {};
    }
}

Prolongation prolong2_ode(const VectorField& x, const JetPoint2& jp)
{
    const auto p = chart_point(jp);
    const TotalDerivatives v = total(jet::eval_jet(x.xi, p, 2), jp);
    Prolongation out{};
    out.xi = v.value;
    for (int k = 0; k < 2; ++k) {
        const TotalDerivatives vk = total(jet::eval_jet(x.etas[static_cast<std::size_t>(k)], p, 2), jp);
        out.eta[k] = vk.value;
        out.eta1[k] = vk.d1 - jp.xdot[k] * v.d1;
        out.eta2[k] = vk.d2 - jp.xdot[k] * v.d2 - 2.0 * jp.xddot[k] * v.d1;
    }
    return out;
}

JetPoint2 on_shell(const cone::ModelParams& params, JetPoint2 jp)
{
    const cone::Acceleration a =
        cone::eom(params, cone::State{jp.t, jp.x[0], jp.x[1], jp.xdot[0], jp.xdot[1]});
    jp.xddot = {a.rddot, a.phiddot};
    return jp;
}

double DeterminingResidual::normalized() const
{
    return std::max(std::abs(raw[0]), std::abs(raw[1])) / scale;
}

DeterminingResidual determining_residual(const VectorField& x, const cone::ModelParams& params,
                                         const JetPoint2& jp_in)
{
    const JetPoint2 jp = on_shell(params, jp_in);
    const Prolongation pr = prolong2_ode(x, jp);
    const double k2 = params.k() * params.k();
    const double w2 = params.omega() * params.omega();
    const double r = jp.x[0];
    const double rd = jp.xdot[0];
    const double pd = jp.xdot[1];

    // Jacobian of F = (k^2 r phidot^2 - w^2 r, -2 rdot phidot / r); F has no
    // explicit t or phi dependence
    const double fr_r = k2 * pd * pd - w2;
    const double fr_pd = 2.0 * k2 * r * pd;
    const double fp_r = 2.0 * rd * pd / (r * r);
    const double fp_rd = -2.0 * pd / r;
    const double fp_pd = -2.0 * rd / r;

    DeterminingResidual out{};
    out.raw[0] = pr.eta2[0] - (pr.eta[0] * fr_r + pr.eta1[1] * fr_pd);
    out.raw[1] = pr.eta2[1] - (pr.eta[0] * fp_r + pr.eta1[0] * fp_rd + pr.eta1[1] * fp_pd);
    double m = std::abs(pr.xi);
    for (int k = 0; k < 2; ++k) {
        m = std::max({m, std::abs(pr.eta[k]), std::abs(pr.eta1[k]), std::abs(pr.eta2[k])});
    }
    out.scale = 1.0 + m;
    return out;
}

std::vector<JetPoint2> sample_jets(std::uint64_t seed, int count)
{
    std::vector<JetPoint2> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        JetPoint2 jp;
        jp.t = rng.uniform(-2.0, 2.0);
        const double mag = rng.uniform(0.3, 3.0);
        jp.x[0] = rng.uniform() < 0.5 ? -mag : mag;
        jp.x[1] = rng.uniform(0.0, 2.0 * kPi);
        jp.xdot[0] = rng.uniform(-2.0, 2.0);
        jp.xdot[1] = rng.uniform(-2.0, 2.0);
        out.push_back(jp);
    }
    return out;
}

std::vector<std::array<double, 3>> sample_points(std::uint64_t seed, int count)
{
    std::vector<std::array<double, 3>> out;
    for (const JetPoint2& jp : sample_jets(seed, count)) {
        out.push_back(chart_point(jp));
    }
    return out;
}

ResidualStats determining_residual_stats(const VectorField& x, const cone::ModelParams& params,
                                         const std::vector<JetPoint2>& jets, Execution execution)
{
    const auto values = map_indices<double>(static_cast<int>(jets.size()), execution, [&](int i) {
        return determining_residual(x, params, jets[static_cast<std::size_t>(i)]).normalized();
    });
    ResidualStats stats;
    stats.samples = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) {
        stats.max = std::max(stats.max, v);
        sum += v;
    }
    stats.mean = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
    return stats;
}

Coefficients evaluate(const VectorField& x, const std::array<double, 3>& p)
{
    Coefficients out{};
    for (int c = 0; c < 4; ++c) {
        out[static_cast<std::size_t>(c)] = jet::eval_jet_complex(x.component(c), p, 0).value;
    }
    return out;
}

Coefficients commutator_at(const VectorField& x, const VectorField& y, const std::array<double, 3>& p)
{
    std::array<ComplexJet, 4> jx;
    std::array<ComplexJet, 4> jy;
    for (std::size_t c = 0; c < 4; ++c) {
        jx[c] = jet::eval_jet_complex(x.component(static_cast<int>(c)), p, 1);
        jy[c] = jet::eval_jet_complex(y.component(static_cast<int>(c)), p, 1);
    }
    Coefficients out{};
    for (std::size_t c = 0; c < 4; ++c) {
        Complex s = 0.0;
        for (int a = 0; a < 3; ++a) {
            s += jx[static_cast<std::size_t>(a)].value * jy[c].d(a) - jy[static_cast<std::size_t>(a)].value * jx[c].d(a);
        }
        out[c] = s;
    }
    return out;
}

VectorField commutator(const VectorField& x, const VectorField& y)
{
    auto bracket = [&](int c) {
        ScalarField s = 0.0;
        for (int a = 0; a < 3; ++a) {
            s = s + x.component(a) * jet::diff(y.component(c), a) -
                y.component(a) * jet::diff(x.component(c), a);
        }
        return s;
    };
    VectorField out{"[" + x.name + "," + y.name + "]", bracket(0), {bracket(1), bracket(2)}, std::nullopt};
    if (x.psi_coeff || y.psi_coeff) {
        out.psi_coeff = bracket(3);
    }
    return out;
}

StructureConstants structure_constants(const std::vector<VectorField>& basis,
                                       const std::vector<std::array<double, 3>>& points)
{
    const int n = static_cast<int>(basis.size());
    const bool has_psi = std::any_of(basis.begin(), basis.end(), [](const VectorField& v) { return v.psi_coeff.has_value(); });
    // rows: real parts of the three base components, plus real and imaginary
    // parts of the psi coefficient when present
    const int per_point = has_psi ? 5 : 3;
    const int rows = per_point * static_cast<int>(points.size());
    if (rows < n) {
        throw IllConditionedError("structure_constants: fewer equations than basis elements");
    }
    auto flatten = [&](const Coefficients& c, Eigen::Ref<Eigen::VectorXd> out) {
        out[0] = c[0].real();
        out[1] = c[1].real();
        out[2] = c[2].real();
        if (has_psi) {
            out[3] = c[3].real();
            out[4] = c[3].imag();
        }
    };

    Eigen::MatrixXd a(rows, n);
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd col(per_point);
            flatten(evaluate(basis[static_cast<std::size_t>(j)], points[p]), col);
            a.block(static_cast<Eigen::Index>(p) * per_point, j, per_point, 1) = col;
        }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    StructureConstants out;
    out.n = n;
    out.c.assign(static_cast<std::size_t>(n * n * n), 0.0);
    out.condition_number = sv[n - 1] > 0.0 ? sv[0] / sv[n - 1] : INFINITY;
    if (!(out.condition_number <= 1e10)) {
        throw IllConditionedError("structure_constants: sampled basis has condition number " +
                                  std::to_string(out.condition_number));
    }

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Eigen::VectorXd b(rows);
            for (std::size_t p = 0; p < points.size(); ++p) {
                flatten(commutator_at(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)], points[p]),
                        b.segment(static_cast<Eigen::Index>(p) * per_point, per_point));
            }
            const Eigen::VectorXd x = svd.solve(b);
            const double miss = (a * x - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
            out.fit_residual = std::max(out.fit_residual, miss);
            for (int m = 0; m < n; ++m) {
                out.c[static_cast<std::size_t>((i * n + j) * n + m)] = x[m];
                out.c[static_cast<std::size_t>((j * n + i) * n + m)] = -x[m];
            }
        }
    }
    return out;
}

KillingForm killing_form(const StructureConstants& c)
{
    const int n = c.n;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int m = 0; m < n; ++m) {
                for (int l = 0; l < n; ++l) {
                    s += c.at(i, m, l) * c.at(j, l, m);
                }
            }
            k(i, j) = s;
        }
    }
    KillingForm out;
    out.matrix.resize(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out.matrix[static_cast<std::size_t>(i * n + j)] = k(i, j);
        }
    }
    out.determinant = std::abs(k.fullPivLu().determinant());
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) {
        const double norm = k.row(i).norm();
        d[i] = norm > 0.0 ? 1.0 / std::sqrt(norm) : 1.0;
    }
    const Eigen::MatrixXd scaled = d.asDiagonal() * k * d.asDiagonal();
    out.normalized_determinant = std::abs(scaled.fullPivLu().determinant());
    return out;
}

double antisymmetry_defect(const StructureConstants& c)
{
    double worst = 0.0;
    for (int i = 0; i < c.n; ++i) {
        for (int j = 0; j < c.n; ++j) {
            for (int m = 0; m < c.n; ++m) {
                worst = std::max(worst, std::abs(c.at(i, j, m) + c.at(j, i, m)));
            }
        }
    }
    return worst;
}

double jacobi_residual(const VectorField& x, const VectorField& y, const VectorField& z,
                       const std::array<double, 3>& p)
{
    const Coefficients a = commutator_at(commutator(x, y), z, p);
    const Coefficients b = commutator_at(commutator(y, z), x, p);
    const Coefficients c = commutator_at(commutator(z, x), y, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        worst = std::max(worst, std::abs(a[i] + b[i] + c[i]));
    }
    return worst;
}

SubalgebraReport verify_subalgebra_A4511(const cone::ModelParams& params, std::uint64_t seed)
{
    const auto g = gamma_set(params.k());
    const VectorField x4 = rename(g[5] + 0.5 * g[11], "Gamma_16");
    const std::array<VectorField, 4> x{g[6], g[8], g[10], x4};
    const auto points = sample_points(seed, 20);

    SubalgebraReport report;
    auto check = [&](const VectorField& a, const VectorField& b, const VectorField* expected) {
        double worst = 0.0;
        for (const auto& p : points) {
            const Coefficients br = commutator_at(a, b, p);
            const Coefficients ex = expected ? evaluate(*expected, p) : Coefficients{};
            for (std::size_t c = 0; c < 4; ++c) {
                worst = std::max(worst, std::abs(br[c] - ex[c]));
            }
        }
        report.relations.emplace_back("[" + a.name + "," + b.name + "] = " + (expected ? expected->name : "0"), worst);
        report.max_residual = std::max(report.max_residual, worst);
    };
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            check(x[i], x[j], nullptr);
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        check(x[i], x[3], &x[i]);
    }
    report.pass = report.max_residual <= 1e-9;
    return report;
}

ScalarField evolutionary_field(const VectorField& x, const ScalarField& psi)
{
    ScalarField q = x.component(3) * psi;
    for (int a = 0; a < 3; ++a) {
        q = q - x.component(a) * jet::diff(psi, a);
    }
    return q;
}

jet::ComplexJet evolutionary_apply(const VectorField& x, const ScalarField& psi,
                                   const std::array<double, 3>& p)
{
    return jet::eval_jet_complex(evolutionary_field(x, psi), p, 2);
}

}  // namespace conequant::sym
