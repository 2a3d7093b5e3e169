#include "conequant/spectrum.hpp"

#include "conequant/quadrature.hpp"
#include "conequant/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace conequant::spec {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

// Number of eigenvalues below x (Sturm sequence of the LDL^T pivots).
int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x, double pivmin)
{
    int count = 0;
    double q = d[0] - x;
    if (std::abs(q) < pivmin) {
        q = -pivmin;
    }
    count += q < 0.0;
    for (std::size_t i = 1; i < d.size(); ++i) {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if (std::abs(q) < pivmin) {
            q = -pivmin;
        }
        count += q < 0.0;
    }
    return count;
}

// Solves (T - shift) x = b for tridiagonal T by Gaussian elimination with
// partial pivoting; b is overwritten with x.
void tridiagonal_solve(const std::vector<double>& d, const std::vector<double>& e, double shift,
                       std::vector<double>& b)
{
    const std::size_t n = d.size();
    std::vector<double> diag(n), sup(n, 0.0), sup2(n, 0.0), sub(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = d[i] - shift;
        if (i + 1 < n) {
            sup[i] = e[i];
            sub[i] = e[i];
        }
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(d[i]) + (i + 1 < n ? std::abs(e[i]) : 0.0));
    }
    const double tiny = std::numeric_limits<double>::epsilon() * scale;
    std::vector<double> mult(n, 0.0);
    std::vector<char> swapped(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(diag[i]) >= std::abs(sub[i])) {
            if (diag[i] == 0.0) {
                diag[i] = tiny;
            }
            const double m = sub[i] / diag[i];
            mult[i] = m;
            diag[i + 1] -= m * sup[i];
            b[i + 1] -= m * b[i];
        } else {
            // swap rows i and i+1
            const double m = diag[i] / sub[i];
            mult[i] = m;
            swapped[i] = 1;
            diag[i] = sub[i];
            const double old_sup = sup[i];
            sup[i] = diag[i + 1];
            diag[i + 1] = old_sup - m * diag[i + 1];
            if (i + 2 < n) {
                sup2[i] = sup[i + 1];
                sup[i + 1] = -m * sup[i + 1];
            }
            std::swap(b[i], b[i + 1]);
            b[i + 1] -= m * b[i];
        }
    }
    if (diag[n - 1] == 0.0) {
        diag[n - 1] = tiny;
    }
    b[n - 1] /= diag[n - 1];
    if (n >= 2) {
        b[n - 2] = (b[n - 2] - sup[n - 2] * b[n - 1]) / diag[n - 2];
    }
    for (std::size_t ii = n >= 2 ? n - 2 : 0; ii-- > 0;) {
        b[ii] = (b[ii] - sup[ii] * b[ii + 1] - sup2[ii] * b[ii + 2]) / diag[ii];
    }
}

struct Discretization {
    std::vector<double> d;
    std::vector<double> e;
    std::vector<double> r;
    double h;
};

// -r^-a (r^a y')' + w^2 r^2 y with a = 2 mu + 1 and R = r^mu y, symmetrized
// by chi = r^{a/2} y = sqrt(r) R. Nodes r_i = (i + 1/2) h; the flux through
// r = 0 vanishes and y = 0 at the ghost node beyond r_max.
Discretization discretize(double mu, double omega, double r_max, int n)
{
    Discretization out;
    out.h = r_max / n;
    const double h = out.h;
    const double h2 = h * h;
    const double a = 2.0 * mu + 1.0;
    const auto un = static_cast<std::size_t>(n);
    out.d.resize(un);
    out.e.resize(un - 1);
    out.r.resize(un);
    for (std::size_t i = 0; i < un; ++i) {
        out.r[i] = (static_cast<double>(i) + 0.5) * h;
    }
    for (std::size_t i = 0; i < un; ++i) {
        const double lr = std::log(out.r[i]);
        const double up = std::exp(a * (std::log(static_cast<double>(i + 1) * h) - lr));
        const double dn = i == 0 ? 0.0 : std::exp(a * (std::log(static_cast<double>(i) * h) - lr));
        out.d[i] = (up + dn) / h2 + omega * omega * out.r[i] * out.r[i];
        if (i + 1 < un) {
            const double mid = std::log(static_cast<double>(i + 1) * h);
            out.e[i] = -std::exp(a * (mid - 0.5 * (lr + std::log(out.r[i + 1])))) / h2;
        }
    }
    return out;
}

std::vector<double> eigenvector(const Discretization& disc, double lambda, const std::vector<std::vector<double>>& previous)
{
    const std::size_t n = disc.d.size();
    std::vector<double> x(n);
    // deterministic start with every mode present
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 1.0 + 0.1 * std::sin(0.37 * static_cast<double>(i));
    }
    const double shift = lambda + 1e-12 * std::max(1.0, std::abs(lambda));
    auto orthogonalize = [&]() {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& v : previous) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    dot += v[i] * x[i];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    x[i] -= dot * v[i];
                }
            }
        }
    };
    auto normalize = [&]() {
        double s = 0.0;
        for (double v : x) {
            s += v * v;
        }
        s = std::sqrt(s);
        for (double& v : x) {
            v /= s;
        }
    };
    for (int it = 0; it < 4; ++it) {
        tridiagonal_solve(disc.d, disc.e, shift, x);
        orthogonalize();
        normalize();
    }
    return x;
}

struct GridSolution {
    std::vector<double> lambdas;
    std::vector<std::vector<double>> vectors;  // unit 2-norm
    Discretization disc;
};

GridSolution solve_grid(double mu, double omega, double r_max, int n, int count, bool want_vectors)
{
    GridSolution out;
    out.disc = discretize(mu, omega, r_max, n);
    out.lambdas = tridiagonal_eigenvalues(out.disc.d, out.disc.e, count);
    if (want_vectors) {
        for (double lambda : out.lambdas) {
            out.vectors.push_back(eigenvector(out.disc, lambda, out.vectors));
        }
    }
    return out;
}

double phi_coefficient(const PdeVariant& v)
{
    const double k = v.params().k();
    return (v.quantization() == Quantization::kNoether ? 1.0 : 0.25) / (k * k);
}

}  // namespace

PdeVariant::PdeVariant(VariantTag tag, const cone::ModelParams& params) : tag_(tag), params_(params)
{
    if (harmonic() != params.harmonic()) {
        throw std::invalid_argument(harmonic() ? "oscillator variant needs omega" : "free variant takes no omega");
    }
}

Quantization PdeVariant::quantization() const noexcept
{
    return tag_ == VariantTag::kNoetherFree || tag_ == VariantTag::kNoetherHo ? Quantization::kNoether
                                                                              : Quantization::kKowalski;
}

bool PdeVariant::harmonic() const noexcept
{
    return tag_ == VariantTag::kNoetherHo || tag_ == VariantTag::kKowalskiHo;
}

std::string PdeVariant::name() const
{
    switch (tag_) {
    case VariantTag::kNoetherFree: return "NOETHER_FREE";
    case VariantTag::kNoetherHo: return "NOETHER_HO";
    case VariantTag::kKowalskiFree: return "KOWALSKI_FREE";
    case VariantTag::kKowalskiHo: return "KOWALSKI_HO";
    }
    return "?";
}

Complex pde_residual(const PdeVariant& variant, const jet::ComplexJet& psi, const std::array<double, 3>& p)
{
    const double r = p[1];
    if (r == 0.0) {
        throw cone::VertexError("pde_residual at the vertex");
    }
    double potential = 0.0;
    if (variant.harmonic()) {
        const double w = variant.params().omega();
        potential += w * w * r * r;
    }
    if (variant.quantization() == Quantization::kKowalski) {
        potential += 0.25 / (r * r);
    }
    return 2.0 * kI * psi.d(0) + psi.dd(1, 1) + psi.d(1) / r + phi_coefficient(variant) / (r * r) * psi.dd(2, 2) -
           potential * psi.value;
}

Complex pde_residual(const PdeVariant& variant, const ScalarField& psi, const std::array<double, 3>& p)
{
    if (p[1] == 0.0) {
        throw cone::VertexError("pde_residual at the vertex");
    }
    return pde_residual(variant, jet::eval_jet_complex(psi, p, 2), p);
}

double effective_index(Quantization q, int p, double k)
{
    const double a = std::abs(static_cast<double>(p)) / k;
    return q == Quantization::kNoether ? a : std::sqrt(0.25 * a * a + 0.25);
}

double printed_kowalski_index(int p, double k)
{
    const double a = static_cast<double>(p) / k;
    return 0.5 * std::sqrt(1.0 + 4.0 * a * a);
}

RadialProblem reduce_radial(const PdeVariant& variant, const ModeNumbers& modes)
{
    return RadialProblem{variant.tag(), effective_index(variant.quantization(), modes.p, variant.params().k()),
                         variant.params().omega(), variant.harmonic() ? 0.0 : modes.epsilon};
}

double oscillator_energy(double omega, int n, double mu) { return omega * (2.0 * n + mu + 1.0); }

std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& d, const std::vector<double>& e, int count)
{
    const std::size_t n = d.size();
    if (count < 0 || static_cast<std::size_t>(count) > n) {
        throw SolverError("tridiagonal_eigenvalues: bad eigenvalue count");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double emax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - radius);
        hi = std::max(hi, d[i] + radius);
        if (i + 1 < n) {
            emax = std::max(emax, std::abs(e[i]));
        }
    }
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, emax * emax);
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<double> out;
    for (int j = 0; j < count; ++j) {
        double a = lo;
        double b = hi;
        int it = 0;
        while (b - a > 2.0 * eps * std::max(std::abs(a), std::abs(b)) + pivmin) {
            if (++it > 200) {
                throw SolverError("Sturm bisection did not converge");
            }
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) {
                break;
            }
            (sturm_count(d, e, mid, pivmin) <= j ? a : b) = mid;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

BoundStates solve_bound_states(const RadialProblem& rp, int n_max, const GridSpec& grid)
{
    if (!(rp.omega > 0.0)) {
        throw std::invalid_argument("solve_bound_states needs omega > 0");
    }
    if (n_max < 0 || grid.n < 100) {
        throw std::invalid_argument("solve_bound_states: need n_max >= 0 and at least 100 nodes");
    }
    const double w = rp.omega;
    double r_max = grid.r_max;
    if (r_max <= 0.0) {
        const double e_est = oscillator_energy(w, n_max, rp.mu_eff);
        r_max = std::sqrt(2.0 * e_est) / w + 8.0 / std::sqrt(w);
    }
    const int count = n_max + 1;
    const GridSolution coarse = solve_grid(rp.mu_eff, w, r_max, grid.n, count, false);
    const GridSolution fine = solve_grid(rp.mu_eff, w, r_max, 2 * grid.n, count, true);

    BoundStates out;
    out.r_max = r_max;
    const double h = fine.disc.h;
    for (int j = 0; j < count; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        Eigenpair ep;
        ep.n = j;
        ep.E_coarse = 0.5 * coarse.lambdas[uj];
        ep.E_fine = 0.5 * fine.lambdas[uj];
        ep.E = (4.0 * ep.E_fine - ep.E_coarse) / 3.0;
        ep.h = h;
        ep.r_max = r_max;
        ep.chi = fine.vectors[uj];
        double peak = 0.0;
        for (double v : ep.chi) {
            peak = std::max(peak, std::abs(v));
        }
        // sign convention: positive next to the vertex, like r^mu L_n^mu(0) > 0
        for (double v : ep.chi) {
            if (std::abs(v) > 1e-6 * peak) {
                if (v < 0.0) {
                    for (double& c : ep.chi) {
                        c = -c;
                    }
                }
                break;
            }
        }
        const double scale = 1.0 / std::sqrt(h);
        for (double& c : ep.chi) {
            c *= scale;
        }
        if (std::abs(ep.chi.back()) > 1e-8 * peak * scale) {
            out.boundary_warning = true;
        }
        out.pairs.push_back(std::move(ep));
    }
    return out;
}

ScalarField closed_form_eigenfunction(const PdeVariant& variant, int n, int p)
{
    if (!variant.harmonic()) {
        throw std::invalid_argument("closed_form_eigenfunction needs an oscillator variant");
    }
    if (n < 0) {
        throw std::invalid_argument("closed_form_eigenfunction: n must be nonnegative");
    }
    const double w = variant.params().omega();
    const double mu = effective_index(variant.quantization(), p, variant.params().k());
    const double energy = oscillator_energy(w, n, mu);
    const ScalarField t = sym::t_field();
    const ScalarField r = sym::r_field();
    const ScalarField phi = sym::phi_field();
    const ScalarField phase = exp(ScalarField(-energy * kI) * t + ScalarField(static_cast<double>(p) * kI) * phi);
    ScalarField radial = exp(-0.5 * w * r * r) * laguerre(n, mu, w * r * r);
    if (mu != 0.0) {
        radial = pow(abs(r), mu) * radial;
    }
    return phase * radial;
}

double eigenfunction_normalization(const PdeVariant& variant, int n, int p)
{
    // int int |psi|^2 |r| dr dphi = 2 pi Gamma(n + mu + 1) / (n! w^(mu + 1))
    const double w = variant.params().omega();
    const double mu = effective_index(variant.quantization(), p, variant.params().k());
    const double log_norm = std::log(2.0 * kPi) + std::lgamma(n + mu + 1.0) - std::lgamma(n + 1.0) - (mu + 1.0) * std::log(w);
    return std::exp(-0.5 * log_norm);
}

ScalarField continuum_solution(const PdeVariant& variant, int p, double epsilon)
{
    if (variant.harmonic()) {
        throw std::invalid_argument("continuum_solution needs a free variant");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("continuum_solution needs epsilon > 0");
    }
    const double mu = effective_index(variant.quantization(), p, variant.params().k());
    const ScalarField t = sym::t_field();
    const ScalarField phi = sym::phi_field();
    const ScalarField radial = bessel_j(mu, std::sqrt(2.0 * epsilon) * abs(sym::r_field()));
    return radial * exp(ScalarField(-kI) * (epsilon * t + static_cast<double>(p) * phi));
}

InnerProduct inner_product(const ScalarField& f, const ScalarField& g, const InnerProductOptions& options)
{
    const auto rule = quad::gauss_legendre(options.quad_order);
    const int panels = options.panels;
    const double width = options.r_max / panels;
    const int m = options.phi_points;
    const double dphi = 2.0 * kPi / m;

    // panels [0, panels) cover [-r_max, 0], the rest [0, r_max]
    const auto partial = map_indices<Complex>(2 * panels, options.execution, [&](int idx) {
        const double lo = -options.r_max + idx * width;
        const double mid = lo + 0.5 * width;
        Complex panel = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double r = mid + 0.5 * width * rule.nodes[i];
            Complex ring = 0.0;
            for (int j = 0; j < m; ++j) {
                const std::array<double, 3> p{options.t, r, j * dphi};
                ring += std::conj(jet::eval_jet_complex(f, p, 0).value) * jet::eval_jet_complex(g, p, 0).value;
            }
            panel += rule.weights[i] * std::abs(r) * ring * dphi;
        }
        return 0.5 * width * panel;
    });
    InnerProduct out;
    out.value = 0.0;
    for (const Complex& c : partial) {
        out.value += c;
    }
    for (const double r : {-options.r_max, options.r_max}) {
        for (int j = 0; j < m; ++j) {
            const std::array<double, 3> p{options.t, r, j * dphi};
            if (std::abs(jet::eval_jet_complex(f, p, 0).value) > 1e-10 ||
                std::abs(jet::eval_jet_complex(g, p, 0).value) > 1e-10) {
                out.tail_warning = true;
            }
        }
    }
    return out;
}

double continuum_check(int p, double epsilon, const cone::ModelParams& params, const std::vector<double>& radii)
{
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("continuum_check needs epsilon > 0");
    }
    const double nu = std::abs(static_cast<double>(p)) / params.k();
    const ScalarField r = ScalarField::coordinate(0, 1);
    const ScalarField radial = bessel_j(nu, std::sqrt(2.0 * epsilon) * r);
    double worst = 0.0;
    for (double x : radii) {
        const double pt[] = {x};
        const jet::RealJet j = jet::eval_jet(radial, pt, 2);
        const double res = j.dd(0, 0) + j.d(0) / x + (2.0 * epsilon - nu * nu / (x * x)) * j.value;
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

std::vector<std::string> rival_preserved_names(const PdeVariant& variant)
{
    if (variant.harmonic()) {
        // Pi_1 = Omega_1, Pi_2 = Omega_3, Pi_3 = Omega_2, Pi_4 = Omega_4
        return {"Omega_1", "Omega_2", "Omega_3", "Omega_4"};
    }
    // Upsilon_1..4 = Lambda_1, Lambda_6, Lambda_7, Lambda_8
    return {"Lambda_1", "Lambda_6", "Lambda_7", "Lambda_8"};
}

std::vector<ActionResult> evolutionary_action_report(const PdeVariant& variant, sym::Transcription transcription,
                                                     std::uint64_t seed, int samples, double threshold,
                                                     Execution execution)
{
    const auto set = variant.harmonic() ? sym::GeneratorSet::kOmega : sym::GeneratorSet::kLambda;
    auto generators = sym::builtin_generators(set, variant.params(), transcription);
    generators.resize(8);  // the trailing psi d_psi is trivially kept

    std::vector<ScalarField> solutions;
    if (variant.harmonic()) {
        for (const auto& [n, p] : {std::pair{0, 0}, std::pair{1, 1}, std::pair{2, -1}, std::pair{0, 2}}) {
            solutions.push_back(closed_form_eigenfunction(variant, n, p));
        }
    } else {
        for (const auto& [p, eps] : {std::pair{0, 0.7}, std::pair{1, 0.5}, std::pair{2, 1.3}, std::pair{-1, 0.9}}) {
            solutions.push_back(continuum_solution(variant, p, eps));
        }
    }
    const auto points = sym::sample_points(seed, samples);

    std::vector<ActionResult> out;
    for (const sym::VectorField& x : generators) {
        std::vector<ScalarField> q;
        for (const ScalarField& psi : solutions) {
            q.push_back(sym::evolutionary_field(x, psi));
        }
        const auto worst = map_indices<double>(samples, execution, [&](int i) {
            const auto& p = points[static_cast<std::size_t>(i)];
            double w = 0.0;
            for (const ScalarField& qpsi : q) {
                w = std::max(w, std::abs(pde_residual(variant, jet::eval_jet_complex(qpsi, p, 2), p)));
            }
            return w;
        });
        ActionResult res;
        res.generator = x.name;
        for (double v : worst) {
            res.max_residual = std::max(res.max_residual, v);
        }
        res.preserved = res.max_residual <= threshold;
        out.push_back(res);
    }
    return out;
}

}  // namespace conequant::spec
