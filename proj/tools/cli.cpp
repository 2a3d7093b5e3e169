#include "cli.hpp"

#include "conequant/cone_model.hpp"
#include "conequant/random.hpp"
#include "conequant/spectrum.hpp"
#include "conequant/symmetry.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <fmt/format.h>
#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace conequant::cli {

namespace {

constexpr double kDeterminingTol = 1e-8;
constexpr double kClosureTol = 1e-8;
constexpr double kJacobiTol = 1e-9;
constexpr double kKillingTol = 1e-6;
constexpr double kDriftTol = 1e-7;
constexpr double kPreservedTol = 1e-6;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string csv_cell(const Cell& c)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(const std::string& s) const
        {
            if (s.find_first_of(",\"\n") == std::string::npos) {
                return s;
            }
            std::string q = "\"";
            for (char ch : s) {
                q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            }
            return q + "\"";
        }
        std::string operator()(double d) const { return fmt::format("{:.17g}", d); }
        std::string operator()(std::int64_t i) const { return fmt::format("{}", i); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(Visitor{}, c);
}

nlohmann::ordered_json json_cell(const Cell& c)
{
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
        nlohmann::ordered_json operator()(double d) const { return d; }
        nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
        nlohmann::ordered_json operator()(bool b) const { return b; }
    };
    return std::visit(Visitor{}, c);
}

cone::ModelParams make_params(const std::string& model, double k, double omega)
{
    if (model == "free") {
        return cone::ModelParams::free(k);
    }
    if (model == "ho") {
        return cone::ModelParams::harmonic(k, omega);
    }
    throw UsageError("unknown model " + model);
}

Cell num(double d) { return Cell{d}; }
Cell str(std::string s) { return Cell{std::move(s)}; }
Cell integer(long long i) { return Cell{static_cast<std::int64_t>(i)}; }

}  // namespace

std::string to_csv(const Table& t)
{
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out += (i ? "," : "") + t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + csv_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& t)
{
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["command"] = t.command;
    j["pass"] = t.pass;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r;
        for (std::size_t i = 0; i < row.size(); ++i) {
            r[t.columns[i]] = json_cell(row[i]);
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

Table cmd_symmetries(const SymmetriesConfig& c)
{
    if (c.samples < 1) {
        throw UsageError("--samples must be at least 1");
    }
    const auto params = make_params(c.model, c.k, c.omega);
    const auto set = params.harmonic() ? sym::GeneratorSet::kXi : sym::GeneratorSet::kGamma;
    const auto basis = sym::builtin_generators(set, params);
    const auto jets = sym::sample_jets(c.seed, c.samples);

    Table t;
    t.command = "symmetries";
    t.columns = {"kind", "name", "max", "mean", "pass"};
    auto add = [&](const std::string& kind, const std::string& name, double max, Cell mean, bool pass) {
        t.rows.push_back({str(kind), str(name), num(max), std::move(mean), Cell{pass}});
        t.pass = t.pass && pass;
    };

    for (const auto& x : basis) {
        const auto stats = sym::determining_residual_stats(x, params, jets);
        add("generator", x.name, stats.max, num(stats.mean), stats.max <= kDeterminingTol);
    }

    const auto points = sym::sample_points(c.seed + 1, 60);
    const auto sc = sym::structure_constants(basis, points);
    add("closure", "fit_residual", sc.fit_residual, {}, sc.fit_residual <= kClosureTol);
    add("closure", "antisymmetry", sym::antisymmetry_defect(sc), {}, sym::antisymmetry_defect(sc) <= kClosureTol);

    SplitMix64 rng = SplitMix64::stream(c.seed, 7);
    double jacobi = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto& x = basis[rng.next() % basis.size()];
        const auto& y = basis[rng.next() % basis.size()];
        const auto& z = basis[rng.next() % basis.size()];
        jacobi = std::max(jacobi, sym::jacobi_residual(x, y, z, points[static_cast<std::size_t>(trial) % points.size()]));
    }
    add("closure", "jacobi", jacobi, {}, jacobi <= kJacobiTol);

    const auto kf = sym::killing_form(sc);
    add("killing", "normalized_determinant", kf.normalized_determinant, {}, kf.normalized_determinant > kKillingTol);
    add("killing", "determinant", kf.determinant, {}, kf.determinant > 0.0);

    if (!params.harmonic()) {
        const auto sub = sym::verify_subalgebra_A4511(params, c.seed);
        for (const auto& [relation, residual] : sub.relations) {
            add("subalgebra", relation, residual, {}, residual <= 1e-9);
        }
    }
    return t;
}

Table cmd_spectrum(const SpectrumConfig& c)
{
    spec::VariantTag tag;
    if (c.variant == "noether") {
        tag = spec::VariantTag::kNoetherHo;
    } else if (c.variant == "kowalski") {
        tag = spec::VariantTag::kKowalskiHo;
    } else {
        throw UsageError("spectrum needs --variant noether or kowalski");
    }
    if (c.pmax < 0 || c.nmax < 0 || c.grid < 100) {
        throw UsageError("need --pmax >= 0, --nmax >= 0 and --grid >= 100");
    }
    // k = 1 (the flat plane) is allowed here as the reference limit
    if (!(c.k > 0.0 && c.k <= 1.0) || !(c.omega > 0.0)) {
        throw UsageError("spectrum needs k in (0, 1] and omega > 0");
    }
    const auto q = tag == spec::VariantTag::kNoetherHo ? spec::Quantization::kNoether : spec::Quantization::kKowalski;
    const std::string name = q == spec::Quantization::kNoether ? "NOETHER_HO" : "KOWALSKI_HO";

    struct Solve {
        spec::BoundStates states;
        std::string error;
    };
    const int np = 2 * c.pmax + 1;
    const auto solves = map_indices<Solve>(np, Execution::kParallel, [&](int i) {
        const int p = i - c.pmax;
        Solve s;
        try {
            const spec::RadialProblem rp{tag, spec::effective_index(q, p, c.k), c.omega, 0.0};
            s.states = spec::solve_bound_states(rp, c.nmax, {c.r_max, c.grid});
        } catch (const spec::SolverError& e) {
            s.error = e.what();
        }
        return s;
    });

    Table t;
    t.command = "spectrum";
    t.columns = {"variant", "k", "omega", "p", "n", "mu_eff", "E_numeric", "E_formula_noether",
                 "E_formula_kowalski", "E_formula_derived", "rel_err", "match", "matches_noether",
                 "matches_kowalski_printed", "boundary_warning", "error"};
    const double w = c.omega;
    for (int i = 0; i < np; ++i) {
        const int p = i - c.pmax;
        const double mu = spec::effective_index(q, p, c.k);
        const auto& s = solves[static_cast<std::size_t>(i)];
        for (int n = 0; n <= c.nmax; ++n) {
            const double e_noether = spec::oscillator_energy(w, n, std::abs(p) / c.k);
            const double e_printed = spec::oscillator_energy(w, n, spec::printed_kowalski_index(p, c.k));
            const double e_derived = spec::oscillator_energy(w, n, mu);
            std::vector<Cell> row{str(name), num(c.k), num(w), integer(p), integer(n), num(mu)};
            if (!s.error.empty()) {
                row.insert(row.end(), {Cell{}, num(e_noether), num(e_printed), num(e_derived), Cell{}, Cell{false},
                                       Cell{}, Cell{}, Cell{}, str("solver")});
                t.pass = false;
            } else {
                const double e = s.states.pairs[static_cast<std::size_t>(n)].E;
                const double rel = std::abs(e - e_derived) / e_derived;
                const bool match = rel <= c.tolerance;
                row.insert(row.end(),
                           {num(e), num(e_noether), num(e_printed), num(e_derived), num(rel), Cell{match},
                            Cell{std::abs(e - e_noether) / e_noether <= c.tolerance},
                            Cell{std::abs(e - e_printed) / e_printed <= c.tolerance},
                            Cell{s.states.boundary_warning}, str("")});
                t.pass = t.pass && match;
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

Table cmd_classical(const ClassicalConfig& c)
{
    if (c.ic.size() != 5) {
        throw UsageError("--ic needs t0,r0,phi0,rdot0,phidot0");
    }
    if (!(c.dt > 0.0) || !(c.t_end > c.ic[0])) {
        throw UsageError("need --dt > 0 and --t-end after t0");
    }
    const auto params = make_params(c.model, c.k, c.omega);
    const cone::State initial{c.ic[0], c.ic[1], c.ic[2], c.ic[3], c.ic[4]};
    if (initial.r == 0.0) {
        throw UsageError("initial state at the vertex");
    }
    cone::IntegrateOptions opts;
    opts.rtol = c.rtol;
    opts.atol = c.rtol;
    opts.sample_interval = c.dt;
    const auto traj = cone::integrate(params, initial, c.t_end, opts);

    Table t;
    t.command = "classical";
    t.columns = {"t", "r", "phi", "rdot", "phidot"};
    const auto integrals = cone::noether_integrals(params);
    for (int i = 0; i < cone::kIntegralCount; ++i) {
        t.columns.push_back(fmt::format("I{}", i + 1));
    }
    for (const auto& s : traj.samples) {
        std::vector<Cell> row{num(s.state.t), num(s.state.r), num(s.state.phi), num(s.state.rdot),
                              num(s.state.phidot)};
        for (double v : s.integrals) {
            row.push_back(num(v));
        }
        t.rows.push_back(std::move(row));
    }
    std::vector<Cell> summary{str(traj.vertex_event ? "vertex_event" : "max_drift"), Cell{}, Cell{}, Cell{}, Cell{}};
    for (int i = 0; i < cone::kIntegralCount; ++i) {
        const double d = cone::integral_drift(traj, i);
        summary.push_back(num(d));
        t.pass = t.pass && d <= kDriftTol;
    }
    t.rows.push_back(std::move(summary));
    t.pass = t.pass && !traj.vertex_event;
    return t;
}

Table cmd_check_pde(const CheckPdeConfig& c)
{
    if (c.samples < 1) {
        throw UsageError("--samples must be at least 1");
    }
    const auto params = make_params(c.model, c.k, c.omega);
    const bool ho = params.harmonic();
    spec::VariantTag tag;
    if (c.variant == "noether") {
        tag = ho ? spec::VariantTag::kNoetherHo : spec::VariantTag::kNoetherFree;
    } else if (c.variant == "kowalski") {
        tag = ho ? spec::VariantTag::kKowalskiHo : spec::VariantTag::kKowalskiFree;
    } else {
        throw UsageError("check-pde needs --variant noether or kowalski");
    }
    sym::Transcription tr;
    if (c.transcription == "corrected") {
        tr = sym::Transcription::kCorrected;
    } else if (c.transcription == "printed") {
        tr = sym::Transcription::kPrinted;
    } else {
        throw UsageError("--transcription must be printed or corrected");
    }
    const spec::PdeVariant variant(tag, params);
    const auto report = spec::evolutionary_action_report(variant, tr, c.seed, c.samples, kPreservedTol);
    const auto keep = variant.quantization() == spec::Quantization::kKowalski ? spec::rival_preserved_names(variant)
                                                                             : std::vector<std::string>{};

    Table t;
    t.command = "check-pde";
    t.columns = {"variant", "generator", "max_residual", "preserved", "expected_preserved"};
    for (const auto& r : report) {
        const bool expected = variant.quantization() == spec::Quantization::kNoether ||
                              std::find(keep.begin(), keep.end(), r.generator) != keep.end();
        t.rows.push_back({str(variant.name()), str(r.generator), num(r.max_residual), Cell{r.preserved},
                          Cell{expected}});
        t.pass = t.pass && r.preserved == expected;
    }
    return t;
}

int run(int argc, const char* const* argv)
{
    if (const char* threads = std::getenv("CONEQUANT_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) {
            omp_set_num_threads(n);
        }
    }

    CLI::App app{"Classical and quantum motion on a double cone"};
    app.require_subcommand(1);
    std::string out_path;
    std::string format_name;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", out_path, "Output file (stdout if omitted)");
        sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    SymmetriesConfig sc;
    auto* symmetries = app.add_subcommand("symmetries", "Determining residuals and algebra structure");
    symmetries->add_option("--model", sc.model, "free or ho")->check(CLI::IsMember({"free", "ho"}));
    symmetries->add_option("--k", sc.k, "Cone parameter sin(alpha)");
    symmetries->add_option("--omega", sc.omega, "Oscillator frequency");
    symmetries->add_option("--seed", sc.seed);
    symmetries->add_option("--samples", sc.samples, "Random jets per generator");
    common(symmetries);

    SpectrumConfig pc;
    auto* spectrum = app.add_subcommand("spectrum", "Bound-state sweep for an oscillator quantization");
    spectrum->add_option("--variant", pc.variant, "noether or kowalski")->check(CLI::IsMember({"noether", "kowalski"}));
    spectrum->add_option("--k", pc.k);
    spectrum->add_option("--omega", pc.omega);
    spectrum->add_option("--pmax", pc.pmax, "Angular numbers -pmax..pmax");
    spectrum->add_option("--nmax", pc.nmax, "Radial levels 0..nmax");
    spectrum->add_option("--rmax", pc.r_max, "Outer radius (0 picks one)");
    spectrum->add_option("--grid", pc.grid, "Coarse grid nodes");
    spectrum->add_option("--tol", pc.tolerance, "Relative tolerance for a match");
    common(spectrum);

    ClassicalConfig cc;
    auto* classical = app.add_subcommand("classical", "Integrate a trajectory and track the first integrals");
    classical->add_option("--model", cc.model)->check(CLI::IsMember({"free", "ho"}));
    classical->add_option("--k", cc.k);
    classical->add_option("--omega", cc.omega);
    classical->add_option("--ic", cc.ic, "t0,r0,phi0,rdot0,phidot0")->delimiter(',')->expected(5);
    classical->add_option("--t-end", cc.t_end);
    classical->add_option("--dt", cc.dt, "Output interval");
    classical->add_option("--rtol", cc.rtol);
    common(classical);

    CheckPdeConfig qc;
    auto* check = app.add_subcommand("check-pde", "Evolutionary actions of the candidate generators");
    check->add_option("--variant", qc.variant)->check(CLI::IsMember({"noether", "kowalski"}));
    check->add_option("--model", qc.model)->check(CLI::IsMember({"free", "ho"}));
    check->add_option("--k", qc.k);
    check->add_option("--omega", qc.omega);
    check->add_option("--seed", qc.seed);
    check->add_option("--samples", qc.samples);
    check->add_option("--transcription", qc.transcription, "printed or corrected")
        ->check(CLI::IsMember({"printed", "corrected"}));
    common(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    Table table;
    try {
        if (*symmetries) {
            table = cmd_symmetries(sc);
        } else if (*spectrum) {
            table = cmd_spectrum(pc);
        } else if (*classical) {
            table = cmd_classical(cc);
        } else {
            table = cmd_check_pde(qc);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailure;
    }

    if (format_name.empty()) {
        format_name = *check ? "json" : "csv";
    }
    const std::string text = format_name == "json" ? to_json(table) : to_csv(table);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f || !(f << text)) {
            std::cerr << "cannot write " << out_path << '\n';
            return kCheckFailure;
        }
    }
    return table.pass ? kPass : kCheckFailure;
}

}  // namespace conequant::cli
