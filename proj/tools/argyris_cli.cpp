#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"

#include "argyris/argyris_space.hpp"
#include "argyris/duality.hpp"
#include "argyris/errors.hpp"
#include "argyris/fit.hpp"
#include "argyris/gluing.hpp"

using namespace argyris;

namespace {

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }
std::string e3(double v) { return fmt("%.2e", v); }

struct GeometryArgs {
    std::string builtin;
    std::string path;
    int p = 3;
    int r = 1;
    int n = 4;
    int threads = 0;
    CLI::Option* p_opt = nullptr;
    CLI::Option* r_opt = nullptr;
    CLI::Option* n_opt = nullptr;

    std::string label() const { return builtin.empty() ? path : builtin; }
};

void add_geometry_options(CLI::App* app, GeometryArgs& g)
{
    auto* src = app->add_option_group("geometry source", "exactly one of --builtin, --geometry");
    src->add_option("--builtin", g.builtin, "built-in geometry name")
        ->check(CLI::IsMember(builtin_names()));
    src->add_option("--geometry", g.path, "geometry file")->check(CLI::ExistingFile);
    src->require_option(1);
    g.p_opt = app->add_option("--p", g.p, "spline degree")->check(CLI::PositiveNumber);
    g.r_opt = app->add_option("--r", g.r, "spline regularity")->check(CLI::NonNegativeNumber);
    g.n_opt = app->add_option("--n", g.n, "elements per direction")->check(CLI::PositiveNumber);
    app->add_option("--threads", g.threads, "OpenMP threads (0 keeps the runtime default)")
        ->check(CLI::NonNegativeNumber);
}

// Geometry at n elements per direction.
MultiPatch geometry_at(const GeometryArgs& g, int n)
{
    if (!g.builtin.empty())
        return builtin_geometry(g.builtin, SpaceConfig{g.p, g.r, n});
    MultiPatch mp = load_geometry(g.path);
    if ((g.p_opt->count() && g.p != mp.config.p) || (g.r_opt->count() && g.r != mp.config.r))
        throw InvalidConfig("degree and regularity are fixed by the geometry file");
    if (n == mp.config.n)
        return mp;
    if (n % mp.config.n != 0)
        throw InvalidConfig("n = " + std::to_string(n) + " is not a multiple of the file's n = " +
                            std::to_string(mp.config.n));
    return refine(mp, n / mp.config.n);
}

MultiPatch geometry_of(const GeometryArgs& g)
{
    if (g.builtin.empty() && !g.n_opt->count())
        return geometry_at(g, load_geometry(g.path).config.n);
    return geometry_at(g, g.n);
}

void apply_threads(const GeometryArgs& g)
{
    if (g.threads > 0)
        omp_set_num_threads(g.threads);
}

std::string header(const GeometryArgs& g, const MultiPatch& mp)
{
    std::ostringstream os;
    os << "geometry " << g.label() << " p=" << mp.config.p << " r=" << mp.config.r
       << " n=" << mp.config.n;
    return os.str();
}

const std::map<std::string, ScalarField>& target_functions()
{
    static const std::map<std::string, ScalarField> f{
        {"cos-sin", [](const Vec2& x) { return 2.0 * std::cos(x.x()) * std::sin(x.y()); }},
        {"one", [](const Vec2&) { return 1.0; }},
        {"x1", [](const Vec2& x) { return x.x(); }},
        {"x2", [](const Vec2& x) { return x.y(); }},
        {"exp", [](const Vec2& x) { return std::exp(x.x() - 0.5 * x.y()); }},
    };
    return f;
}

std::vector<std::string> target_names()
{
    std::vector<std::string> out;
    for (const auto& kv : target_functions())
        out.push_back(kv.first);
    return out;
}

struct FitArgs {
    std::string function = "cos-sin";
    int quad = 0;
    int dense_limit = 4000;
    bool serial = false;
};

void add_fit_options(CLI::App* app, FitArgs& f)
{
    app->add_option("--function", f.function, "target function")
        ->check(CLI::IsMember(target_names()));
    app->add_option("--quad", f.quad, "Gauss points per direction (0 selects p+2)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--dense-limit", f.dense_limit, "largest dimension solved densely")
        ->check(CLI::NonNegativeNumber);
    app->add_flag("--serial", f.serial, "use the serial assembly kernels");
}

FitOptions fit_options(const FitArgs& f)
{
    FitOptions o;
    o.quad_order = f.quad;
    o.dense_limit = f.dense_limit;
    o.parallel = !f.serial;
    return o;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw InvalidConfig("cannot write " + path);
    return out;
}

// geom check

int run_geom_check(const GeometryArgs& g, int samples_per_element)
{
    MultiPatch mp = geometry_of(g);
    std::cout << header(g, mp) << "\n";
    std::cout << "patches " << mp.patches.size() << "\n";
    std::cout << "edges " << mp.edges.size() << " (interfaces " << mp.num_interfaces()
              << ", boundary " << mp.num_boundary_edges() << ")\n";
    std::cout << "vertices " << mp.vertices.size() << " (interior " << mp.num_interior_vertices()
              << ", boundary " << mp.vertices.size() - mp.num_interior_vertices() << ")\n";
    const int m = samples_per_element * mp.config.n + 1;
    bool regular = true;
    for (std::size_t k = 0; k < mp.patches.size(); ++k) {
        const double d = check_regularity(mp.patches[k], m);
        regular = regular && d > 0.0;
        std::cout << "patch " << k << " min det " << e3(d) << "\n";
    }
    const double gap = mp.max_interface_gap();
    std::cout << "max interface gap " << e3(gap) << "\n";
    try {
        mp.validate(samples_per_element);
    } catch (const Error& e) {
        std::cout << "status INVALID: " << e.what() << "\n";
        return 1;
    }
    std::cout << "status OK\n";
    return regular ? 0 : 1;
}

int run_geom_export(const GeometryArgs& g, const std::string& output)
{
    const MultiPatch mp = geometry_of(g);
    if (output == "-")
        std::cout << format_geometry(mp);
    else
        save_geometry(mp, output);
    return 0;
}

// gluing

int run_gluing(const GeometryArgs& g, double tol)
{
    MultiPatch mp = geometry_of(g);
    std::cout << header(g, mp) << "\n";
    int accepted = 0, rejected = 0;
    for (const EdgeRecord& e : mp.edges) {
        if (e.kind != EdgeKind::Interface)
            continue;
        const auto s = standard_form_edge(mp, e);
        const GluingData d = fit_gluing(s[0], s[1], tol);
        (d.asg1 ? accepted : rejected)++;
        std::cout << "interface " << e.id << " (patch " << e.locals[0].patch << " side "
                  << e.locals[0].kappa << ", patch " << e.locals[1].patch << " side "
                  << e.locals[1].kappa << "): " << (d.asg1 ? "AS-G1" : "NOT AS-G1")
                  << " residual " << e3(d.residual) << "\n";
        auto line = [](const char* name, const Linear& l) {
            std::cout << "  " << name << " " << g17(l.c0) << " " << g17(l.c1) << "\n";
        };
        line("alpha1", d.alpha1);
        line("alpha2", d.alpha2);
        line("beta1 ", d.beta1);
        line("beta2 ", d.beta2);
    }
    std::cout << "summary " << accepted << " AS-G1, " << rejected << " NOT AS-G1\n";
    return 0;
}

// space dim / space audit

int run_space_dim(const GeometryArgs& g, bool build)
{
    MultiPatch mp = geometry_of(g);
    mp.config.require_argyris();
    const DimensionBreakdown d = dimension_of(mp);
    std::cout << header(g, mp) << "\n";
    std::cout << "dim " << d.total() << " (patch " << d.patch << ", edge " << d.edge << ", vertex "
              << d.vertex << ")\n";
    if (build) {
        ArgyrisSpace A(mp);
        std::cout << "enumerated " << A.dim() << "\n";
    }
    return 0;
}

int run_space_audit(const GeometryArgs& g, double tol, int samples)
{
    apply_threads(g);
    ArgyrisSpace A(geometry_of(g), tol);
    Duality D(A);
    std::cout << header(g, A.geometry()) << "\n";
    std::cout << "dim " << A.dim() << "\n";

    const Eigen::MatrixXd B = D.biorthogonality_matrix();
    const double bio = (B - Eigen::MatrixXd::Identity(A.dim(), A.dim())).cwiseAbs().maxCoeff();

    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::VectorXd c(A.dim());
    for (int a = 0; a < A.dim(); ++a)
        c[a] = U(rng);
    const double rep = (D.project(space_field(A, c)) - c).cwiseAbs().maxCoeff();

    const SmoothnessReport s = basis_smoothness(A, samples);

    const bool ok_bio = bio < 1e-9, ok_rep = rep < 1e-9, ok_c1 = s.max_c1 < 1e-9,
               ok_c2 = s.max_c2 < 1e-8;
    auto row = [](const char* name, double v, const char* bound, bool ok) {
        std::cout << name << " " << e3(v) << " (< " << bound << ") " << (ok ? "ok" : "FAIL") << "\n";
    };
    row("biorthogonality |M - I|_max", bio, "1e-9", ok_bio);
    row("projector reproduction", rep, "1e-9", ok_rep);
    row("basis C1 interface jump", s.max_c1, "1e-9", ok_c1);
    row("basis C2 vertex jump", s.max_c2, "1e-8", ok_c2);
    const bool ok = ok_bio && ok_rep && ok_c1 && ok_c2;
    std::cout << "status " << (ok ? "OK" : "FAIL") << "\n";
    return ok ? 0 : 2;
}

// fit

void write_coefficients(const ArgyrisSpace& A, const Eigen::VectorXd& c, const std::string& path)
{
    std::ofstream out = open_output(path);
    out << "index,kind,owner,j1,j2,coefficient\n";
    for (int a = 0; a < A.dim(); ++a) {
        const BasisId& id = A.function(a).id;
        out << a << "," << to_string(id.kind) << "," << id.owner << "," << id.j1 << "," << id.j2
            << "," << g17(c[a]) << "\n";
    }
}

int run_fit(const GeometryArgs& g, const FitArgs& f, double tol, const std::string& coeffs,
            bool timings)
{
    apply_threads(g);
    ArgyrisSpace A(geometry_of(g), tol);
    const FitResult r = l2_fit(A, target_functions().at(f.function), fit_options(f));
    std::cout << header(g, A.geometry()) << "\n";
    std::cout << "function " << f.function << "\n";
    std::cout << "dim " << r.dim << "\n";
    std::cout << "solver " << r.solve.method << " residual " << e3(r.solve.residual) << "\n";
    std::cout << "rel. L2 error " << e3(r.rel_error) << "\n";
    std::cout << "abs. L2 error " << e3(r.abs_error) << "\n";
    if (timings)
        std::cerr << "assembly " << fmt("%.3f", r.assembly_seconds) << " s, solve "
                  << fmt("%.3f", r.solve_seconds) << " s\n";
    if (!coeffs.empty())
        write_coefficients(A, r.coeffs, coeffs);
    return 0;
}

// converge

int run_converge(const GeometryArgs& g, const FitArgs& f, int levels, const std::string& csv)
{
    apply_threads(g);
    const int n0 = g.builtin.empty() && !g.n_opt->count() ? load_geometry(g.path).config.n : g.n;
    std::vector<int> ns;
    for (int l = 0, n = n0; l < levels; ++l, n *= 2)
        ns.push_back(n);
    const ConvergenceTable t = convergence_study([&g](int n) { return geometry_at(g, n); },
                                                 target_functions().at(f.function), ns,
                                                 fit_options(f));
    std::cout << "geometry " << g.label() << " function " << f.function << "\n";
    std::cout << t.text();
    if (!csv.empty()) {
        std::ofstream out = open_output(csv);
        out << t.csv();
    }
    return 0;
}

// sample

int run_sample(const GeometryArgs& g, const FitArgs& f, int basis, bool fit, int grid,
               bool derivatives, const std::string& output, double tol)
{
    apply_threads(g);
    ArgyrisSpace A(geometry_of(g), tol);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(A.dim());
    if (fit) {
        c = l2_fit(A, target_functions().at(f.function), fit_options(f)).coeffs;
    } else {
        if (basis < 0 || basis >= A.dim())
            throw InvalidConfig("basis index " + std::to_string(basis) + " outside [0, " +
                                std::to_string(A.dim()) + ")");
        c[basis] = 1.0;
    }
    std::ofstream file;
    if (output != "-")
        file = open_output(output);
    std::ostream& out = output == "-" ? std::cout : file;
    out << "patch,xi1,xi2,x1,x2,value";
    if (derivatives)
        out << ",dx1,dx2";
    out << "\n";
    const MultiPatch& mp = A.geometry();
    for (int k = 0; k < static_cast<int>(mp.patches.size()); ++k)
        for (int b = 0; b < grid; ++b)
            for (int a = 0; a < grid; ++a) {
                const double u = double(a) / (grid - 1), v = double(b) / (grid - 1);
                const Vec2 x = mp.patches[k](u, v);
                const C2Data d = A.evaluate_physical(c, k, u, v);
                out << k << "," << g17(u) << "," << g17(v) << "," << g17(x.x()) << ","
                    << g17(x.y()) << "," << g17(d.value);
                if (derivatives)
                    out << "," << g17(d.grad.x()) << "," << g17(d.grad.y());
                out << "\n";
            }
    return 0;
}

int exit_code(const std::exception& e)
{
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const InternalConsistency*>(&e) ||
        dynamic_cast<const NotInSpace*>(&e))
        return 2;
    if (dynamic_cast<const Error*>(&e))
        return 1;
    return 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Argyris isogeometric spaces on AS-G1 multi-patch domains"};
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);

    double tol = 1e-9;
    auto add_tol = [&tol](CLI::App* s) {
        s->add_option("--tol", tol, "relative AS-G1 tolerance")->check(CLI::PositiveNumber);
    };

    std::deque<GeometryArgs> geos;
    auto geometry_options = [&geos](CLI::App* s) -> GeometryArgs& {
        GeometryArgs& g = geos.emplace_back();
        add_geometry_options(s, g);
        return g;
    };
    FitArgs fa;

    auto* geom = app.add_subcommand("geom", "geometry diagnostics");
    geom->require_subcommand(1);
    auto* geom_check = geom->add_subcommand("check", "regularity and conformity report");
    GeometryArgs& geo_geom_check = geometry_options(geom_check);
    int samples_per_element = 20;
    geom_check->add_option("--samples", samples_per_element, "regularity samples per element")
        ->check(CLI::PositiveNumber);

    auto* geom_export = geom->add_subcommand("export", "write the geometry file");
    GeometryArgs& geo_geom_export = geometry_options(geom_export);
    std::string export_path = "-";
    geom_export->add_option("-o,--output", export_path, "output file, - for stdout");

    auto* gluing = app.add_subcommand("gluing", "per-interface AS-G1 verdicts");
    GeometryArgs& geo_gluing = geometry_options(gluing);
    add_tol(gluing);

    auto* space = app.add_subcommand("space", "Argyris space construction");
    space->require_subcommand(1);
    auto* space_dim = space->add_subcommand("dim", "dimension breakdown");
    GeometryArgs& geo_space_dim = geometry_options(space_dim);
    bool build = false;
    space_dim->add_flag("--build", build, "also enumerate the basis");
    auto* space_audit = space->add_subcommand("audit", "biorthogonality and smoothness suite");
    GeometryArgs& geo_space_audit = geometry_options(space_audit);
    add_tol(space_audit);
    int samples = 200;
    space_audit->add_option("--samples", samples, "samples per interface")
        ->check(CLI::Range(2, 100000));

    auto* fit = app.add_subcommand("fit", "single L2 fit");
    GeometryArgs& geo_fit = geometry_options(fit);
    add_fit_options(fit, fa);
    add_tol(fit);
    std::string coeffs;
    bool timings = false;
    fit->add_option("--coeffs", coeffs, "write coefficients as CSV");
    fit->add_flag("--timings", timings, "report timings on stderr");

    auto* converge = app.add_subcommand("converge", "multi-level convergence table");
    GeometryArgs& geo_converge = geometry_options(converge);
    add_fit_options(converge, fa);
    int levels = 4;
    std::string csv;
    converge->add_option("--levels", levels, "number of dyadic levels starting at --n")
        ->check(CLI::Range(1, 8));
    converge->add_option("--csv", csv, "write the table as CSV");

    auto* sample = app.add_subcommand("sample", "CSV samples of a basis function or a fit");
    GeometryArgs& geo_sample = geometry_options(sample);
    add_fit_options(sample, fa);
    add_tol(sample);
    int basis = -1;
    int grid = 21;
    bool derivatives = false;
    std::string output = "-";
    auto* basis_opt = sample->add_option("--basis", basis, "basis function index");
    auto* fit_flag = sample->add_flag("--fit", "sample the L2 fit of --function");
    basis_opt->excludes(fit_flag);
    sample->add_option("--grid", grid, "samples per direction and patch")
        ->check(CLI::Range(2, 100000));
    sample->add_flag("--derivatives", derivatives, "add physical gradient columns");
    sample->add_option("-o,--output", output, "output file, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*geom_check)
            return run_geom_check(geo_geom_check, samples_per_element);
        if (*geom_export)
            return run_geom_export(geo_geom_export, export_path);
        if (*gluing)
            return run_gluing(geo_gluing, tol);
        if (*space_dim)
            return run_space_dim(geo_space_dim, build);
        if (*space_audit)
            return run_space_audit(geo_space_audit, tol, samples);
        if (*fit)
            return run_fit(geo_fit, fa, tol, coeffs, timings);
        if (*converge)
            return run_converge(geo_converge, fa, levels, csv);
        if (*sample) {
            if (!basis_opt->count() && !fit_flag->count()) {
                std::cerr << "error: sample needs --basis or --fit\n" << sample->help();
                return 1;
            }
            return run_sample(geo_sample, fa, basis, fit_flag->count() > 0, grid, derivatives, output,
                              tol);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    }
    return 1;
}
