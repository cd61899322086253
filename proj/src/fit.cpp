#include "argyris/fit.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <gsl/gsl_integration.h>

#include "argyris/errors.hpp"

namespace argyris {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Univariate basis values and first derivatives at the quadrature points of every element.
struct Tabulation {
    int p = 0, n = 0, N = 0, g = 0, m = 0;
    double h = 0.0;
    std::vector<Eigen::MatrixXd> v0, v1;  // per element: g x (p+1)
    std::vector<double> w;                 // g weights scaled to an element

    Tabulation(const UnivariateSpace& sp, const QuadratureRule& q)
        : p(sp.degree()), n(sp.elements()), N(sp.dim()), g(q.g), m(sp.multiplicity()), h(sp.h())
    {
        for (int e = 0; e < n; ++e) {
            Eigen::MatrixXd a(g, p + 1), b(g, p + 1);
            for (int k = 0; k < g; ++k) {
                const BasisValues bv = sp.eval_in(e, sp.breakpoint(e) + h * q.x[k], 1);
                a.row(k) = bv.d.row(0);
                b.row(k) = bv.d.row(1);
            }
            v0.push_back(a);
            v1.push_back(b);
        }
        for (int k = 0; k < g; ++k)
            w.push_back(h * q.w[k]);
    }
    int first(int e) const { return e * m; }
};

// Quadrature data of one element: tensor basis values, weights times |det| and physical points.
struct ElementQuad {
    Eigen::MatrixXd B;  // Q x (p+1)^2, local index i + (p+1) j
    Eigen::VectorXd W;
    std::vector<Vec2> x;
    int f1 = 0, f2 = 0;
};

ElementQuad element_quad(const Patch& P, const Tabulation& t, int e1, int e2)
{
    const int p1 = t.p + 1, g = t.g;
    ElementQuad eq;
    eq.f1 = t.first(e1);
    eq.f2 = t.first(e2);
    eq.B.resize(g * g, p1 * p1);
    eq.W.resize(g * g);
    eq.x.resize(g * g);
    const auto& a0 = t.v0[e1];
    const auto& a1 = t.v1[e1];
    const auto& b0 = t.v0[e2];
    const auto& b1 = t.v1[e2];
    for (int qb = 0; qb < g; ++qb)
        for (int qa = 0; qa < g; ++qa) {
            const int q = qa + g * qb;
            Vec2 x = Vec2::Zero(), d1 = Vec2::Zero(), d2 = Vec2::Zero();
            for (int j = 0; j < p1; ++j)
                for (int i = 0; i < p1; ++i) {
                    const Vec2 c = P.ctrl(eq.f1 + i, eq.f2 + j);
                    const double v = a0(qa, i) * b0(qb, j);
                    eq.B(q, i + p1 * j) = v;
                    x += v * c;
                    d1 += a1(qa, i) * b0(qb, j) * c;
                    d2 += a0(qa, i) * b1(qb, j) * c;
                }
            eq.W[q] = t.w[qa] * t.w[qb] * std::abs(d1.x() * d2.y() - d1.y() * d2.x());
            eq.x[q] = x;
        }
    return eq;
}

Eigen::MatrixXd element_mass(const ElementQuad& eq)
{
    const Eigen::MatrixXd m = eq.B.transpose() * eq.W.asDiagonal() * eq.B;
    return 0.5 * (m + m.transpose());
}

Eigen::VectorXd element_load(const ElementQuad& eq, const ScalarField& z)
{
    Eigen::VectorXd zw(eq.W.size());
    for (int q = 0; q < eq.W.size(); ++q)
        zw[q] = eq.W[q] * z(eq.x[q]);
    return eq.B.transpose() * zw;
}

L2Parts element_l2(const ElementQuad& eq, const Eigen::MatrixXd& u, const ScalarField& z, int p1)
{
    Eigen::VectorXd loc(p1 * p1);
    for (int j = 0; j < p1; ++j)
        for (int i = 0; i < p1; ++i)
            loc[i + p1 * j] = u(eq.f1 + i, eq.f2 + j);
    const Eigen::VectorXd uq = eq.B * loc;
    L2Parts r;
    for (int q = 0; q < eq.W.size(); ++q) {
        const double zq = z(eq.x[q]);
        r.error2 += eq.W[q] * (uq[q] - zq) * (uq[q] - zq);
        r.norm2 += eq.W[q] * zq * zq;
    }
    return r;
}

void scatter_mass(std::vector<Eigen::Triplet<double>>& trip, const ElementQuad& eq,
                  const Eigen::MatrixXd& m, int N, int p1)
{
    for (int b = 0; b < p1 * p1; ++b)
        for (int a = 0; a < p1 * p1; ++a) {
            const int ga = (eq.f1 + a % p1) + N * (eq.f2 + a / p1);
            const int gb = (eq.f1 + b % p1) + N * (eq.f2 + b / p1);
            trip.emplace_back(ga, gb, m(a, b));
        }
}

void scatter_load(Eigen::VectorXd& f, const ElementQuad& eq, const Eigen::VectorXd& v, int N, int p1)
{
    for (int a = 0; a < p1 * p1; ++a)
        f[(eq.f1 + a % p1) + N * (eq.f2 + a / p1)] += v[a];
}

Tabulation make_tab(const Patch& P, const QuadratureRule& q) { return Tabulation(P.space, q); }

C2Data grid_jet(const MultiPatch& mp, const std::vector<Eigen::MatrixXd>& grids, int k, double u,
                double v)
{
    if (grids[k].size() == 0)
        return C2Data{};
    return physical_jet(mp.patches[k].jet(u, v), eval_tensor(mp.patches[k].space, grids[k], u, v));
}

SmoothnessReport smoothness_impl(const MultiPatch& mp, const std::vector<Eigen::MatrixXd>& grids,
                                 int samples)
{
    SmoothnessReport r;
    r.interface_jump.assign(mp.edges.size(), 0.0);
    r.vertex_jump.assign(mp.vertices.size(), 0.0);
    for (const EdgeRecord& e : mp.edges) {
        if (e.kind != EdgeKind::Interface)
            continue;
        const LocalIndex l1 = e.locals[0], l2 = e.locals[1];
        if (grids[l1.patch].size() == 0 && grids[l2.patch].size() == 0)
            continue;
        double jump = 0.0, scale = 0.0;
        for (int s = 0; s < samples; ++s) {
            const double xi = samples > 1 ? double(s) / (samples - 1) : 0.5;
            const Vec2 u = rotate_parameter(Vec2(0.0, xi), l1.kappa);
            const Vec2 v = rotate_parameter(Vec2(xi, 0.0), l2.kappa - 1);
            const C2Data a = grid_jet(mp, grids, l1.patch, u.x(), u.y());
            const C2Data b = grid_jet(mp, grids, l2.patch, v.x(), v.y());
            jump = std::max({jump, std::abs(a.value - b.value), (a.grad - b.grad).norm()});
            scale = std::max({scale, std::abs(a.value), std::abs(b.value), a.grad.norm(),
                              b.grad.norm()});
        }
        r.interface_jump[e.id] = scale > 0.0 ? jump / scale : 0.0;
        r.max_c1 = std::max(r.max_c1, r.interface_jump[e.id]);
    }
    for (const VertexRecord& v : mp.vertices) {
        bool any = false;
        for (const LocalIndex& l : v.patches)
            any = any || grids[l.patch].size() != 0;
        if (!any)
            continue;
        std::vector<C2Data> d;
        double scale = 0.0;
        for (const LocalIndex& l : v.patches) {
            const Vec2 c = corner_parameter(l.kappa);
            d.push_back(grid_jet(mp, grids, l.patch, c.x(), c.y()));
            scale = std::max({scale, std::abs(d.back().value), d.back().grad.norm(),
                              d.back().hess.cwiseAbs().maxCoeff()});
        }
        double jump = 0.0;
        for (std::size_t i = 1; i < d.size(); ++i)
            jump = std::max({jump, std::abs(d[i].value - d[0].value),
                             (d[i].grad - d[0].grad).cwiseAbs().maxCoeff(),
                             (d[i].hess - d[0].hess).cwiseAbs().maxCoeff()});
        r.vertex_jump[v.id] = scale > 0.0 ? jump / scale : 0.0;
        r.max_c2 = std::max(r.max_c2, r.vertex_jump[v.id]);
    }
    return r;
}

} // namespace

QuadratureRule QuadratureRule::gauss(int g)
{
    if (g < 1)
        throw InvalidConfig("quadrature order must be >= 1");
    QuadratureRule r;
    r.g = g;
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(g);
    if (!t)
        throw NumericalError("cannot allocate Gauss-Legendre table", 0.0);
    for (int i = 0; i < g; ++i) {
        double x = 0, w = 0;
        gsl_integration_glfixed_point(0.0, 1.0, i, &x, &w, t);
        r.x.push_back(x);
        r.w.push_back(w);
    }
    gsl_integration_glfixed_table_free(t);
    return r;
}

int default_quadrature_order(const UnivariateSpace& space) { return space.degree() + 2; }

Eigen::SparseMatrix<double> patch_mass_serial(const Patch& P, const QuadratureRule& q)
{
    const Tabulation t = make_tab(P, q);
    const int p1 = t.p + 1;
    std::vector<Eigen::Triplet<double>> trip;
    for (int e2 = 0; e2 < t.n; ++e2)
        for (int e1 = 0; e1 < t.n; ++e1) {
            const ElementQuad eq = element_quad(P, t, e1, e2);
            scatter_mass(trip, eq, element_mass(eq), t.N, p1);
        }
    Eigen::SparseMatrix<double> M(t.N * t.N, t.N * t.N);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

Eigen::SparseMatrix<double> patch_mass(const Patch& P, const QuadratureRule& q)
{
    const Tabulation t = make_tab(P, q);
    const int p1 = t.p + 1;
    const int nel = t.n * t.n;
    std::vector<ElementQuad> quads(nel);
    std::vector<Eigen::MatrixXd> local(nel);
#pragma omp parallel for schedule(static)
    for (int e = 0; e < nel; ++e) {
        quads[e] = element_quad(P, t, e % t.n, e / t.n);
        local[e] = element_mass(quads[e]);
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nel) * p1 * p1 * p1 * p1);
    for (int e = 0; e < nel; ++e)
        scatter_mass(trip, quads[e], local[e], t.N, p1);
    Eigen::SparseMatrix<double> M(t.N * t.N, t.N * t.N);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

Eigen::VectorXd patch_load_serial(const Patch& P, const ScalarField& z, const QuadratureRule& q)
{
    const Tabulation t = make_tab(P, q);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(t.N * t.N);
    for (int e2 = 0; e2 < t.n; ++e2)
        for (int e1 = 0; e1 < t.n; ++e1) {
            const ElementQuad eq = element_quad(P, t, e1, e2);
            scatter_load(f, eq, element_load(eq, z), t.N, t.p + 1);
        }
    return f;
}

Eigen::VectorXd patch_load(const Patch& P, const ScalarField& z, const QuadratureRule& q)
{
    const Tabulation t = make_tab(P, q);
    const int nel = t.n * t.n;
    std::vector<ElementQuad> quads(nel);
    std::vector<Eigen::VectorXd> local(nel);
#pragma omp parallel for schedule(static)
    for (int e = 0; e < nel; ++e) {
        quads[e] = element_quad(P, t, e % t.n, e / t.n);
        local[e] = element_load(quads[e], z);
    }
    Eigen::VectorXd f = Eigen::VectorXd::Zero(t.N * t.N);
    for (int e = 0; e < nel; ++e)
        scatter_load(f, quads[e], local[e], t.N, t.p + 1);
    return f;
}

L2Parts patch_l2_serial(const Patch& P, const Eigen::MatrixXd& u, const ScalarField& z,
                        const QuadratureRule& q)
{
    const Tabulation t = make_tab(P, q);
    L2Parts r;
    for (int e2 = 0; e2 < t.n; ++e2)
        for (int e1 = 0; e1 < t.n; ++e1) {
            const L2Parts s = element_l2(element_quad(P, t, e1, e2), u, z, t.p + 1);
            r.error2 += s.error2;
            r.norm2 += s.norm2;
        }
    return r;
}

L2Parts patch_l2(const Patch& P, const Eigen::MatrixXd& u, const ScalarField& z,
                 const QuadratureRule& q)
{
    const Tabulation t = make_tab(P, q);
    const int nel = t.n * t.n;
    std::vector<L2Parts> part(nel);
#pragma omp parallel for schedule(static)
    for (int e = 0; e < nel; ++e)
        part[e] = element_l2(element_quad(P, t, e % t.n, e / t.n), u, z, t.p + 1);
    L2Parts r;
    for (const L2Parts& s : part) {
        r.error2 += s.error2;
        r.norm2 += s.norm2;
    }
    return r;
}

Eigen::SparseMatrix<double> assemble_mass(const ArgyrisSpace& space, const QuadratureRule& q,
                                          bool parallel)
{
    const MultiPatch& mp = space.geometry();
    Eigen::SparseMatrix<double> M(space.dim(), space.dim());
    for (int k = 0; k < static_cast<int>(mp.patches.size()); ++k) {
        const Eigen::SparseMatrix<double> Mk =
            parallel ? patch_mass(mp.patches[k], q) : patch_mass_serial(mp.patches[k], q);
        const Eigen::SparseMatrix<double>& E = space.extraction(k);
        const Eigen::SparseMatrix<double> EM = E * Mk;
        M += Eigen::SparseMatrix<double>(EM * E.transpose());
    }
    // exact symmetry: keep the upper triangle
    Eigen::SparseMatrix<double> U = M.triangularView<Eigen::Upper>();
    Eigen::SparseMatrix<double> S = U.selfadjointView<Eigen::Upper>();
    return S;
}

Eigen::VectorXd assemble_load(const ArgyrisSpace& space, const ScalarField& z,
                              const QuadratureRule& q, bool parallel)
{
    const MultiPatch& mp = space.geometry();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(space.dim());
    for (int k = 0; k < static_cast<int>(mp.patches.size()); ++k) {
        const Eigen::VectorXd fk =
            parallel ? patch_load(mp.patches[k], z, q) : patch_load_serial(mp.patches[k], z, q);
        f += space.extraction(k) * fk;
    }
    return f;
}

L2Error l2_error(const ArgyrisSpace& space, const Eigen::VectorXd& c, const ScalarField& z,
                 const QuadratureRule& q, bool parallel)
{
    const MultiPatch& mp = space.geometry();
    double e2 = 0.0, n2 = 0.0;
    for (int k = 0; k < static_cast<int>(mp.patches.size()); ++k) {
        const Eigen::MatrixXd u = space.patch_coefficients(c, k);
        const L2Parts s = parallel ? patch_l2(mp.patches[k], u, z, q)
                                   : patch_l2_serial(mp.patches[k], u, z, q);
        e2 += s.error2;
        n2 += s.norm2;
    }
    L2Error r;
    r.absolute = std::sqrt(e2);
    r.norm = std::sqrt(n2);
    r.relative = r.norm > 0.0 ? r.absolute / r.norm : r.absolute;
    return r;
}

Eigen::VectorXd solve_scaled(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& f,
                             SolveReport& report, int dense_limit, double cg_tol)
{
    const int n = static_cast<int>(M.rows());
    if (M.cols() != n || f.size() != n)
        throw DimensionMismatch("mass matrix and load vector sizes differ");
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) {
        const double d = M.coeff(i, i);
        if (!(d > 0.0))
            throw NumericalError("mass matrix has a non-positive diagonal entry", 0.0);
        s[i] = 1.0 / std::sqrt(d);
    }
    const Eigen::SparseMatrix<double> A = s.asDiagonal() * M * s.asDiagonal();
    const Eigen::VectorXd b = s.cwiseProduct(f);
    const double fnorm = f.norm();
    auto residual = [&](const Eigen::VectorXd& c) {
        return fnorm > 0.0 ? (M * c - f).norm() / fnorm : (M * c).norm();
    };

    Eigen::VectorXd y;
    double cond = 0.0;
    bool ok = false;
    if (n <= dense_limit) {
        const Eigen::MatrixXd Ad(A);
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(Ad);
        cond = ldlt.rcond() > 0.0 ? 1.0 / ldlt.rcond() : std::numeric_limits<double>::infinity();
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() && cond < 1e15) {
            y = ldlt.solve(b);
            report.method = "dense-ldlt";
            ok = true;
        }
    } else {
        const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
        if (llt.info() == Eigen::Success) {
            y = llt.solve(b);
            report.method = "sparse-llt";
            ok = true;
        }
    }
    if (ok) {
        const Eigen::VectorXd c = s.cwiseProduct(y);
        report.residual = residual(c);
        if (report.residual < 1e-8)
            return c;
    }

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(A);
    cg.setTolerance(cg_tol);
    cg.setMaxIterations(20 * n);
    y = cg.solve(b);
    report.method = "cg";
    report.iterations = static_cast<int>(cg.iterations());
    const Eigen::VectorXd c = s.cwiseProduct(y);
    report.residual = residual(c);
    if (cg.info() != Eigen::Success && report.residual > 1e-8) {
        std::ostringstream os;
        os << "mass solve failed: residual " << report.residual << " after " << cg.iterations()
           << " CG iterations";
        throw NumericalError(os.str(), cond);
    }
    return c;
}

FitResult l2_fit(const ArgyrisSpace& space, const ScalarField& z, const FitOptions& opt)
{
    const QuadratureRule q = QuadratureRule::gauss(
        opt.quad_order > 0 ? opt.quad_order : default_quadrature_order(space.space()));
    FitResult r;
    r.h = space.space().h();
    r.dim = space.dim();
    auto t0 = std::chrono::steady_clock::now();
    const Eigen::SparseMatrix<double> M = assemble_mass(space, q, opt.parallel);
    const Eigen::VectorXd f = assemble_load(space, z, q, opt.parallel);
    r.assembly_seconds = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    r.coeffs = solve_scaled(M, f, r.solve, opt.dense_limit, opt.cg_tol);
    r.solve_seconds = seconds_since(t0);
    const L2Error e = l2_error(
        space, r.coeffs, z,
        QuadratureRule::gauss(opt.error_order > 0 ? opt.error_order : q.g + 3), opt.parallel);
    r.abs_error = e.absolute;
    r.rel_error = e.relative;
    r.rel_error_assembly_rule = l2_error(space, r.coeffs, z, q, opt.parallel).relative;
    return r;
}

double ecr(double coarse_error, double fine_error) { return std::log2(coarse_error / fine_error); }

std::string ConvergenceTable::text() const
{
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%8s %8s %15s %8s\n", "h", "dim", "rel. L2 error", "e.c.r.");
    os << buf;
    for (const ConvergenceRow& r : rows) {
        const std::string h = "1/" + std::to_string(static_cast<long>(std::lround(1.0 / r.h)));
        char rate[32] = "-";
        if (r.rate)
            std::snprintf(rate, sizeof rate, "%.2f", *r.rate);
        std::snprintf(buf, sizeof buf, "%8s %8d %15.2e %8s\n", h.c_str(), r.dim, r.error, rate);
        os << buf;
    }
    if (in_space)
        os << "note: all errors below 1e-10; the data lie in the space and rates are not meaningful\n";
    return os.str();
}

std::string ConvergenceTable::csv() const
{
    std::ostringstream os;
    os << "h,dim,rel_l2_error,ecr\n";
    char buf[128];
    for (const ConvergenceRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,", r.h, r.dim, r.error);
        os << buf;
        if (r.rate) {
            std::snprintf(buf, sizeof buf, "%.17g", *r.rate);
            os << buf;
        } else {
            os << "-";
        }
        os << "\n";
    }
    return os.str();
}

ConvergenceTable convergence_study(const std::function<MultiPatch(int n)>& family,
                                   const ScalarField& z, const std::vector<int>& levels,
                                   const FitOptions& opt)
{
    ConvergenceTable t;
    for (int n : levels) {
        const ArgyrisSpace A(family(n));
        const FitResult fr = l2_fit(A, z, opt);
        ConvergenceRow row{fr.h, fr.dim, fr.rel_error, std::nullopt};
        if (!t.rows.empty())
            row.rate = ecr(t.rows.back().error, fr.rel_error);
        t.rows.push_back(row);
    }
    t.in_space = !t.rows.empty();
    for (const ConvergenceRow& r : t.rows)
        t.in_space = t.in_space && r.error < 1e-10;
    if (t.in_space)
        for (ConvergenceRow& r : t.rows)
            r.rate.reset();
    return t;
}

SmoothnessReport smoothness_report(const MultiPatch& mp, const std::vector<Eigen::MatrixXd>& grids,
                                   int samples_per_edge)
{
    if (grids.size() != mp.patches.size())
        throw DimensionMismatch("one coefficient grid per patch is required");
    return smoothness_impl(mp, grids, samples_per_edge);
}

SmoothnessReport smoothness_report(const ArgyrisSpace& space, const Eigen::VectorXd& c,
                                   int samples_per_edge)
{
    std::vector<Eigen::MatrixXd> grids;
    for (int k = 0; k < static_cast<int>(space.geometry().patches.size()); ++k)
        grids.push_back(space.patch_coefficients(c, k));
    return smoothness_impl(space.geometry(), grids, samples_per_edge);
}

SmoothnessReport basis_smoothness(const ArgyrisSpace& space, int samples_per_edge)
{
    const MultiPatch& mp = space.geometry();
    const int K = static_cast<int>(mp.patches.size());
    const int n = space.dim();
    std::vector<SmoothnessReport> per(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (int a = 0; a < n; ++a) {
        std::vector<Eigen::MatrixXd> grids(K);
        for (int k : space.function(a).patches())
            grids[k] = space.function(a).block(k, space.n_ctrl());
        per[a] = smoothness_impl(mp, grids, samples_per_edge);
    }
    SmoothnessReport r;
    r.interface_jump.assign(mp.edges.size(), 0.0);
    r.vertex_jump.assign(mp.vertices.size(), 0.0);
    for (const SmoothnessReport& s : per) {
        for (std::size_t e = 0; e < s.interface_jump.size(); ++e)
            r.interface_jump[e] = std::max(r.interface_jump[e], s.interface_jump[e]);
        for (std::size_t v = 0; v < s.vertex_jump.size(); ++v)
            r.vertex_jump[v] = std::max(r.vertex_jump[v], s.vertex_jump[v]);
        r.max_c1 = std::max(r.max_c1, s.max_c1);
        r.max_c2 = std::max(r.max_c2, s.max_c2);
    }
    return r;
}

} // namespace argyris
