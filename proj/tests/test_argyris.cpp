#include "doctest.h"

#include <cmath>
#include <random>

#include "argyris/argyris_space.hpp"
#include "argyris/errors.hpp"

using namespace argyris;

namespace {

const SpaceConfig kCfg{3, 1, 4};

const char* const kAsg1[] = {"two_patch_bilinear", "three_patch_bilinear", "five_patch_bilinear",
                             "lshape_bilinear", "two_patch_curved_asg1"};

Vec2 original_parameter(double xi1, double xi2, int kappa)
{
    return rotate_parameter(Vec2(xi1, xi2), kappa);
}

double rel(double a, double scale) { return std::abs(a) / std::max(1.0, scale); }

// Largest value/gradient mismatch of function a across an interface.
double interface_jump(const ArgyrisSpace& A, int a, const EdgeRecord& e, int samples)
{
    const LocalIndex l1 = e.locals[0], l2 = e.locals[1];
    const auto ps = A.function(a).patches();
    auto has = [&](int k) { return std::find(ps.begin(), ps.end(), k) != ps.end(); };
    if (!has(l1.patch) && !has(l2.patch))
        return 0.0;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double xi = double(s) / (samples - 1);
        const Vec2 u = original_parameter(0.0, xi, l1.kappa);
        const Vec2 v = original_parameter(xi, 0.0, l2.kappa - 1);
        const C2Data f = A.evaluate_basis(a, l1.patch, u.x(), u.y());
        const C2Data g = A.evaluate_basis(a, l2.patch, v.x(), v.y());
        const double scale = std::max(std::abs(f.value), f.grad.norm());
        worst = std::max({worst, rel(f.value - g.value, scale),
                          rel((f.grad - g.grad).norm(), scale)});
    }
    return worst;
}

// C2 data of function a at a vertex, seen from each incident patch.
std::vector<C2Data> vertex_data(const ArgyrisSpace& A, int a, const VertexRecord& v)
{
    std::vector<C2Data> out;
    for (const LocalIndex& l : v.patches) {
        const Vec2 c = corner_parameter(l.kappa);
        out.push_back(A.evaluate_basis(a, l.patch, c.x(), c.y()));
    }
    return out;
}

double c2_spread(const std::vector<C2Data>& d)
{
    double scale = 0.0, worst = 0.0;
    for (const C2Data& x : d)
        scale = std::max({scale, std::abs(x.value), x.grad.norm(), x.hess.norm()});
    for (std::size_t i = 1; i < d.size(); ++i)
        worst = std::max({worst, std::abs(d[i].value - d[0].value), (d[i].grad - d[0].grad).norm(),
                          (d[i].hess - d[0].hess).cwiseAbs().maxCoeff()});
    return worst / std::max(1.0, scale);
}

// Monomial slot value of C2 data: d^m phi for |m| <= 2.
double slot(const C2Data& d, int m1, int m2)
{
    if (m1 + m2 == 0)
        return d.value;
    if (m1 + m2 == 1)
        return m1 ? d.grad.x() : d.grad.y();
    if (m1 == 1)
        return d.hess(0, 1);
    return m1 == 2 ? d.hess(0, 0) : d.hess(1, 1);
}

constexpr int kSlots[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};

} // namespace

TEST_CASE("dimension table")
{
    const int expect3[] = {177, 729, 2985, 12105};
    const int expect5[] = {291, 1211, 4971, 20171};
    for (int k = 0; k < 4; ++k) {
        const int n = 4 << k;
        const SpaceConfig c{3, 1, n};
        CHECK(dimension_of(builtin_geometry("three_patch_bilinear", c)).total() == expect3[k]);
        CHECK(dimension_of(builtin_geometry("five_patch_bilinear", c)).total() == expect5[k]);
        CHECK(dimension_formula(c, 3, 9, 7).total() == expect3[k]);
        CHECK(dimension_formula(c, 5, 15, 11).total() == expect5[k]);
    }
    const DimensionBreakdown b = dimension_formula(kCfg, 3, 9, 7);
    CHECK(b.patch == 108);
    CHECK(b.edge == 27);
    CHECK(b.vertex == 42);
}

TEST_CASE("enumerated basis matches the dimension formula")
{
    for (int n : {4, 8}) {
        const SpaceConfig c{3, 1, n};
        ArgyrisSpace A3(builtin_geometry("three_patch_bilinear", c));
        CHECK(A3.dim() == dimension_of(A3.geometry()).total());
        ArgyrisSpace A5(builtin_geometry("five_patch_bilinear", c));
        CHECK(A5.dim() == dimension_of(A5.geometry()).total());
    }
    ArgyrisSpace A(builtin_geometry("three_patch_bilinear", kCfg));
    CHECK(A.dim() == 177);
    CHECK(A.breakdown().patch == 108);
    CHECK(A.breakdown().edge == 27);
    CHECK(A.breakdown().vertex == 42);
    // edge indices (3,0), (2,1), (3,1)
    CHECK(A.find({BasisKind::Edge, 0, 3, 0}) >= 0);
    CHECK(A.find({BasisKind::Edge, 0, 2, 1}) >= 0);
    CHECK(A.find({BasisKind::Edge, 0, 3, 1}) >= 0);
    CHECK(A.find({BasisKind::Edge, 0, 2, 0}) < 0);
    CHECK(A.find({BasisKind::Edge, 0, 4, 0}) < 0);
}

TEST_CASE("admissibility and AS-G1 are enforced")
{
    CHECK_THROWS_AS(ArgyrisSpace(builtin_geometry("two_patch_bilinear", SpaceConfig{3, 1, 2})),
                    InvalidConfig);
    CHECK_THROWS_AS(ArgyrisSpace(builtin_geometry("two_patch_generic_non_asg1", kCfg)), NotASG1);
}

TEST_CASE("support of each family")
{
    ArgyrisSpace A(builtin_geometry("three_patch_bilinear", kCfg));
    const MultiPatch& mp = A.geometry();
    for (const ArgyrisFunction& f : A.functions()) {
        const std::size_t np = f.patches().size();
        switch (f.id.kind) {
        case BasisKind::Patch:
            CHECK(np == 1);
            break;
        case BasisKind::Edge:
            CHECK(np == mp.edges[f.id.owner].locals.size());
            break;
        case BasisKind::Vertex:
            CHECK(np == mp.vertices[f.id.owner].patches.size());
            break;
        }
    }
}

TEST_CASE("patch-interior functions")
{
    ArgyrisSpace A(builtin_geometry("two_patch_bilinear", kCfg));
    const int N = A.n_ctrl();
    int checked = 0;
    for (int a = 0; a < A.dim(); ++a) {
        const ArgyrisFunction& f = A.function(a);
        if (f.id.kind != BasisKind::Patch)
            continue;
        REQUIRE(f.entries.size() == 1);
        CHECK(f.entries[0].value == 1.0);
        CHECK(f.entries[0].j1 >= 2);
        CHECK(f.entries[0].j1 <= N - 3);
        // value and gradient vanish on the patch boundary
        for (int s = 0; s < 100; ++s) {
            const double t = s / 99.0;
            for (const Vec2& u : {Vec2(t, 0), Vec2(t, 1), Vec2(0, t), Vec2(1, t)}) {
                const C2Data d = A.evaluate_basis(a, f.id.owner, u.x(), u.y());
                CHECK(std::abs(d.value) < 1e-13);
                CHECK(d.grad.norm() < 1e-13);
            }
        }
        // matches direct B-spline evaluation at a Greville point
        const UnivariateSpace& sp = A.space();
        const double g1 = sp.greville(f.id.j1), g2 = sp.greville(f.id.j2);
        Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(N, N);
        unit(f.id.j1, f.id.j2) = 1.0;
        CHECK(std::abs(A.evaluate_basis(a, f.id.owner, g1, g2).value -
                       eval_tensor(sp, unit, g1, g2).f) < 1e-15);
        if (++checked == 5)
            break;
    }
}

TEST_CASE("global C1 and vertex C2 on all AS-G1 built-ins")
{
    for (int n : {4, 8})
        for (const char* name : kAsg1) {
            CAPTURE(name);
            CAPTURE(n);
            ArgyrisSpace A(builtin_geometry(name, SpaceConfig{3, 1, n}));
            const MultiPatch& mp = A.geometry();
            double c1 = 0.0, c2 = 0.0;
            for (int a = 0; a < A.dim(); ++a) {
                if (A.function(a).id.kind == BasisKind::Patch)
                    continue;
                for (const EdgeRecord& e : mp.edges)
                    if (e.kind == EdgeKind::Interface)
                        c1 = std::max(c1, interface_jump(A, a, e, 200));
                for (const VertexRecord& v : mp.vertices)
                    c2 = std::max(c2, c2_spread(vertex_data(A, a, v)));
            }
            CHECK(c1 < 1e-9);
            CHECK(c2 < 1e-8);
        }
}

TEST_CASE("vertex functions have the scaled delta property")
{
    for (const char* name : kAsg1) {
        CAPTURE(name);
        ArgyrisSpace A(builtin_geometry(name, kCfg));
        const MultiPatch& mp = A.geometry();
        for (int a = 0; a < A.dim(); ++a) {
            const ArgyrisFunction& f = A.function(a);
            for (const VertexRecord& v : mp.vertices) {
                const double sg = A.sigma(v.id);
                for (const C2Data& d : vertex_data(A, a, v))
                    for (const auto& m : kSlots) {
                        const bool own = f.id.kind == BasisKind::Vertex && f.id.owner == v.id;
                        const double expect =
                            own && f.id.j1 == m[0] && f.id.j2 == m[1] ? 1.0 : 0.0;
                        CHECK(std::abs(slot(d, m[0], m[1]) / std::pow(sg, m[0] + m[1]) - expect) <
                              1e-9);
                    }
            }
        }
    }
}

TEST_CASE("sigma on a grid of unit squares")
{
    const SpaceConfig c{3, 1, 2};
    MultiPatch mp = bilinear_multipatch(
        c, {{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)},
            {Vec2(1, 0), Vec2(2, 0), Vec2(2, 1), Vec2(1, 1)},
            {Vec2(1, 1), Vec2(2, 1), Vec2(2, 2), Vec2(1, 2)},
            {Vec2(0, 1), Vec2(1, 1), Vec2(1, 2), Vec2(0, 2)}});
    for (const VertexRecord& v : mp.vertices) {
        const double s = vertex_scaling(standard_form_vertex(mp, v), mp.space());
        CHECK(std::abs(s - 3.0 * std::sqrt(2.0)) < 1e-12);
    }
}

TEST_CASE("edge functions reproduce their trace and transversal data")
{
    for (const char* name : {"three_patch_bilinear", "two_patch_curved_asg1"}) {
        CAPTURE(name);
        ArgyrisSpace A(builtin_geometry(name, SpaceConfig{3, 1, 8}));
        const MultiPatch& mp = A.geometry();
        const double hp = A.space().h() / A.space().degree();
        for (int a = 0; a < A.dim(); ++a) {
            const ArgyrisFunction& f = A.function(a);
            if (f.id.kind != BasisKind::Edge)
                continue;
            const EdgeRecord& e = mp.edges[f.id.owner];
            const Patch& F1 = A.edge_patches(e.id)[0];
            const GluingData& g = A.gluing(e.id);
            Eigen::VectorXd tp = Eigen::VectorXd::Zero(A.splus().dim());
            Eigen::VectorXd tm = Eigen::VectorXd::Zero(A.sminus().dim());
            (f.id.j2 == 0 ? tp : tm)[f.id.j1] = 1.0;
            const Spline T(A.splus(), tp), D(A.sminus(), tm);
            double worst = 0.0;
            for (int s = 0; s < 60; ++s) {
                const double xi = s / 59.0;
                const Vec2 u = original_parameter(0.0, xi, e.locals[0].kappa);
                const C2Data d = A.evaluate_basis(a, e.locals[0].patch, u.x(), u.y());
                const Vec2 tv = transversal_vector(g, F1, xi).d;
                worst = std::max({worst, std::abs(d.value - T(xi)),
                                  std::abs(hp * d.grad.dot(tv) - D(xi))});
            }
            CHECK(worst < 1e-10);
            // C2 data vanish at both endpoints
            for (double xi : {0.0, 1.0}) {
                const Vec2 u = original_parameter(0.0, xi, e.locals[0].kappa);
                const C2Data d = A.evaluate_basis(a, e.locals[0].patch, u.x(), u.y());
                CHECK(std::abs(d.value) < 1e-11);
                CHECK(d.grad.norm() < 1e-11);
                CHECK(d.hess.cwiseAbs().maxCoeff() < 1e-11 / (hp * hp));
            }
        }
    }
}

TEST_CASE("vertex projector")
{
    SUBCASE("annihilation is exact")
    {
        ArgyrisSpace A(builtin_geometry("five_patch_bilinear", kCfg));
        for (const VertexRecord& v : A.geometry().vertices) {
            const ArgyrisFunction f = A.vertex_projector(v.id, C2Data{});
            for (const CoefEntry& c : f.entries)
                CHECK(c.value == 0.0);
        }
    }
    SUBCASE("unit value on a 2x2 square grid")
    {
        MultiPatch mp = bilinear_multipatch(
            kCfg, {{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)},
                   {Vec2(1, 0), Vec2(2, 0), Vec2(2, 1), Vec2(1, 1)},
                   {Vec2(1, 1), Vec2(2, 1), Vec2(2, 2), Vec2(1, 2)},
                   {Vec2(0, 1), Vec2(1, 1), Vec2(1, 2), Vec2(0, 2)}});
        ArgyrisSpace A(mp);
        const VertexRecord* center = nullptr;
        for (const VertexRecord& v : A.geometry().vertices)
            if (v.kind == VertexKind::Interior)
                center = &v;
        REQUIRE(center != nullptr);
        C2Data one;
        one.value = 1.0;
        const ArgyrisFunction f = A.vertex_projector(center->id, one);
        const int N = A.n_ctrl();
        for (const LocalIndex& l : center->patches) {
            const Vec2 c = corner_parameter(l.kappa);
            const C2Data d = physical_jet(A.geometry().patches[l.patch].jet(c.x(), c.y()),
                                          eval_tensor(A.space(), f.block(l.patch, N), c.x(), c.y()));
            CHECK(std::abs(d.value - 1.0) < 1e-11);
            CHECK(d.grad.norm() < 1e-11);
            CHECK(d.hess.cwiseAbs().maxCoeff() < 1e-11);
        }
    }
    SUBCASE("random smooth data interpolated on every vertex")
    {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (const char* name : {"three_patch_bilinear", "five_patch_bilinear", "two_patch_curved_asg1"}) {
            CAPTURE(name);
            ArgyrisSpace A(builtin_geometry(name, kCfg));
            const MultiPatch& mp = A.geometry();
            const int N = A.n_ctrl();
            for (const VertexRecord& v : mp.vertices)
                for (int trial = 0; trial < 20; ++trial) {
                    C2Data phi;
                    phi.value = U(rng);
                    phi.grad = Vec2(U(rng), U(rng));
                    phi.hess(0, 0) = U(rng);
                    phi.hess(1, 1) = U(rng);
                    phi.hess(0, 1) = phi.hess(1, 0) = U(rng);
                    const ArgyrisFunction f = A.vertex_projector(v.id, phi);
                    for (const LocalIndex& l : v.patches) {
                        const Vec2 c = corner_parameter(l.kappa);
                        const PatchJet J = mp.patches[l.patch].jet(c.x(), c.y());
                        const TensorJet t = eval_tensor(A.space(), f.block(l.patch, N), c.x(), c.y());
                        const C2Data d = physical_jet(J, t);
                        CHECK(std::abs(d.value - phi.value) < 1e-9);
                        CHECK((d.grad - phi.grad).norm() < 1e-9);
                        CHECK((d.hess - phi.hess).cwiseAbs().maxCoeff() < 1e-9);
                        const TensorJet e = parametric_jet(J, phi);
                        CHECK(std::abs(t.f11 - e.f11) < 1e-9);
                        CHECK(std::abs(t.f12 - e.f12) < 1e-9);
                        CHECK(std::abs(t.f22 - e.f22) < 1e-9);
                    }
                }
        }
    }
    SUBCASE("mixed second derivative at a valence-3 vertex")
    {
        ArgyrisSpace A(builtin_geometry("three_patch_bilinear", kCfg));
        const MultiPatch& mp = A.geometry();
        for (const VertexRecord& v : mp.vertices) {
            if (v.kind != VertexKind::Interior)
                continue;
            C2Data phi;
            phi.hess(0, 1) = phi.hess(1, 0) = 1.0;
            const ArgyrisFunction f = A.vertex_projector(v.id, phi);
            const int N = A.n_ctrl();
            for (const LocalIndex& l : v.patches) {
                const Vec2 c = corner_parameter(l.kappa);
                const C2Data d = physical_jet(mp.patches[l.patch].jet(c.x(), c.y()),
                                              eval_tensor(A.space(), f.block(l.patch, N), c.x(), c.y()));
                CHECK(std::abs(d.hess(0, 1) - 1.0) < 1e-9);
                CHECK(std::abs(d.hess(0, 0)) < 1e-9);
                CHECK(std::abs(d.hess(1, 1)) < 1e-9);
                CHECK(d.grad.norm() < 1e-9);
                CHECK(std::abs(d.value) < 1e-9);
            }
        }
    }
}

TEST_CASE("evaluation")
{
    ArgyrisSpace A(builtin_geometry("three_patch_bilinear", kCfg));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::VectorXd c(A.dim());
    for (int a = 0; a < A.dim(); ++a)
        c[a] = U(rng);
    CHECK(A.evaluate(Eigen::VectorXd::Zero(A.dim()), 1, 0.3, 0.4).f == 0.0);
    CHECK_THROWS_AS(A.evaluate(Eigen::VectorXd::Zero(3), 0, 0.5, 0.5), DimensionMismatch);
    const MultiPatch& mp = A.geometry();
    for (int s = 0; s < 20; ++s) {
        const int k = s % 3;
        const double u = 0.1 + 0.8 * (s * 0.37 - std::floor(s * 0.37));
        const double v = 0.1 + 0.8 * (s * 0.61 - std::floor(s * 0.61));
        const C2Data d = A.evaluate_physical(c, k, u, v);
        // central differences in physical space, pulled back by Newton iteration
        const PatchJet J = mp.patches[k].jet(u, v);
        auto value_at = [&](const Vec2& target) {
            Vec2 xi(u, v);
            for (int it = 0; it < 20; ++it) {
                const PatchJet j = mp.patches[k].jet(xi.x(), xi.y());
                xi -= j.jacobian().inverse() * (j.x - target);
            }
            return A.evaluate(c, k, xi.x(), xi.y()).f;
        };
        const double h = 1e-6;
        Vec2 fd;
        for (int i = 0; i < 2; ++i) {
            const Vec2 e = Vec2::Unit(i);
            fd[i] = (value_at(J.x + h * e) - value_at(J.x - h * e)) / (2 * h);
        }
        CHECK((fd - d.grad).norm() < 1e-6 * std::max(1.0, d.grad.norm()));
    }
}

TEST_CASE("basis is linearly independent")
{
    ArgyrisSpace A(builtin_geometry("two_patch_bilinear", kCfg));
    const int m = 24;
    const int K = static_cast<int>(A.geometry().patches.size());
    Eigen::MatrixXd V(K * m * m, A.dim());
    for (int k = 0; k < K; ++k)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                const double u = (a + 0.5) / m, v = (b + 0.5) / m;
                Eigen::VectorXd e = Eigen::VectorXd::Zero(A.dim());
                for (int f = 0; f < A.dim(); ++f) {
                    e[f] = 1.0;
                    V(k * m * m + a * m + b, f) = A.evaluate(e, k, u, v).f;
                    e[f] = 0.0;
                }
            }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    const Eigen::VectorXd s = svd.singularValues();
    CHECK(s[s.size() - 1] / s[0] > 1e-8);
}
