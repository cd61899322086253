#include "doctest.h"

#include <random>

#include "argyris/errors.hpp"
#include "argyris/multipatch.hpp"

using namespace argyris;

namespace {

const SpaceConfig kCfg{3, 1, 4};

MultiPatch unit_square(const SpaceConfig& c = kCfg)
{
    return bilinear_multipatch(c, {{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}});
}

MultiPatch grid2x2()
{
    std::vector<std::array<Vec2, 4>> q;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            q.push_back({Vec2(a, b), Vec2(a + 1, b), Vec2(a + 1, b + 1), Vec2(a, b + 1)});
    return bilinear_multipatch(kCfg, q);
}

} // namespace

TEST_CASE("rotate_patch")
{
    MultiPatch mp = builtin_geometry("three_patch_bilinear", kCfg);
    const Patch& P = mp.patches[1];
    Patch same = rotate_patch(P, 0);
    CHECK(same.X == P.X);
    CHECK(same.Y == P.Y);

    Patch sq = unit_square().patches[0];
    Patch r1 = rotate_patch(sq, 1);
    CHECK((r1(0, 0) - Vec2(1, 0)).norm() == 0.0);

    Patch r4 = P;
    for (int k = 0; k < 4; ++k)
        r4 = rotate_patch(r4, 1);
    CHECK(r4.X == P.X);
    CHECK(r4.Y == P.Y);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int kappa = 0; kappa < 4; ++kappa) {
        Patch R = rotate_patch(P, kappa);
        for (int s = 0; s < 100; ++s) {
            const Vec2 xi(u(rng), u(rng));
            const Vec2 o = rotate_parameter(xi, kappa);
            CHECK((R(xi.x(), xi.y()) - P(o.x(), o.y())).norm() < 1e-14);
        }
    }
}

TEST_CASE("standard form for edges")
{
    SUBCASE("two squares sharing x = 0")
    {
        MultiPatch mp = bilinear_multipatch(
            kCfg, {{Vec2(-1, 0), Vec2(0, 0), Vec2(0, 1), Vec2(-1, 1)},
                   {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}});
        CHECK(mp.num_interfaces() == 1);
        for (const auto& e : mp.edges)
            if (e.kind == EdgeKind::Interface) {
                auto pair = standard_form_edge(mp, e);
                REQUIRE(pair.size() == 2);
                for (int s = 0; s < 50; ++s) {
                    const double xi = s / 49.0;
                    CHECK((pair[0](0, xi) - pair[1](xi, 0)).norm() < 1e-12);
                }
            }
    }
    SUBCASE("three patch interfaces")
    {
        MultiPatch mp = builtin_geometry("three_patch_bilinear", kCfg);
        int count = 0;
        for (const auto& e : mp.edges)
            if (e.kind == EdgeKind::Interface) {
                ++count;
                auto pair = standard_form_edge(mp, e);
                for (int s = 0; s < 50; ++s) {
                    const double xi = s / 49.0;
                    CHECK((pair[0](0, xi) - pair[1](xi, 0)).norm() < 1e-14);
                }
            }
        CHECK(count == 3);
    }
    SUBCASE("boundary edge of a square")
    {
        MultiPatch mp = unit_square();
        for (const auto& e : mp.edges) {
            auto one = standard_form_edge(mp, e);
            REQUIRE(one.size() == 1);
            const LocalIndex l = e.locals[0];
            // the xi1 = 0 side of the rotated patch is side kappa of the original
            for (double xi : {0.0, 0.3, 1.0}) {
                const Vec2 o = rotate_parameter({0.0, xi}, l.kappa);
                CHECK((one[0](0, xi) - mp.patches[l.patch](o.x(), o.y())).norm() < 1e-15);
            }
        }
    }
}

TEST_CASE("standard form for vertices")
{
    SUBCASE("interior vertex of a 2x2 grid")
    {
        MultiPatch mp = grid2x2();
        int interior = 0;
        for (const auto& v : mp.vertices)
            if (v.kind == VertexKind::Interior) {
                ++interior;
                CHECK(v.valence() == 4);
                for (const Patch& P : standard_form_vertex(mp, v))
                    CHECK((P(0, 0) - Vec2(1, 1)).norm() < 1e-14);
            }
        CHECK(interior == 1);
    }
    SUBCASE("square corner")
    {
        MultiPatch mp = unit_square();
        for (const auto& v : mp.vertices) {
            CHECK(v.valence() == 1);
            CHECK(v.kind == VertexKind::Boundary);
            auto ps = standard_form_vertex(mp, v);
            const Vec2 c = corner_parameter(v.patches[0].kappa);
            CHECK((ps[0](0, 0) - mp.patches[0](c.x(), c.y())).norm() < 1e-15);
        }
    }
    SUBCASE("three patch interior vertex")
    {
        MultiPatch mp = builtin_geometry("three_patch_bilinear", kCfg);
        for (const auto& v : mp.vertices)
            if (v.kind == VertexKind::Interior) {
                CHECK(v.valence() == 3);
                auto ps = standard_form_vertex(mp, v);
                for (int l = 0; l < 3; ++l)
                    for (int s = 0; s < 50; ++s) {
                        const double xi = s / 49.0;
                        CHECK((ps[l](0, xi) - ps[(l + 1) % 3](xi, 0)).norm() < 1e-14);
                    }
            }
    }
    SUBCASE("broken ordering is reported")
    {
        MultiPatch mp = builtin_geometry("three_patch_bilinear", kCfg);
        for (auto& v : mp.vertices)
            if (v.kind == VertexKind::Interior) {
                std::swap(v.patches[0], v.patches[1]);
                CHECK_THROWS_AS(standard_form_vertex(mp, v), TopologyError);
                mp.index();
                CHECK_THROWS_AS(mp.validate(), TopologyError);
            }
    }
}

TEST_CASE("check_regularity")
{
    CHECK(check_regularity(unit_square().patches[0], 10) == doctest::Approx(1.0).epsilon(1e-14));

    // two coincident corners: (1,1) and (0,1) collapse
    Patch bad = unit_square(SpaceConfig{1, 0, 1}).patches[0];
    bad.X(0, 1) = 1.0;
    CHECK(check_regularity(bad, 20) <= 0.0);

    MultiPatch q = bilinear_multipatch(kCfg, {{Vec2(0, 0), Vec2(2, 0), Vec2(3, 2), Vec2(0, 1)}});
    double brute = 1e300;
    const Vec2 A(0, 0), B(2, 0), C(3, 2), D(0, 1);
    for (int a = 0; a < 200; ++a)
        for (int b = 0; b < 200; ++b) {
            const double u = a / 199.0, v = b / 199.0;
            const Vec2 du = (1 - v) * (B - A) + v * (C - D);
            const Vec2 dv = (1 - u) * (D - A) + u * (C - B);
            brute = std::min(brute, du.x() * dv.y() - du.y() * dv.x());
        }
    CHECK(std::abs(check_regularity(q.patches[0], 200) - brute) < 1e-10);
}

TEST_CASE("refine")
{
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MultiPatch sq = unit_square(SpaceConfig{3, 1, 2});
    CHECK(sq.patches[0].n_ctrl() == 6);
    MultiPatch f = refine(sq, 2);
    CHECK(f.patches[0].n_ctrl() == 10);
    for (int s = 0; s < 20; ++s) {
        const double a = u(rng), b = u(rng);
        CHECK((f.patches[0](a, b) - sq.patches[0](a, b)).norm() < 1e-14);
    }

    MultiPatch c3 = builtin_geometry("three_patch_bilinear", SpaceConfig{3, 1, 2});
    MultiPatch f3 = refine(refine(c3, 2), 2);
    CHECK(f3.config.n == 8);
    CHECK(f3.edges == c3.edges);
    CHECK(f3.vertices == c3.vertices);
    for (std::size_t k = 0; k < c3.patches.size(); ++k) {
        for (int s = 0; s < 100; ++s) {
            const double a = u(rng), b = u(rng);
            CHECK((f3.patches[k](a, b) - c3.patches[k](a, b)).norm() < 1e-12);
        }
        CHECK(check_regularity(f3.patches[k], 21) >= check_regularity(c3.patches[k], 21) - 1e-10);
    }
    f3.validate();
}

TEST_CASE("builtin topology counts")
{
    auto counts = [](const MultiPatch& mp) {
        return std::tuple{mp.patches.size(), mp.edges.size(), mp.vertices.size()};
    };
    MultiPatch two = builtin_geometry("two_patch_bilinear", kCfg);
    CHECK(two.patches.size() == 2);
    CHECK(two.num_interfaces() == 1);
    CHECK(two.num_boundary_edges() == 6);
    CHECK(two.vertices.size() == 6);
    CHECK(two.num_interior_vertices() == 0);

    MultiPatch three = builtin_geometry("three_patch_bilinear", kCfg);
    CHECK(counts(three) == std::tuple{3u, 9u, 7u});
    CHECK(three.num_interfaces() == 3);
    CHECK(three.num_interior_vertices() == 1);

    MultiPatch five = builtin_geometry("five_patch_bilinear", kCfg);
    CHECK(counts(five) == std::tuple{5u, 15u, 11u});
    CHECK(five.num_interfaces() == 5);
    CHECK(five.num_interior_vertices() == 1);

    MultiPatch L = builtin_geometry("lshape_bilinear", kCfg);
    int max_valence = 0;
    for (const auto& v : L.vertices)
        max_valence = std::max(max_valence, v.valence());
    CHECK(max_valence == 3);
    CHECK(L.num_interior_vertices() == 0);

    for (const auto& name : builtin_names()) {
        MultiPatch mp = builtin_geometry(name, kCfg);
        CHECK_NOTHROW(mp.validate(20));
    }
    CHECK_THROWS_AS(builtin_geometry("nope", kCfg), InvalidConfig);
}

TEST_CASE("index bijection")
{
    MultiPatch mp = builtin_geometry("five_patch_bilinear", kCfg);
    std::vector<int> side_hits(mp.patches.size() * 4, 0), corner_hits(mp.patches.size() * 4, 0);
    for (const auto& e : mp.edges)
        for (const auto& l : e.locals)
            ++side_hits[l.patch * 4 + l.kappa];
    for (const auto& v : mp.vertices)
        for (const auto& l : v.patches)
            ++corner_hits[l.patch * 4 + l.kappa];
    for (int h : side_hits)
        CHECK(h == 1);
    for (int h : corner_hits)
        CHECK(h == 1);
}

TEST_CASE("geometry file round trip and diagnostics")
{
    MultiPatch mp = builtin_geometry("three_patch_bilinear", kCfg);
    const std::string text = format_geometry(mp);
    MultiPatch back = parse_geometry(text);
    CHECK(back.config == mp.config);
    CHECK(back.edges == mp.edges);
    CHECK(back.vertices == mp.vertices);
    for (std::size_t k = 0; k < mp.patches.size(); ++k) {
        CHECK(back.patches[k].X == mp.patches[k].X);
        CHECK(back.patches[k].Y == mp.patches[k].Y);
    }

    const std::string path = "roundtrip_geometry.txt";
    save_geometry(mp, path);
    MultiPatch fromfile = load_geometry(path);
    CHECK(fromfile.edges == mp.edges);
    std::remove(path.c_str());

    CHECK_THROWS_AS(parse_geometry(text + "garbage\n"), ParseError);
    CHECK_THROWS_AS(parse_geometry("argyris-geometry 2\n"), ParseError);

    {
        // an edge that references a missing patch names the edge
        MultiPatch broken = mp;
        broken.edges[4].locals[0].patch = 9;
        try {
            parse_geometry(format_geometry(broken));
            FAIL("expected a topology error");
        } catch (const TopologyError& e) {
            CHECK(std::string(e.what()).find("edge 4") != std::string::npos);
        }
    }
    {
        // perturb one interface control point by 1e-3
        MultiPatch broken = mp;
        const EdgeRecord* iface = nullptr;
        for (const auto& e : broken.edges)
            if (e.kind == EdgeKind::Interface)
                iface = &e;
        const LocalIndex l = iface->locals[0];
        const int N = broken.patches[l.patch].n_ctrl();
        const auto [a, b] = rotate_index(N, 0, N / 2, l.kappa);
        broken.patches[l.patch].X(a, b) += 1e-3;
        try {
            parse_geometry(format_geometry(broken));
            FAIL("expected a conformity error");
        } catch (const NonConformingGeometry& e) {
            CHECK(e.max_gap() > 1e-4);
            CHECK(e.max_gap() < 2e-3);
        }
    }
    {
        // drop one control point line of the last patch
        std::string cut = text;
        const auto pos = cut.find("edges");
        const auto prev = cut.rfind('\n', pos - 2);
        cut.erase(prev + 1, pos - prev - 1);
        CHECK_THROWS_AS(parse_geometry(cut), DimensionMismatch);
    }
}

TEST_CASE("curved stand-in bends only the patch interiors")
{
    const SpaceConfig c{3, 1, 4};
    const MultiPatch curved = builtin_geometry("two_patch_curved_asg1", c);
    const MultiPatch flat = builtin_geometry("two_patch_bilinear", c);
    const int N = curved.space().dim();
    double interior = 0.0, outer = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int j2 = 0; j2 < N; ++j2)
            for (int j1 = 0; j1 < N; ++j1) {
                const double d =
                    (curved.patches[k].ctrl(j1, j2) - flat.patches[k].ctrl(j1, j2)).norm();
                const int layer = std::min({j1, j2, N - 1 - j1, N - 1 - j2});
                (layer < 2 ? outer : interior) = std::max(layer < 2 ? outer : interior, d);
            }
    CHECK(outer < 1e-14);
    CHECK(interior > 0.05);
    CHECK_THROWS_AS(builtin_geometry("two_patch_curved_asg1", SpaceConfig{3, 1, 5}), InvalidConfig);
}
