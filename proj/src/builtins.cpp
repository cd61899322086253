#include <cmath>
#include <numbers>
#include <random>

#include "argyris/errors.hpp"
#include "argyris/multipatch.hpp"

namespace argyris {

namespace {

using Quad = std::array<Vec2, 4>;

std::vector<Quad> two_patch_quads()
{
    return {
        {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(1.1, 1.0), Vec2(0.0, 0.9)},
        {Vec2(1.0, 0.0), Vec2(2.1, 0.2), Vec2(2.0, 1.2), Vec2(1.1, 1.0)},
    };
}

std::vector<Quad> three_patch_quads()
{
    const Vec2 A(0.0, 0.0), B(2.0, 0.0), C(0.9, 1.8), O(0.95, 0.6);
    const Vec2 mab = 0.5 * (A + B), mbc = 0.5 * (B + C), mca = 0.5 * (C + A);
    return {{A, mab, O, mca}, {mab, B, mbc, O}, {O, mbc, C, mca}};
}

std::vector<Quad> five_patch_quads()
{
    const double radius[5] = {1.0, 1.12, 0.94, 1.06, 0.97};
    const double shift[5] = {0.0, 0.07, -0.05, 0.04, -0.06};
    std::array<Vec2, 5> V;
    for (int k = 0; k < 5; ++k) {
        const double t = std::numbers::pi / 2 + 2 * std::numbers::pi * k / 5 + shift[k];
        V[k] = radius[k] * Vec2(std::cos(t), std::sin(t));
    }
    const Vec2 O(0.04, -0.03);
    std::array<Vec2, 5> M;
    for (int k = 0; k < 5; ++k)
        M[k] = 0.5 * (V[k] + V[(k + 1) % 5]);
    std::vector<Quad> quads;
    for (int k = 0; k < 5; ++k)
        quads.push_back({V[k], M[k], O, M[(k + 4) % 5]});
    return quads;
}

std::vector<Quad> lshape_quads()
{
    const Vec2 c(1.05, 0.95);
    return {
        {Vec2(0.0, 0.0), Vec2(1.0, 0.0), c, Vec2(0.0, 1.0)},
        {Vec2(1.0, 0.0), Vec2(2.0, 0.0), Vec2(2.0, 1.0), c},
        {Vec2(0.0, 1.0), c, Vec2(1.0, 2.0), Vec2(0.0, 2.0)},
    };
}

// Coarse two-patch net with n0 elements; the refined net follows by knot insertion.
MultiPatch coarse_two_patch(const SpaceConfig& config, int n0 = 1)
{
    SpaceConfig coarse = config;
    coarse.n = n0;
    return bilinear_multipatch(coarse, two_patch_quads());
}

MultiPatch to_level(MultiPatch coarse, int n)
{
    coarse.index();
    return refine(coarse, n / coarse.config.n);
}

// Bends the interior of both patches; the two outer layers of control points on
// every side stay bilinear, so traces and transversal derivatives along all edges
// keep their bilinear degree.
MultiPatch curved_asg1(const SpaceConfig& config)
{
    if (config.n % 2 != 0)
        throw InvalidConfig("two_patch_curved_asg1 requires an even number of elements");
    MultiPatch mp = coarse_two_patch(config, 2);
    for (int k = 0; k < 2; ++k) {
        Patch& P = mp.patches[k];
        const int N = P.n_ctrl();
        for (int j2 = 2; j2 <= N - 3; ++j2)
            for (int j1 = 2; j1 <= N - 3; ++j1) {
                const double g1 = P.space.greville(j1), g2 = P.space.greville(j2);
                const double bump = std::sin(std::numbers::pi * g1) * std::sin(std::numbers::pi * g2);
                P.X(j1, j2) += 0.08 * bump;
                P.Y(j1, j2) += 0.15 * bump;
            }
    }
    return to_level(std::move(mp), config.n);
}

MultiPatch generic_non_asg1(const SpaceConfig& config)
{
    MultiPatch mp = coarse_two_patch(config);
    std::mt19937 rng(20170101u);
    std::uniform_real_distribution<double> u(-0.06, 0.06);
    for (int k = 0; k < 2; ++k) {
        Patch& P = mp.patches[k];
        const int N = P.n_ctrl();
        for (int j2 = 1; j2 < N - 1; ++j2)
            for (int j1 = 1; j1 < N - 1; ++j1) {
                P.X(j1, j2) += u(rng);
                P.Y(j1, j2) += u(rng);
            }
    }
    return to_level(std::move(mp), config.n);
}

} // namespace

const std::vector<std::string>& builtin_names()
{
    static const std::vector<std::string> names{
        "two_patch_bilinear",     "three_patch_bilinear",  "five_patch_bilinear",
        "lshape_bilinear",        "two_patch_curved_asg1", "two_patch_generic_non_asg1",
    };
    return names;
}

MultiPatch builtin_geometry(const std::string& name, const SpaceConfig& config)
{
    UnivariateSpace check(config);
    (void)check;
    if (name == "two_patch_bilinear")
        return bilinear_multipatch(config, two_patch_quads());
    if (name == "three_patch_bilinear")
        return bilinear_multipatch(config, three_patch_quads());
    if (name == "five_patch_bilinear")
        return bilinear_multipatch(config, five_patch_quads());
    if (name == "lshape_bilinear")
        return bilinear_multipatch(config, lshape_quads());
    if (name == "two_patch_curved_asg1")
        return curved_asg1(config);
    if (name == "two_patch_generic_non_asg1")
        return generic_non_asg1(config);
    std::string known;
    for (const auto& n : builtin_names())
        known += (known.empty() ? "" : ", ") + n;
    throw InvalidConfig("unknown builtin geometry '" + name + "' (known: " + known + ")");
}

} // namespace argyris
