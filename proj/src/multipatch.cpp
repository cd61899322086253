#include "argyris/multipatch.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "argyris/errors.hpp"

namespace argyris {

namespace {

constexpr int kConformitySamples = 50;

std::string edge_label(const EdgeRecord& e) { return "edge " + std::to_string(e.id); }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Endpoints of side kappa in counterclockwise traversal: F o r^kappa (0,1) -> (0,0).
std::pair<Vec2, Vec2> side_endpoints(const Patch& p, int side)
{
    const Vec2 a = rotate_parameter({0.0, 1.0}, side);
    const Vec2 b = rotate_parameter({0.0, 0.0}, side);
    return {p(a.x(), a.y()), p(b.x(), b.y())};
}

} // namespace

Vec2 Patch::operator()(double xi1, double xi2) const
{
    const int p = space.degree();
    const BasisValues b1 = space.eval(xi1, 0);
    const BasisValues b2 = space.eval(xi2, 0);
    Vec2 s = Vec2::Zero();
    for (int i2 = 0; i2 <= p; ++i2)
        for (int i1 = 0; i1 <= p; ++i1) {
            const double w = b1.d(0, i1) * b2.d(0, i2);
            s.x() += w * X(b1.first + i1, b2.first + i2);
            s.y() += w * Y(b1.first + i1, b2.first + i2);
        }
    return s;
}

PatchJet Patch::jet(double xi1, double xi2) const
{
    const TensorJet jx = eval_tensor(space, X, xi1, xi2);
    const TensorJet jy = eval_tensor(space, Y, xi1, xi2);
    PatchJet j;
    j.x = {jx.f, jy.f};
    j.d1 = {jx.f1, jy.f1};
    j.d2 = {jx.f2, jy.f2};
    j.d11 = {jx.f11, jy.f11};
    j.d12 = {jx.f12, jy.f12};
    j.d22 = {jx.f22, jy.f22};
    return j;
}

Eigen::Vector2d rotate_parameter(Eigen::Vector2d xi, int kappa)
{
    kappa = ((kappa % 4) + 4) % 4;
    for (int k = 0; k < kappa; ++k)
        xi = Eigen::Vector2d(1.0 - xi.y(), xi.x());
    return xi;
}

Eigen::Vector2d corner_parameter(int kappa) { return rotate_parameter({0.0, 0.0}, kappa); }

std::pair<int, int> rotate_index(int N, int j1, int j2, int kappa)
{
    kappa = ((kappa % 4) + 4) % 4;
    for (int k = 0; k < kappa; ++k) {
        const int a = N - 1 - j2;
        const int b = j1;
        j1 = a;
        j2 = b;
    }
    return {j1, j2};
}

Patch rotate_patch(const Patch& patch, int kappa)
{
    const int N = patch.n_ctrl();
    Patch out{patch.space, Eigen::MatrixXd(N, N), Eigen::MatrixXd(N, N)};
    for (int j2 = 0; j2 < N; ++j2)
        for (int j1 = 0; j1 < N; ++j1) {
            const auto [a, b] = rotate_index(N, j1, j2, kappa);
            out.X(j1, j2) = patch.X(a, b);
            out.Y(j1, j2) = patch.Y(a, b);
        }
    return out;
}

double check_regularity(const Patch& patch, int m)
{
    if (m < 2)
        throw DomainError("regularity grid needs at least 2 samples per direction");
    double mn = std::numeric_limits<double>::infinity();
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const double u = double(a) / (m - 1), v = double(b) / (m - 1);
            mn = std::min(mn, patch.jet(u, v).det());
        }
    return mn;
}

int MultiPatch::num_interfaces() const
{
    return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const EdgeRecord& e) {
        return e.kind == EdgeKind::Interface;
    }));
}

int MultiPatch::num_boundary_edges() const
{
    return static_cast<int>(edges.size()) - num_interfaces();
}

int MultiPatch::num_interior_vertices() const
{
    return static_cast<int>(std::count_if(vertices.begin(), vertices.end(),
                                          [](const VertexRecord& v) {
                                              return v.kind == VertexKind::Interior;
                                          }));
}

void MultiPatch::index()
{
    const int K = static_cast<int>(patches.size());
    edge_of_.assign(K, {-1, -1, -1, -1});
    vertex_of_.assign(K, {-1, -1, -1, -1});
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const EdgeRecord& e = edges[i];
        if (e.id != static_cast<int>(i))
            throw TopologyError(edge_label(e) + ": ids must be 0..E-1 in order");
        const std::size_t want = e.kind == EdgeKind::Interface ? 2 : 1;
        if (e.locals.size() != want)
            throw TopologyError(edge_label(e) + ": wrong number of (patch, side) pairs");
        if (want == 2 && e.locals[0].patch == e.locals[1].patch)
            throw TopologyError(edge_label(e) + ": interface joins a patch to itself");
        for (const LocalIndex& l : e.locals) {
            if (l.patch < 0 || l.patch >= K)
                throw TopologyError(edge_label(e) + " references missing patch " +
                                    std::to_string(l.patch));
            if (l.kappa < 0 || l.kappa > 3)
                throw TopologyError(edge_label(e) + ": side must be 0..3");
            if (edge_of_[l.patch][l.kappa] != -1)
                throw TopologyError(edge_label(e) + ": patch " + std::to_string(l.patch) +
                                    " side " + std::to_string(l.kappa) +
                                    " already belongs to edge " +
                                    std::to_string(edge_of_[l.patch][l.kappa]));
            edge_of_[l.patch][l.kappa] = e.id;
        }
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const VertexRecord& v = vertices[i];
        const std::string label = "vertex " + std::to_string(v.id);
        if (v.id != static_cast<int>(i))
            throw TopologyError(label + ": ids must be 0..V-1 in order");
        if (v.patches.empty())
            throw TopologyError(label + ": no patches");
        for (const LocalIndex& l : v.patches) {
            if (l.patch < 0 || l.patch >= K)
                throw TopologyError(label + " references missing patch " +
                                    std::to_string(l.patch));
            if (l.kappa < 0 || l.kappa > 3)
                throw TopologyError(label + ": corner must be 0..3");
            if (vertex_of_[l.patch][l.kappa] != -1)
                throw TopologyError(label + ": patch " + std::to_string(l.patch) + " corner " +
                                    std::to_string(l.kappa) + " listed twice");
            vertex_of_[l.patch][l.kappa] = v.id;
        }
    }
    for (int k = 0; k < K; ++k)
        for (int s = 0; s < 4; ++s) {
            if (edge_of_[k][s] == -1)
                throw TopologyError("patch " + std::to_string(k) + " side " + std::to_string(s) +
                                    " belongs to no edge");
            if (vertex_of_[k][s] == -1)
                throw TopologyError("patch " + std::to_string(k) + " corner " +
                                    std::to_string(s) + " belongs to no vertex");
        }
}

double MultiPatch::max_interface_gap() const
{
    double gap = 0.0;
    for (const EdgeRecord& e : edges) {
        if (e.kind != EdgeKind::Interface)
            continue;
        const Patch F1 = rotate_patch(patches[e.locals[0].patch], e.locals[0].kappa);
        const Patch F2 = rotate_patch(patches[e.locals[1].patch], e.locals[1].kappa - 1);
        for (int s = 0; s < kConformitySamples; ++s) {
            const double xi = double(s) / (kConformitySamples - 1);
            gap = std::max(gap, (F1(0.0, xi) - F2(xi, 0.0)).norm());
        }
    }
    return gap;
}

void MultiPatch::validate(int samples_per_element, double tol) const
{
    if (edge_of_.size() != patches.size())
        throw InternalConsistency("MultiPatch::index() must run before validate()");
    const UnivariateSpace sp = space();
    for (std::size_t k = 0; k < patches.size(); ++k) {
        const Patch& P = patches[k];
        if (!(P.space == sp) || P.X.rows() != sp.dim() || P.X.cols() != sp.dim() ||
            P.Y.rows() != sp.dim() || P.Y.cols() != sp.dim())
            throw DimensionMismatch("patch " + std::to_string(k) +
                                    " control net does not match the declared space");
    }

    double scale = 0.0;
    for (const Patch& P : patches)
        scale = std::max({scale, P.X.cwiseAbs().maxCoeff(), P.Y.cwiseAbs().maxCoeff()});
    const double abs_tol = tol * std::max(1.0, scale);

    // interface conformity
    for (const EdgeRecord& e : edges) {
        if (e.kind != EdgeKind::Interface)
            continue;
        const Patch F1 = rotate_patch(patches[e.locals[0].patch], e.locals[0].kappa);
        const Patch F2 = rotate_patch(patches[e.locals[1].patch], e.locals[1].kappa - 1);
        double gap = 0.0;
        for (int s = 0; s < kConformitySamples; ++s) {
            const double xi = double(s) / (kConformitySamples - 1);
            gap = std::max(gap, (F1(0.0, xi) - F2(xi, 0.0)).norm());
        }
        if (gap > abs_tol) {
            std::ostringstream os;
            os << edge_label(e) << ": interface is not conforming, max gap " << gap;
            throw NonConformingGeometry(os.str(), gap);
        }
    }

    // vertex corners and ordering
    for (const VertexRecord& v : vertices) {
        const std::string label = "vertex " + std::to_string(v.id);
        const int nu = v.valence();
        const Vec2 c0 = corner_parameter(v.patches[0].kappa);
        const Vec2 x0 = patches[v.patches[0].patch](c0.x(), c0.y());
        double gap = 0.0;
        for (const LocalIndex& l : v.patches) {
            const Vec2 c = corner_parameter(l.kappa);
            gap = std::max(gap, (patches[l.patch](c.x(), c.y()) - x0).norm());
        }
        if (gap > abs_tol) {
            std::ostringstream os;
            os << label << ": corners do not coincide, max gap " << gap;
            throw NonConformingGeometry(os.str(), gap);
        }
        const int links = v.kind == VertexKind::Interior ? nu : nu - 1;
        for (int l = 0; l < links; ++l) {
            const LocalIndex a = v.patches[l];
            const LocalIndex b = v.patches[(l + 1) % nu];
            const int ea = edge_of_[a.patch][side_after(a.kappa)];
            const int eb = edge_of_[b.patch][side_before(b.kappa)];
            if (ea != eb)
                throw TopologyError(label + ": patches " + std::to_string(a.patch) + " and " +
                                    std::to_string(b.patch) +
                                    " are not counterclockwise neighbours");
        }
        if (v.kind == VertexKind::Boundary) {
            const LocalIndex first = v.patches.front();
            const LocalIndex last = v.patches.back();
            if (edges[edge_of_[first.patch][side_before(first.kappa)]].kind != EdgeKind::Boundary ||
                edges[edge_of_[last.patch][side_after(last.kappa)]].kind != EdgeKind::Boundary)
                throw TopologyError(label +
                                    ": boundary vertex must start and end at boundary edges");
        } else {
            for (const LocalIndex& l : v.patches)
                if (edges[edge_of_[l.patch][side_after(l.kappa)]].kind != EdgeKind::Interface)
                    throw TopologyError(label + ": interior vertex touches a boundary edge");
        }
        // counterclockwise check: tangents of the standard form turn positively
        for (const LocalIndex& l : v.patches) {
            const PatchJet j = rotate_patch(patches[l.patch], l.kappa).jet(0.0, 0.0);
            if (cross(j.d1, j.d2) <= 0.0)
                throw TopologyError(label + ": clockwise corner on patch " +
                                    std::to_string(l.patch));
        }
    }

    for (std::size_t k = 0; k < patches.size(); ++k) {
        const int m = std::max(2, samples_per_element * config.n + 1);
        const double mn = check_regularity(patches[k], m);
        if (!(mn > 0.0)) {
            std::ostringstream os;
            os << "patch " << k << " is not regular: min det " << mn;
            throw InvalidGeometry(os.str());
        }
    }
}

std::vector<Patch> standard_form_edge(const MultiPatch& mp, const EdgeRecord& edge, double tol)
{
    const LocalIndex a = edge.locals.at(0);
    Patch F1 = rotate_patch(mp.patches.at(a.patch), a.kappa);
    if (edge.kind == EdgeKind::Boundary)
        return {F1};
    const LocalIndex b = edge.locals.at(1);
    Patch F2 = rotate_patch(mp.patches.at(b.patch), b.kappa - 1);
    double gap = 0.0, scale = 1.0;
    for (int s = 0; s < kConformitySamples; ++s) {
        const double xi = double(s) / (kConformitySamples - 1);
        const Vec2 x1 = F1(0.0, xi);
        gap = std::max(gap, (x1 - F2(xi, 0.0)).norm());
        scale = std::max(scale, x1.cwiseAbs().maxCoeff());
    }
    if (gap > tol * scale) {
        std::ostringstream os;
        os << edge_label(edge) << ": standard form is not conforming, max gap " << gap;
        throw NonConformingGeometry(os.str(), gap);
    }
    return {std::move(F1), std::move(F2)};
}

std::vector<Patch> standard_form_vertex(const MultiPatch& mp, const VertexRecord& vertex,
                                        double tol)
{
    std::vector<Patch> out;
    for (const LocalIndex& l : vertex.patches)
        out.push_back(rotate_patch(mp.patches.at(l.patch), l.kappa));
    const int nu = vertex.valence();
    const int links = vertex.kind == VertexKind::Interior ? nu : nu - 1;
    for (int l = 0; l < links; ++l) {
        const Patch& A = out[l];
        const Patch& B = out[(l + 1) % nu];
        double gap = 0.0, scale = 1.0;
        for (int s = 0; s < kConformitySamples; ++s) {
            const double xi = double(s) / (kConformitySamples - 1);
            const Vec2 xa = A(0.0, xi);
            gap = std::max(gap, (xa - B(xi, 0.0)).norm());
            scale = std::max(scale, xa.cwiseAbs().maxCoeff());
        }
        if (gap > tol * scale)
            throw TopologyError("vertex " + std::to_string(vertex.id) +
                                ": counterclockwise ordering inconsistent between patches " +
                                std::to_string(vertex.patches[l].patch) + " and " +
                                std::to_string(vertex.patches[(l + 1) % nu].patch));
    }
    return out;
}

MultiPatch refine(const MultiPatch& mp, int factor)
{
    if (factor < 1)
        throw InvalidConfig("refinement factor must be >= 1");
    MultiPatch out = mp;
    out.config.n = mp.config.n * factor;
    const UnivariateSpace fine(out.config);
    for (std::size_t k = 0; k < mp.patches.size(); ++k) {
        const Patch& P = mp.patches[k];
        Patch Q;
        Q.space = fine;
        Q.X = represent_exactly(fine, [&](double u, double v) { return P(u, v).x(); });
        Q.Y = represent_exactly(fine, [&](double u, double v) { return P(u, v).y(); });
        out.patches[k] = std::move(Q);
    }
    out.index();
    return out;
}

void infer_topology(MultiPatch& mp, double tol)
{
    const int K = static_cast<int>(mp.patches.size());
    double scale = 1.0;
    for (const Patch& P : mp.patches)
        scale = std::max({scale, P.X.cwiseAbs().maxCoeff(), P.Y.cwiseAbs().maxCoeff()});
    const double eps = tol * scale * 1e3;

    auto same = [&](const Vec2& a, const Vec2& b) { return (a - b).norm() <= eps; };
    auto side_mid = [&](int k, int s) {
        const Vec2 t = rotate_parameter({0.0, 0.5}, s);
        return mp.patches[k](t.x(), t.y());
    };

    mp.edges.clear();
    std::vector<std::array<int, 4>> edge_of(K, {-1, -1, -1, -1});
    for (int k = 0; k < K; ++k)
        for (int s = 0; s < 4; ++s) {
            if (edge_of[k][s] != -1)
                continue;
            const auto [a, b] = side_endpoints(mp.patches[k], s);
            const Vec2 m = side_mid(k, s);
            EdgeRecord e;
            e.id = static_cast<int>(mp.edges.size());
            e.kind = EdgeKind::Boundary;
            e.locals.push_back({k, s});
            for (int k2 = k + 1; k2 < K && e.locals.size() == 1; ++k2)
                for (int s2 = 0; s2 < 4; ++s2) {
                    if (edge_of[k2][s2] != -1)
                        continue;
                    const auto [a2, b2] = side_endpoints(mp.patches[k2], s2);
                    if (same(a, b2) && same(b, a2) && same(m, side_mid(k2, s2))) {
                        e.kind = EdgeKind::Interface;
                        e.locals.push_back({k2, s2});
                        edge_of[k2][s2] = e.id;
                        break;
                    }
                }
            edge_of[k][s] = e.id;
            mp.edges.push_back(e);
        }

    // group corners by position
    struct Corner {
        LocalIndex l;
        Vec2 x;
    };
    std::vector<std::vector<Corner>> groups;
    for (int k = 0; k < K; ++k)
        for (int c = 0; c < 4; ++c) {
            const Vec2 t = corner_parameter(c);
            const Vec2 x = mp.patches[k](t.x(), t.y());
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& g) { return same(g.front().x, x); });
            if (it == groups.end())
                groups.push_back({{{k, c}, x}});
            else
                it->push_back({{k, c}, x});
        }

    mp.vertices.clear();
    for (const auto& g : groups) {
        // link: patch l's after-edge is the next patch's before-edge
        auto next_of = [&](const LocalIndex& l) -> int {
            const int e = edge_of[l.patch][side_after(l.kappa)];
            for (std::size_t i = 0; i < g.size(); ++i)
                if (edge_of[g[i].l.patch][side_before(g[i].l.kappa)] == e &&
                    !(g[i].l == l))
                    return static_cast<int>(i);
            return -1;
        };
        std::size_t start = 0;
        VertexKind kind = VertexKind::Interior;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const LocalIndex l = g[i].l;
            if (mp.edges[edge_of[l.patch][side_before(l.kappa)]].kind == EdgeKind::Boundary) {
                start = i;
                kind = VertexKind::Boundary;
                break;
            }
        }
        VertexRecord v;
        v.id = static_cast<int>(mp.vertices.size());
        v.kind = kind;
        std::size_t cur = start;
        for (std::size_t step = 0; step < g.size(); ++step) {
            v.patches.push_back(g[cur].l);
            const int nx = next_of(g[cur].l);
            if (nx < 0 || nx == static_cast<int>(start))
                break;
            cur = static_cast<std::size_t>(nx);
        }
        if (v.patches.size() != g.size())
            throw TopologyError("vertex " + std::to_string(v.id) +
                                ": corners do not form a single fan");
        mp.vertices.push_back(v);
    }
    mp.index();
}

MultiPatch bilinear_multipatch(const SpaceConfig& config,
                               const std::vector<std::array<Vec2, 4>>& quads)
{
    MultiPatch mp;
    mp.config = config;
    const UnivariateSpace sp(config);
    const int N = sp.dim();
    for (const auto& q : quads) {
        Patch P{sp, Eigen::MatrixXd(N, N), Eigen::MatrixXd(N, N)};
        for (int j2 = 0; j2 < N; ++j2)
            for (int j1 = 0; j1 < N; ++j1) {
                const double u = sp.greville(j1), v = sp.greville(j2);
                const Vec2 x = (1 - u) * (1 - v) * q[0] + u * (1 - v) * q[1] + u * v * q[2] +
                               (1 - u) * v * q[3];
                P.X(j1, j2) = x.x();
                P.Y(j1, j2) = x.y();
            }
        mp.patches.push_back(std::move(P));
    }
    infer_topology(mp);
    return mp;
}

} // namespace argyris
