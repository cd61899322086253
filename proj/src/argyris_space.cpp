#include "argyris/argyris_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "argyris/errors.hpp"

namespace argyris {

namespace {

constexpr double kDropTol = 1e-14;

// m-th derivative of the single basis function b_k at xi.
double basis_derivative(const UnivariateSpace& sp, int k, double xi, int m)
{
    const BasisValues bv = sp.eval(xi, m);
    const int i = k - bv.first;
    if (i < 0 || i > sp.degree())
        return 0.0;
    return bv.d(m, i);
}

// Derivatives at 0 of the first `count` basis functions: M(k, i) = b_i^(k)(0).
Eigen::MatrixXd derivatives_at_zero(const UnivariateSpace& sp, int count)
{
    const BasisValues bv = sp.eval(0.0, count - 1);
    return bv.d.topLeftCorner(count, count);
}

void add_entries(std::map<int, Eigen::MatrixXd>& blocks, int patch, int N)
{
    if (!blocks.count(patch))
        blocks[patch] = Eigen::MatrixXd::Zero(N, N);
}

ArgyrisFunction from_blocks(const BasisId& id, const std::map<int, Eigen::MatrixXd>& blocks)
{
    ArgyrisFunction f{id, {}};
    double scale = 0.0;
    for (const auto& [patch, B] : blocks)
        scale = std::max(scale, B.cwiseAbs().maxCoeff());
    for (const auto& [patch, B] : blocks)
        for (int j2 = 0; j2 < B.cols(); ++j2)
            for (int j1 = 0; j1 < B.rows(); ++j1)
                if (std::abs(B(j1, j2)) > kDropTol * scale)
                    f.entries.push_back({patch, j1, j2, B(j1, j2)});
    return f;
}

} // namespace

std::string to_string(BasisKind k)
{
    switch (k) {
    case BasisKind::Patch:
        return "patch";
    case BasisKind::Edge:
        return "edge";
    case BasisKind::Vertex:
        return "vertex";
    }
    return "unknown";
}

Eigen::MatrixXd ArgyrisFunction::block(int patch, int N) const
{
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
    for (const CoefEntry& e : entries)
        if (e.patch == patch)
            B(e.j1, e.j2) += e.value;
    return B;
}

std::vector<int> ArgyrisFunction::patches() const
{
    std::vector<int> out;
    for (const CoefEntry& e : entries)
        if (std::find(out.begin(), out.end(), e.patch) == out.end())
            out.push_back(e.patch);
    std::sort(out.begin(), out.end());
    return out;
}

DimensionBreakdown dimension_formula(const SpaceConfig& c, int patches, int edges, int vertices)
{
    const int N = UnivariateSpace(c).dim();
    const int Nminus = (c.p - c.r - 1) * (c.n - 1) + c.p;
    return {patches * (N - 4) * (N - 4), edges * (2 * Nminus - 9), vertices * 6};
}

DimensionBreakdown dimension_of(const MultiPatch& mp)
{
    return dimension_formula(mp.config, static_cast<int>(mp.patches.size()),
                             static_cast<int>(mp.edges.size()),
                             static_cast<int>(mp.vertices.size()));
}

double vertex_scaling(const std::vector<Patch>& vertex_patches, const UnivariateSpace& space)
{
    double s = 0.0;
    for (const Patch& P : vertex_patches)
        s += P.jet(0.0, 0.0).jacobian().norm();
    const double nu = static_cast<double>(vertex_patches.size());
    return space.degree() * nu / (space.h() * s);
}

C2Data physical_jet(const PatchJet& F, const TensorJet& f)
{
    const Eigen::Matrix2d J = F.jacobian();
    const Eigen::Matrix2d Jinv = J.inverse();
    C2Data out;
    out.value = f.f;
    out.grad = Jinv.transpose() * Vec2(f.f1, f.f2);
    Eigen::Matrix2d S;
    S(0, 0) = f.f11 - out.grad.dot(F.d11);
    S(0, 1) = S(1, 0) = f.f12 - out.grad.dot(F.d12);
    S(1, 1) = f.f22 - out.grad.dot(F.d22);
    out.hess = Jinv.transpose() * S * Jinv;
    return out;
}

TensorJet parametric_jet(const PatchJet& F, const C2Data& phi)
{
    TensorJet f;
    f.f = phi.value;
    f.f1 = phi.grad.dot(F.d1);
    f.f2 = phi.grad.dot(F.d2);
    f.f11 = F.d1.dot(phi.hess * F.d1) + phi.grad.dot(F.d11);
    f.f12 = F.d1.dot(phi.hess * F.d2) + phi.grad.dot(F.d12);
    f.f22 = F.d2.dot(phi.hess * F.d2) + phi.grad.dot(F.d22);
    return f;
}

ArgyrisSpace::ArgyrisSpace(MultiPatch geometry, double asg1_tol) : mp_(std::move(geometry))
{
    mp_.config.require_argyris();
    space_ = mp_.space();
    std::tie(splus_, sminus_) = derived_edge_spaces(space_);

    const int Np = splus_.dim();
    trace_embed_.resize(space_.dim(), Np);
    for (int k = 0; k < Np; ++k)
        trace_embed_.col(k) = represent_exactly(
            space_, [&](double x) { return basis_derivative(splus_, k, x, 0); });
    cplus_ = derivatives_at_zero(splus_, 3).inverse();
    cminus_ = derivatives_at_zero(sminus_, 2).inverse();

    build_transfers(asg1_tol);
    for (const VertexRecord& v : mp_.vertices)
        sigma_.push_back(vertex_scaling(standard_form_vertex(mp_, v), space_));
    build_patch_functions();
    build_edge_functions();
    build_vertex_functions();
    build_extraction();

    const DimensionBreakdown expect = dimension_of(mp_);
    if (breakdown_.patch != expect.patch || breakdown_.edge != expect.edge ||
        breakdown_.vertex != expect.vertex) {
        std::ostringstream os;
        os << "basis count " << breakdown_.total() << " differs from the dimension formula "
           << expect.total();
        throw InternalConsistency(os.str());
    }
}

EdgeTransfer ArgyrisSpace::make_transfer(const GluingData& g, int nplus, int nminus) const
{
    const int N = space_.dim();
    EdgeTransfer tr;
    tr.trace = trace_embed_.leftCols(nplus);
    tr.beta1 = Eigen::MatrixXd::Zero(N, nplus);
    tr.beta2 = Eigen::MatrixXd::Zero(N, nplus);
    tr.alpha1.resize(N, nminus);
    tr.alpha2.resize(N, nminus);
    for (int k = 0; k < nplus; ++k) {
        if (g.beta1.c0 != 0.0 || g.beta1.c1 != 0.0)
            tr.beta1.col(k) = represent_exactly(space_, [&](double x) {
                return g.beta1(x) * basis_derivative(splus_, k, x, 1);
            });
        if (g.beta2.c0 != 0.0 || g.beta2.c1 != 0.0)
            tr.beta2.col(k) = represent_exactly(space_, [&](double x) {
                return g.beta2(x) * basis_derivative(splus_, k, x, 1);
            });
    }
    for (int k = 0; k < nminus; ++k) {
        tr.alpha1.col(k) = represent_exactly(space_, [&](double x) {
            return g.alpha1(x) * basis_derivative(sminus_, k, x, 0);
        });
        if (g.alpha2.c0 == g.alpha1.c0 && g.alpha2.c1 == g.alpha1.c1)
            tr.alpha2.col(k) = tr.alpha1.col(k);
        else
            tr.alpha2.col(k) = represent_exactly(space_, [&](double x) {
                return g.alpha2(x) * basis_derivative(sminus_, k, x, 0);
            });
    }
    return tr;
}

void ArgyrisSpace::build_transfers(double tol)
{
    for (const EdgeRecord& e : mp_.edges) {
        std::vector<Patch> sf = standard_form_edge(mp_, e);
        GluingData g = e.kind == EdgeKind::Interface ? fit_asg1(sf[0], sf[1], tol) : boundary_gluing();
        transfer_.push_back(make_transfer(g, splus_.dim(), sminus_.dim()));
        gluing_.push_back(g);
        edge_patches_.push_back(std::move(sf));
    }
}

void ArgyrisSpace::add_edge_columns(std::map<int, Eigen::MatrixXd>& out, const EdgeTransfer& tr,
                                    const Eigen::VectorXd& t, const Eigen::VectorXd& d, int patch1,
                                    int kappa1, int patch2, int kappa2) const
{
    const int N = space_.dim();
    const double hp = space_.h() / space_.degree();
    const Eigen::VectorXd u0 = tr.trace * t;
    if (patch1 >= 0) {
        add_entries(out, patch1, N);
        Eigen::MatrixXd& B = out[patch1];
        const Eigen::VectorXd u1 = u0 - hp * (tr.beta1 * t) + tr.alpha1 * d;
        for (int i = 0; i < N; ++i) {
            const auto [a0, b0] = rotate_index(N, 0, i, kappa1);
            const auto [a1, b1] = rotate_index(N, 1, i, kappa1);
            B(a0, b0) += u0[i];
            B(a1, b1) += u1[i];
        }
    }
    if (patch2 >= 0) {
        add_entries(out, patch2, N);
        Eigen::MatrixXd& B = out[patch2];
        const Eigen::VectorXd u1 = u0 - hp * (tr.beta2 * t) - tr.alpha2 * d;
        for (int i = 0; i < N; ++i) {
            const auto [a0, b0] = rotate_index(N, i, 0, kappa2);
            const auto [a1, b1] = rotate_index(N, i, 1, kappa2);
            B(a0, b0) += u0[i];
            B(a1, b1) += u1[i];
        }
    }
}

void ArgyrisSpace::build_patch_functions()
{
    const int N = space_.dim();
    for (int k = 0; k < static_cast<int>(mp_.patches.size()); ++k)
        for (int j2 = 2; j2 <= N - 3; ++j2)
            for (int j1 = 2; j1 <= N - 3; ++j1) {
                functions_.push_back({{BasisKind::Patch, k, j1, j2}, {{k, j1, j2, 1.0}}});
                ++breakdown_.patch;
            }
}

ArgyrisFunction ArgyrisSpace::edge_function(int edge, const Eigen::VectorXd& t,
                                            const Eigen::VectorXd& d) const
{
    const EdgeRecord& e = mp_.edges.at(edge);
    if (t.size() != splus_.dim() || d.size() != sminus_.dim())
        throw DimensionMismatch("edge function data do not match the edge spaces");
    std::map<int, Eigen::MatrixXd> blocks;
    const bool iface = e.kind == EdgeKind::Interface;
    add_edge_columns(blocks, transfer_[edge], t, d, e.locals[0].patch, e.locals[0].kappa,
                     iface ? e.locals[1].patch : -1, iface ? e.locals[1].kappa - 1 : 0);
    return from_blocks({BasisKind::Edge, edge, 0, 0}, blocks);
}

void ArgyrisSpace::build_edge_functions()
{
    const int Np = splus_.dim(), Nm = sminus_.dim();
    for (int edge = 0; edge < static_cast<int>(mp_.edges.size()); ++edge) {
        for (int j = 3; j <= Nm - 3; ++j) {
            ArgyrisFunction f =
                edge_function(edge, Eigen::VectorXd::Unit(Np, j), Eigen::VectorXd::Zero(Nm));
            f.id = {BasisKind::Edge, edge, j, 0};
            functions_.push_back(std::move(f));
            ++breakdown_.edge;
        }
        for (int j = 2; j <= Nm - 3; ++j) {
            ArgyrisFunction f =
                edge_function(edge, Eigen::VectorXd::Zero(Np), Eigen::VectorXd::Unit(Nm, j));
            f.id = {BasisKind::Edge, edge, j, 1};
            functions_.push_back(std::move(f));
            ++breakdown_.edge;
        }
    }
}

ArgyrisFunction ArgyrisSpace::vertex_projector(int vertex, const C2Data& phi) const
{
    const VertexRecord& v = mp_.vertices.at(vertex);
    const std::vector<Patch> G = standard_form_vertex(mp_, v);
    const int nu = v.valence();
    const int N = space_.dim();
    const double hp = space_.h() / space_.degree();
    std::map<int, Eigen::MatrixXd> blocks;

    // Edge term with the xi1 = 0 side of patch `first` and the xi2 = 0 side of
    // patch `second` (either may be absent on the boundary).
    auto edge_term = [&](int first, int second, const GluingData& g) {
        Vec2 t0, t0p, d0, d0p;
        if (first >= 0) {
            const PatchJet j = G[first].jet(0.0, 0.0);
            t0 = j.d2;
            t0p = j.d22;
            const Transversal tv = transversal_vector(g, G[first], 0.0);
            d0 = tv.d;
            d0p = tv.dprime;
        } else {
            const PatchJet j = G[second].jet(0.0, 0.0);
            t0 = j.d1;
            t0p = j.d11;
            const Transversal tv = transversal_vector_from_second(g, G[second], 0.0);
            d0 = tv.d;
            d0p = tv.dprime;
        }
        const Eigen::Vector3d dt(phi.value, phi.grad.dot(t0),
                                 t0.dot(phi.hess * t0) + phi.grad.dot(t0p));
        const Eigen::Vector2d dd(hp * phi.grad.dot(d0),
                                 hp * (t0.dot(phi.hess * d0) + phi.grad.dot(d0p)));
        const EdgeTransfer tr = make_transfer(g, 3, 2);
        add_edge_columns(blocks, tr, cplus_ * dt, cminus_ * dd,
                         first >= 0 ? v.patches[first].patch : -1,
                         first >= 0 ? v.patches[first].kappa : 0,
                         second >= 0 ? v.patches[second].patch : -1,
                         second >= 0 ? v.patches[second].kappa : 0);
    };

    for (int l = 0; l < nu; ++l) {
        const LocalIndex loc = v.patches[l];
        // edge after patch l: patch l carries its xi1 = 0 side
        const int e = mp_.edge_of(loc.patch, side_after(loc.kappa));
        const EdgeRecord& er = mp_.edges[e];
        if (er.kind == EdgeKind::Boundary) {
            edge_term(l, -1, boundary_gluing());
        } else {
            const bool direct = er.locals[0] == LocalIndex{loc.patch, side_after(loc.kappa)};
            edge_term(l, (l + 1) % nu, direct ? gluing_[e] : gluing_[e].reversed());
        }
        // boundary edge entering the first patch of a boundary vertex
        if (l == 0 && v.kind == VertexKind::Boundary)
            edge_term(-1, 0, boundary_gluing());

        // Hermite data on b_{0,1} x b_{0,1}
        const TensorJet f = parametric_jet(G[l].jet(0.0, 0.0), phi);
        Eigen::Matrix2d Fm;
        Fm << f.f, f.f2, f.f1, f.f12;
        const Eigen::Matrix2d E = derivatives_at_zero(space_, 2);
        const Eigen::Matrix2d Einv = E.inverse();
        const Eigen::Matrix2d C = Einv * Fm * Einv.transpose();
        add_entries(blocks, loc.patch, N);
        Eigen::MatrixXd& B = blocks[loc.patch];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const auto [i1, i2] = rotate_index(N, a, b, loc.kappa);
                B(i1, i2) -= C(a, b);
            }
    }
    return from_blocks({BasisKind::Vertex, vertex, 0, 0}, blocks);
}

void ArgyrisSpace::build_vertex_functions()
{
    static const int kExp[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    for (int vtx = 0; vtx < static_cast<int>(mp_.vertices.size()); ++vtx) {
        const double s = sigma_[vtx];
        for (const auto& ex : kExp) {
            C2Data phi;
            const int order = ex[0] + ex[1];
            if (order == 0)
                phi.value = 1.0;
            else if (order == 1)
                phi.grad = Vec2(ex[0], ex[1]) * s;
            else if (ex[0] == 1)
                phi.hess(0, 1) = phi.hess(1, 0) = s * s;
            else
                phi.hess(ex[0] == 2 ? 0 : 1, ex[0] == 2 ? 0 : 1) = s * s;
            ArgyrisFunction f = vertex_projector(vtx, phi);
            f.id = {BasisKind::Vertex, vtx, ex[0], ex[1]};
            functions_.push_back(std::move(f));
            ++breakdown_.vertex;
        }
    }
}

void ArgyrisSpace::build_extraction()
{
    const int N = space_.dim();
    const int K = static_cast<int>(mp_.patches.size());
    std::vector<std::vector<Eigen::Triplet<double>>> trip(K);
    for (int a = 0; a < dim(); ++a)
        for (const CoefEntry& e : functions_[a].entries)
            trip[e.patch].emplace_back(a, e.j1 + N * e.j2, e.value);
    extraction_.resize(K);
    for (int k = 0; k < K; ++k) {
        extraction_[k].resize(dim(), N * N);
        extraction_[k].setFromTriplets(trip[k].begin(), trip[k].end());
    }
}

Eigen::MatrixXd ArgyrisSpace::patch_coefficients(const Eigen::VectorXd& c, int patch) const
{
    if (c.size() != dim())
        throw DimensionMismatch("coefficient vector length differs from the space dimension");
    const int N = space_.dim();
    const Eigen::VectorXd flat = extraction_.at(patch).transpose() * c;
    return Eigen::Map<const Eigen::MatrixXd>(flat.data(), N, N);
}

TensorJet ArgyrisSpace::evaluate(const Eigen::VectorXd& c, int patch, double xi1, double xi2) const
{
    return eval_tensor(space_, patch_coefficients(c, patch), xi1, xi2);
}

C2Data ArgyrisSpace::evaluate_physical(const Eigen::VectorXd& c, int patch, double xi1,
                                       double xi2) const
{
    return physical_jet(mp_.patches.at(patch).jet(xi1, xi2), evaluate(c, patch, xi1, xi2));
}

C2Data ArgyrisSpace::evaluate_basis(int a, int patch, double xi1, double xi2) const
{
    const Eigen::MatrixXd B = functions_.at(a).block(patch, space_.dim());
    return physical_jet(mp_.patches.at(patch).jet(xi1, xi2), eval_tensor(space_, B, xi1, xi2));
}

int ArgyrisSpace::find(const BasisId& id) const
{
    for (int a = 0; a < dim(); ++a)
        if (functions_[a].id == id)
            return a;
    return -1;
}

} // namespace argyris
