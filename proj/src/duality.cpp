#include "argyris/duality.hpp"

#include <cmath>
#include <map>
#include <memory>

#include "argyris/errors.hpp"

namespace argyris {

namespace {

// Per-patch coefficient grids of a space element, shared by the field closure.
struct Blocks {
    UnivariateSpace space;
    std::vector<Eigen::MatrixXd> grids;
    std::vector<bool> present;
    const MultiPatch* mp;
};

C2Field field_from_blocks(std::shared_ptr<const Blocks> b)
{
    return [b](int patch, double xi1, double xi2) {
        if (!b->present.at(patch))
            return C2Data{};
        return physical_jet(b->mp->patches[patch].jet(xi1, xi2),
                            eval_tensor(b->space, b->grids[patch], xi1, xi2));
    };
}

} // namespace

C2Field analytic_field(const MultiPatch& mp, std::function<C2Data(const Vec2&)> f)
{
    return [&mp, f = std::move(f)](int patch, double xi1, double xi2) {
        return f(mp.patches.at(patch)(xi1, xi2));
    };
}

C2Field space_field(const ArgyrisSpace& space, const Eigen::VectorXd& c)
{
    auto b = std::make_shared<Blocks>();
    b->space = space.space();
    b->mp = &space.geometry();
    const int K = static_cast<int>(space.geometry().patches.size());
    for (int k = 0; k < K; ++k) {
        b->grids.push_back(space.patch_coefficients(c, k));
        b->present.push_back(true);
    }
    return field_from_blocks(b);
}

C2Field basis_field(const ArgyrisSpace& space, int a)
{
    auto b = std::make_shared<Blocks>();
    b->space = space.space();
    b->mp = &space.geometry();
    const int K = static_cast<int>(space.geometry().patches.size());
    b->grids.assign(K, Eigen::MatrixXd());
    b->present.assign(K, false);
    for (int k : space.function(a).patches()) {
        b->grids[k] = space.function(a).block(k, space.n_ctrl());
        b->present[k] = true;
    }
    return field_from_blocks(b);
}

Duality::Duality(const ArgyrisSpace& space)
    : space_(&space), dual_(space.space()), dual_plus_(space.splus()), dual_minus_(space.sminus())
{
}

double Duality::patch_dual(int patch, int j1, int j2, const C2Field& phi) const
{
    const auto& x1 = dual_.points(j1);
    const auto& w1 = dual_.weights(j1);
    const auto& x2 = dual_.points(j2);
    const auto& w2 = dual_.weights(j2);
    double s = 0.0;
    for (std::size_t a = 0; a < x1.size(); ++a)
        for (std::size_t b = 0; b < x2.size(); ++b)
            s += w1[a] * w2[b] * phi(patch, x1[a], x2[b]).value;
    return s;
}

double Duality::edge_dual(int edge, int j, int s, const C2Field& phi) const
{
    const EdgeRecord& e = space_->geometry().edges.at(edge);
    const LocalIndex l = e.locals[0];
    auto at = [&](double xi) {
        const Vec2 u = rotate_parameter(Vec2(0.0, xi), l.kappa);
        return phi(l.patch, u.x(), u.y());
    };
    if (s == 0)
        return dual_plus_.apply(j, [&](double xi) { return at(xi).value; });
    const Patch& F1 = space_->edge_patches(edge)[0];
    const GluingData& g = space_->gluing(edge);
    const double hp = space_->space().h() / space_->space().degree();
    return dual_minus_.apply(j, [&](double xi) {
        return hp * at(xi).grad.dot(transversal_vector(g, F1, xi).d);
    });
}

double Duality::vertex_dual(int vertex, int j1, int j2, const C2Field& phi) const
{
    const VertexRecord& v = space_->geometry().vertices.at(vertex);
    const LocalIndex l = v.patches.at(0);
    const Vec2 c = corner_parameter(l.kappa);
    const C2Data d = phi(l.patch, c.x(), c.y());
    const double scale = std::pow(space_->sigma(vertex), j1 + j2);
    double val = 0.0;
    if (j1 + j2 == 0)
        val = d.value;
    else if (j1 + j2 == 1)
        val = j1 ? d.grad.x() : d.grad.y();
    else if (j1 == 1)
        val = d.hess(0, 1);
    else
        val = j1 == 2 ? d.hess(0, 0) : d.hess(1, 1);
    return val / scale;
}

double Duality::apply(int a, const C2Field& phi) const
{
    const BasisId& id = space_->function(a).id;
    switch (id.kind) {
    case BasisKind::Patch:
        return patch_dual(id.owner, id.j1, id.j2, phi);
    case BasisKind::Edge:
        return edge_dual(id.owner, id.j1, id.j2, phi);
    case BasisKind::Vertex:
        return vertex_dual(id.owner, id.j1, id.j2, phi);
    }
    throw InternalConsistency("unknown basis kind");
}

Eigen::VectorXd Duality::project_serial(const C2Field& phi) const
{
    Eigen::VectorXd c(space_->dim());
    for (int a = 0; a < space_->dim(); ++a)
        c[a] = apply(a, phi);
    return c;
}

Eigen::VectorXd Duality::project(const C2Field& phi) const
{
    const int n = space_->dim();
    Eigen::VectorXd c(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (int a = 0; a < n; ++a)
        c[a] = apply(a, phi);
    return c;
}

Eigen::MatrixXd Duality::biorthogonality_matrix() const
{
    const int n = space_->dim();
    Eigen::MatrixXd M(n, n);
#pragma omp parallel for schedule(dynamic, 4)
    for (int b = 0; b < n; ++b) {
        const C2Field f = basis_field(*space_, b);
        for (int a = 0; a < n; ++a)
            M(a, b) = apply(a, f);
    }
    return M;
}

} // namespace argyris
