#include "argyris/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "argyris/errors.hpp"

namespace argyris {

namespace {

constexpr double kParametricTol = 1e-13;

double det2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Linear flip(const Linear& l) { return {l.c0 + l.c1, -l.c1}; }

// L2(0,1) Gram matrix of {1, xi}.
Eigen::Matrix2d linear_gram()
{
    Eigen::Matrix2d G;
    G << 1.0, 0.5, 0.5, 1.0 / 3.0;
    return G;
}

double min_on_unit_interval(const Quadratic& q)
{
    double m = std::min(q(0.0), q(1.0));
    if (q.c2 != 0.0) {
        const double t = -q.c1 / (2 * q.c2);
        if (t > 0.0 && t < 1.0)
            m = std::min(m, q(t));
    }
    return m;
}

Quadratic product(const Linear& a, const Linear& b)
{
    return {a.c0 * b.c0, a.c0 * b.c1 + a.c1 * b.c0, a.c1 * b.c1};
}

} // namespace

Eigen::Vector3d gluing_determinants(const Patch& F1, const Patch& F2, double xi)
{
    const PatchJet j1 = F1.jet(0.0, xi);
    const PatchJet j2 = F2.jet(xi, 0.0);
    return {det2(j1.d1, j1.d2), det2(j2.d1, j2.d2), det2(j2.d2, j1.d1)};
}

ExactGluing exact_gluing(const Patch& F1, const Patch& F2)
{
    const UnivariateSpace& sp = F1.space;
    const int p = sp.degree();
    ExactGluing g;
    g.degree = 2 * p;
    const int per_element = 2 * (2 * p + 3);
    double gap = 0.0, scale = 1.0;
    for (int e = 0; e < sp.elements(); ++e)
        for (double x : chebyshev_points(per_element, sp.breakpoint(e), sp.breakpoint(e + 1))) {
            const Vec2 a = F1(0.0, x);
            gap = std::max(gap, (a - F2(x, 0.0)).norm());
            scale = std::max(scale, a.cwiseAbs().maxCoeff());
            const Eigen::Vector3d D = gluing_determinants(F1, F2, x);
            g.xi.push_back(x);
            g.D1.push_back(D[0]);
            g.D2.push_back(D[1]);
            g.D12.push_back(D[2]);
        }
    if (gap > 1e-12 * scale) {
        std::ostringstream os;
        os << "patches are not in standard form for the interface, max gap " << gap;
        throw NonConformingGeometry(os.str(), gap);
    }
    return g;
}

GluingData GluingData::reversed() const
{
    GluingData r = *this;
    r.alpha1 = flip(alpha2);
    r.alpha2 = flip(alpha1);
    const Linear b1 = flip(beta2), b2 = flip(beta1);
    r.beta1 = {-b1.c0, -b1.c1};
    r.beta2 = {-b2.c0, -b2.c1};
    // -beta(1 - xi)
    r.beta = {-(beta.c0 + beta.c1 + beta.c2), beta.c1 + 2 * beta.c2, -beta.c2};
    return r;
}

GluingData boundary_gluing()
{
    GluingData g;
    g.boundary = true;
    return g;
}

GluingData fit_gluing(const Patch& F1, const Patch& F2, double tol)
{
    const ExactGluing ex = exact_gluing(F1, F2);
    const int m = static_cast<int>(ex.xi.size());

    double dscale = 0.0;
    for (int i = 0; i < m; ++i)
        dscale = std::max({dscale, std::abs(ex.D1[i]), std::abs(ex.D2[i])});
    if (!(dscale > 0.0))
        throw InvalidGeometry("interface determinants vanish identically");
    for (int i = 0; i < m; ++i)
        if (!(ex.D1[i] > 0.0 && ex.D2[i] > 0.0))
            throw InvalidGeometry("interface Jacobian determinant is not positive");

    GluingData g;

    // parametric continuity: D1 == D2 and D12 == 0
    double pc = 0.0;
    for (int i = 0; i < m; ++i)
        pc = std::max({pc, std::abs(ex.D1[i] - ex.D2[i]), std::abs(ex.D12[i])});
    if (pc <= kParametricTol * dscale) {
        g.residual = pc / dscale;
        g.asg1 = true;
        g.null_dim = 2;
        return g;
    }

    // alpha1 = a0 + a1 xi, alpha2 = q0 + q1 xi with D2 alpha1 - D1 alpha2 = 0
    Eigen::MatrixXd A(m, 4);
    for (int i = 0; i < m; ++i) {
        const double x = ex.xi[i];
        const double d1 = ex.D1[i] / dscale, d2 = ex.D2[i] / dscale;
        A.row(i) << d2, d2 * x, -d1, -d1 * x;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
    const Eigen::Vector4d s = svd.singularValues();
    const double sigma_ratio = s[3] / s[0];
    int null_dim = 0;
    for (int k = 0; k < 4; ++k)
        if (s[k] / s[0] < tol)
            ++null_dim;
    g.null_dim = std::max(null_dim, 1);
    const Eigen::MatrixXd V = svd.matrixV().rightCols(g.null_dim);

    // minimize |alpha1 - 1|^2 + |alpha2 - 1|^2 in L2(0,1) over the null space
    Eigen::Matrix4d G = Eigen::Matrix4d::Zero();
    G.topLeftCorner<2, 2>() = linear_gram();
    G.bottomRightCorner<2, 2>() = linear_gram();
    const Eigen::Vector4d E(1.0, 0.0, 1.0, 0.0);
    const Eigen::MatrixXd H = V.transpose() * G * V;
    const Eigen::VectorXd y = H.ldlt().solve(V.transpose() * G * E);
    Eigen::Vector4d a = V * y;
    if (a.norm() == 0.0)
        throw InvalidGeometry("gluing normalization degenerates to zero");
    g.alpha1 = {a[0], a[1]};
    g.alpha2 = {a[2], a[3]};
    if (g.alpha1(0.5) < 0.0) {
        g.alpha1 = {-a[0], -a[1]};
        g.alpha2 = {-a[2], -a[3]};
    }
    if (!(min_on_unit_interval(product(g.alpha1, g.alpha2)) > 0.0))
        throw InvalidGeometry("gluing data violate alpha1 * alpha2 > 0 on [0,1]");

    // beta = alpha1 D12 / D1, fitted by a quadratic
    Eigen::MatrixXd B(m, 3);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        const double x = ex.xi[i];
        B.row(i) << 1.0, x, x * x;
        rhs[i] = g.alpha1(x) * ex.D12[i] / ex.D1[i];
    }
    const Eigen::Vector3d bc = B.colPivHouseholderQr().solve(rhs);
    g.beta = {bc[0], bc[1], bc[2]};
    const double bscale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    const double beta_res = (B * bc - rhs).cwiseAbs().maxCoeff() / bscale;

    g.residual = std::max(sigma_ratio, beta_res);
    g.asg1 = g.residual < tol;
    if (!g.asg1)
        return g;

    // split beta = alpha1 beta2 + alpha2 beta1 with minimal |beta1|^2 + |beta2|^2;
    // unknowns x = (u0, u1, w0, w1) for beta1 = u, beta2 = w
    const double a0 = g.alpha1.c0, a1 = g.alpha1.c1, q0 = g.alpha2.c0, q1 = g.alpha2.c1;
    Eigen::Matrix<double, 3, 4> M;
    M << q0, 0.0, a0, 0.0, q1, q0, a1, a0, 0.0, q1, 0.0, a1;
    const Eigen::LLT<Eigen::Matrix4d> llt(G);
    const Eigen::Matrix4d Linv = llt.matrixL().solve(Eigen::Matrix4d::Identity());
    const Eigen::Matrix<double, 3, 4> Bm = M * Linv.transpose();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Bm);
    cod.setThreshold(1e-12);
    const Eigen::Vector4d yy = cod.solve(Eigen::Vector3d(bc));
    const Eigen::Vector4d xs = Linv.transpose() * yy;
    const double split_res = (M * xs - bc).cwiseAbs().maxCoeff();
    if (split_res > 1e-10 * std::max(1.0, bc.cwiseAbs().maxCoeff())) {
        std::ostringstream os;
        os << "beta split has no solution (alpha1 and alpha2 share a root), residual "
           << split_res;
        throw DegenerateGluing(os.str());
    }
    g.beta1 = {xs[0], xs[1]};
    g.beta2 = {xs[2], xs[3]};
    // keep beta consistent with the split at coefficient level
    const Quadratic s1 = product(g.alpha1, g.beta2), s2 = product(g.alpha2, g.beta1);
    g.beta = {s1.c0 + s2.c0, s1.c1 + s2.c1, s1.c2 + s2.c2};
    return g;
}

GluingData fit_asg1(const Patch& F1, const Patch& F2, double tol)
{
    GluingData g = fit_gluing(F1, F2, tol);
    if (!g.asg1) {
        std::ostringstream os;
        os << "interface is not AS-G1: residual " << g.residual << " >= tolerance " << tol;
        throw NotASG1(os.str(), g.residual);
    }
    return g;
}

double g1_residual(const GluingData& g, const Patch& F1, const Patch& F2, int samples)
{
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double xi = double(s) / (samples - 1);
        const PatchJet j1 = F1.jet(0.0, xi);
        const PatchJet j2 = F2.jet(xi, 0.0);
        const Vec2 r = g.alpha1(xi) * j2.d2 + g.alpha2(xi) * j1.d1 + g.beta(xi) * j1.d2;
        worst = std::max(worst, r.norm() / (j1.d1.norm() + j1.d2.norm()));
    }
    return worst;
}

Transversal transversal_vector(const GluingData& g, const Patch& F1, double xi)
{
    const PatchJet j = F1.jet(0.0, xi);
    const double a = g.alpha1(xi), da = g.alpha1.slope();
    const double b = g.beta1(xi), db = g.beta1.slope();
    const Vec2 num = j.d1 + b * j.d2;
    const Vec2 dnum = j.d12 + db * j.d2 + b * j.d22;
    return {num / a, (dnum * a - num * da) / (a * a)};
}

Transversal transversal_vector_from_second(const GluingData& g, const Patch& F2, double xi)
{
    const PatchJet j = F2.jet(xi, 0.0);
    const double a = g.alpha2(xi), da = g.alpha2.slope();
    const double b = g.beta2(xi), db = g.beta2.slope();
    const Vec2 num = j.d2 + b * j.d1;
    const Vec2 dnum = j.d12 + db * j.d1 + b * j.d11;
    return {-num / a, -(dnum * a - num * da) / (a * a)};
}

} // namespace argyris
