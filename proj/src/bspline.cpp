#include "argyris/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "argyris/errors.hpp"

namespace argyris {

namespace {

constexpr double kReconcileTol = 1e-10;

// Piegl & Tiller, algorithm A2.3, with the span index given.
Eigen::MatrixXd ders_basis(const std::vector<double>& U, int p, int span, double u, int k)
{
    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - U[span + 1 - j];
        right[j] = U[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            const double tmp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        ndu(j, j) = saved;
    }

    Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(k + 1, p + 1);
    for (int j = 0; j <= p; ++j)
        ders(0, j) = ndu(j, p);

    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int kk = 1; kk <= k; ++kk) {
            double d = 0.0;
            const int rk = r - kk;
            const int pk = p - kk;
            if (r >= kk) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? kk - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, kk) = -a(s1, kk - 1) / ndu(pk + 1, r);
                d += a(s2, kk) * ndu(r, pk);
            }
            ders(kk, r) = d;
            std::swap(s1, s2);
        }
    }
    int fac = p;
    for (int kk = 1; kk <= k; ++kk) {
        ders.row(kk) *= fac;
        fac *= (p - kk);
    }
    return ders;
}

} // namespace

int SpaceConfig::min_argyris_elements(int p, int r)
{
    if (p - r - 1 <= 0)
        return -1;
    return (4 - r + (p - r - 1) - 1) / (p - r - 1);
}

bool SpaceConfig::argyris_admissible() const
{
    if (r < 1 || r > p - 2 || n < 1)
        return false;
    // h <= (p-r-1)/(4-r)  <=>  n (p-r-1) >= 4-r
    return n * (p - r - 1) >= 4 - r;
}

void SpaceConfig::require_argyris() const
{
    if (r < 1)
        throw InvalidConfig("regularity r must be >= 1 (C1 inside patches), got r=" +
                            std::to_string(r));
    if (r > p - 2)
        throw InvalidConfig("regularity r must be <= p-2, got p=" + std::to_string(p) +
                            " r=" + std::to_string(r));
    if (n * (p - r - 1) < 4 - r)
        throw InvalidConfig("too few elements: need n >= (4-r)/(p-r-1) = " +
                            std::to_string(min_argyris_elements(p, r)) + ", got n=" +
                            std::to_string(n));
}

UnivariateSpace::UnivariateSpace(int p, int r, int n) : p_(p), r_(r), n_(n)
{
    if (p < 1)
        throw InvalidConfig("degree must be >= 1");
    if (r < 0 || r > p - 1)
        throw InvalidConfig("regularity must satisfy 0 <= r <= p-1 (p=" + std::to_string(p) +
                            ", r=" + std::to_string(r) + ")");
    if (n < 1)
        throw InvalidConfig("element count must be >= 1");
    const int m = p - r;
    knots_.reserve(2 * (p + 1) + m * (n - 1));
    knots_.insert(knots_.end(), p + 1, 0.0);
    for (int e = 1; e < n; ++e)
        knots_.insert(knots_.end(), m, static_cast<double>(e) / n);
    knots_.insert(knots_.end(), p + 1, 1.0);
}

int UnivariateSpace::element_of(double xi) const
{
    if (!(xi >= 0.0 && xi <= 1.0)) {
        std::ostringstream os;
        os << "parameter " << xi << " outside [0,1]";
        throw DomainError(os.str());
    }
    const int e = static_cast<int>(std::floor(xi * n_));
    return std::clamp(e, 0, n_ - 1);
}

std::pair<int, int> UnivariateSpace::support(int j) const
{
    const int m = p_ - r_;
    // b_j is active on element e iff e*m <= j <= e*m + p
    int lo = (j - p_ + m - 1) / m;
    if (j - p_ < 0)
        lo = 0;
    const int hi = std::min(j / m, n_ - 1);
    return {std::max(lo, 0), hi + 1};
}

BasisValues UnivariateSpace::eval(double xi, int k) const
{
    return eval_in(element_of(xi), xi, k);
}

BasisValues UnivariateSpace::eval_in(int element, double xi, int k) const
{
    if (k < 0 || k > p_)
        throw DomainError("derivative order must be in [0, p]");
    const int span = p_ + element * (p_ - r_);
    return {first_active(element), ders_basis(knots_, p_, span, xi, k)};
}

double UnivariateSpace::greville(int j) const
{
    double s = 0.0;
    for (int i = 1; i <= p_; ++i)
        s += knots_[j + i];
    return s / p_;
}

std::vector<double> chebyshev_points(int count, double a, double b)
{
    std::vector<double> x(count);
    for (int k = 0; k < count; ++k) {
        const double t = std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * count));
        x[count - 1 - k] = a + (b - a) * 0.5 * (1.0 + t);
    }
    return x;
}

Spline::Spline(UnivariateSpace space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != space_.dim())
        throw DimensionMismatch("spline coefficient count " + std::to_string(coeffs_.size()) +
                                " does not match space dimension " +
                                std::to_string(space_.dim()));
}

double Spline::derivative(double xi, int k) const
{
    if (k > space_.degree())
        return 0.0;
    const BasisValues bv = space_.eval(xi, k);
    double s = 0.0;
    for (int i = 0; i <= space_.degree(); ++i)
        s += bv.d(k, i) * coeffs_[bv.first + i];
    return s;
}

std::pair<UnivariateSpace, UnivariateSpace> derived_edge_spaces(const UnivariateSpace& space)
{
    const int p = space.degree();
    const int r = space.regularity();
    if (r + 1 > p - 1)
        throw InvalidConfig("S+ = S^{p,r+1} needs r+1 <= p-1 (p=" + std::to_string(p) +
                            ", r=" + std::to_string(r) + ")");
    return {UnivariateSpace(p, r + 1, space.elements()),
            UnivariateSpace(p - 1, r, space.elements())};
}

Eigen::VectorXd represent_exactly(const UnivariateSpace& space, const Sampler1D& f)
{
    const int p = space.degree();
    const int N = space.dim();
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(N);
    std::vector<bool> seen(N, false);
    double mismatch = 0.0;
    double scale = 0.0;

    std::vector<Eigen::VectorXd> local(space.elements());
    for (int e = 0; e < space.elements(); ++e) {
        const auto x = chebyshev_points(p + 1, space.breakpoint(e), space.breakpoint(e + 1));
        Eigen::MatrixXd A(p + 1, p + 1);
        Eigen::VectorXd rhs(p + 1);
        for (int k = 0; k <= p; ++k) {
            A.row(k) = space.eval_in(e, x[k], 0).d.row(0);
            rhs[k] = f(x[k]);
        }
        local[e] = A.partialPivLu().solve(rhs);
        scale = std::max(scale, local[e].cwiseAbs().maxCoeff());
        scale = std::max(scale, rhs.cwiseAbs().maxCoeff());
    }
    for (int e = 0; e < space.elements(); ++e) {
        const int first = space.first_active(e);
        for (int i = 0; i <= p; ++i) {
            const int j = first + i;
            if (!seen[j]) {
                coeffs[j] = local[e][i];
                seen[j] = true;
            } else {
                mismatch = std::max(mismatch, std::abs(coeffs[j] - local[e][i]));
            }
        }
    }
    // Off-node check catches functions that are not piecewise polynomial at all.
    for (int e = 0; e < space.elements(); ++e) {
        const double a = space.breakpoint(e), b = space.breakpoint(e + 1);
        for (double t : {0.5, 0.123456789}) {
            const double x = a + t * (b - a);
            const BasisValues bv = space.eval_in(e, x, 0);
            double s = 0.0;
            for (int i = 0; i <= p; ++i)
                s += bv.d(0, i) * coeffs[bv.first + i];
            mismatch = std::max(mismatch, std::abs(s - f(x)));
        }
    }
    if (scale > 0.0 && mismatch > kReconcileTol * scale) {
        std::ostringstream os;
        os << "function is not in S^{" << p << "," << space.regularity() << "}_h (n="
           << space.elements() << "): relative mismatch " << mismatch / scale;
        throw NotInSpace(os.str(), mismatch / scale);
    }
    return coeffs;
}

Eigen::MatrixXd represent_exactly(const UnivariateSpace& space, const Sampler2D& f)
{
    const int p = space.degree();
    const int N = space.dim();
    const int n = space.elements();
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(N, N);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(N, N, false);
    double mismatch = 0.0;
    double scale = 0.0;

    std::vector<std::vector<double>> pts(n);
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu(n);
    for (int e = 0; e < n; ++e) {
        pts[e] = chebyshev_points(p + 1, space.breakpoint(e), space.breakpoint(e + 1));
        Eigen::MatrixXd A(p + 1, p + 1);
        for (int k = 0; k <= p; ++k)
            A.row(k) = space.eval_in(e, pts[e][k], 0).d.row(0);
        lu[e] = A.partialPivLu();
    }
    for (int e2 = 0; e2 < n; ++e2) {
        for (int e1 = 0; e1 < n; ++e1) {
            Eigen::MatrixXd F(p + 1, p + 1);
            for (int k1 = 0; k1 <= p; ++k1)
                for (int k2 = 0; k2 <= p; ++k2)
                    F(k1, k2) = f(pts[e1][k1], pts[e2][k2]);
            scale = std::max(scale, F.cwiseAbs().maxCoeff());
            // F = A1 C A2^T
            Eigen::MatrixXd tmp = lu[e1].solve(F);
            Eigen::MatrixXd C = lu[e2].solve(tmp.transpose()).transpose();
            scale = std::max(scale, C.cwiseAbs().maxCoeff());
            const int f1 = space.first_active(e1), f2 = space.first_active(e2);
            for (int i1 = 0; i1 <= p; ++i1) {
                for (int i2 = 0; i2 <= p; ++i2) {
                    const int j1 = f1 + i1, j2 = f2 + i2;
                    if (!seen(j1, j2)) {
                        coeffs(j1, j2) = C(i1, i2);
                        seen(j1, j2) = true;
                    } else {
                        mismatch = std::max(mismatch, std::abs(coeffs(j1, j2) - C(i1, i2)));
                    }
                }
            }
        }
    }
    for (int e2 = 0; e2 < n; ++e2) {
        for (int e1 = 0; e1 < n; ++e1) {
            const double x1 = space.breakpoint(e1) + 0.3141592 * space.h();
            const double x2 = space.breakpoint(e2) + 0.5 * space.h();
            const BasisValues b1 = space.eval_in(e1, x1, 0);
            const BasisValues b2 = space.eval_in(e2, x2, 0);
            double s = 0.0;
            for (int i1 = 0; i1 <= p; ++i1)
                for (int i2 = 0; i2 <= p; ++i2)
                    s += b1.d(0, i1) * b2.d(0, i2) * coeffs(b1.first + i1, b2.first + i2);
            mismatch = std::max(mismatch, std::abs(s - f(x1, x2)));
        }
    }
    if (scale > 0.0 && mismatch > kReconcileTol * scale) {
        std::ostringstream os;
        os << "function is not in the tensor space S^{" << p << "," << space.regularity()
           << "}_h: relative mismatch " << mismatch / scale;
        throw NotInSpace(os.str(), mismatch / scale);
    }
    return coeffs;
}

Spline multiply_by_linear(const Spline& s, const Linear& l)
{
    const UnivariateSpace& src = s.space();
    UnivariateSpace target(src.degree() + 1, src.regularity(), src.elements());
    Eigen::VectorXd c = represent_exactly(target, [&](double xi) { return l(xi) * s(xi); });
    return Spline(std::move(target), std::move(c));
}

DualBasis::DualBasis(const UnivariateSpace& space) : space_(space)
{
    const int p = space.degree();
    const int N = space.dim();
    points_.resize(N);
    weights_.resize(N);
    for (int j = 0; j < N; ++j) {
        const auto [lo, hi] = space.support(j);
        const int e = (lo + hi - 1) / 2;
        const auto x = chebyshev_points(p + 1, space.breakpoint(e), space.breakpoint(e + 1));
        Eigen::MatrixXd A(p + 1, p + 1);
        for (int k = 0; k <= p; ++k)
            A.row(k) = space.eval_in(e, x[k], 0).d.row(0);
        const Eigen::MatrixXd inv = A.inverse();
        const int row = j - space.first_active(e);
        points_[j] = x;
        weights_[j].resize(p + 1);
        for (int k = 0; k <= p; ++k)
            weights_[j][k] = inv(row, k);
    }
}

double DualBasis::apply(int j, const Sampler1D& f) const
{
    double s = 0.0;
    for (std::size_t k = 0; k < points_[j].size(); ++k)
        s += weights_[j][k] * f(points_[j][k]);
    return s;
}

TensorJet eval_tensor(const UnivariateSpace& space, const Eigen::MatrixXd& coeffs, double xi1,
                      double xi2)
{
    const int p = space.degree();
    const int k = std::min(2, p);
    const BasisValues b1 = space.eval(xi1, k);
    const BasisValues b2 = space.eval(xi2, k);
    TensorJet t;
    for (int i2 = 0; i2 <= p; ++i2) {
        double c0 = 0, c1 = 0, c2 = 0;
        for (int i1 = 0; i1 <= p; ++i1) {
            const double c = coeffs(b1.first + i1, b2.first + i2);
            c0 += b1.d(0, i1) * c;
            c1 += b1.d(1, i1) * c;
            if (k >= 2)
                c2 += b1.d(2, i1) * c;
        }
        t.f += b2.d(0, i2) * c0;
        t.f1 += b2.d(0, i2) * c1;
        t.f2 += b2.d(1, i2) * c0;
        t.f11 += b2.d(0, i2) * c2;
        t.f12 += b2.d(1, i2) * c1;
        if (k >= 2)
            t.f22 += b2.d(2, i2) * c0;
    }
    return t;
}

} // namespace argyris
