#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace argyris {

/// Degree, regularity and element count of a uniform open-knot spline space on [0,1].
struct SpaceConfig {
    int p = 3;
    int r = 1;
    int n = 4;

    double h() const { return 1.0 / n; }

    /// Smallest element count admissible for the Argyris construction at (p, r).
    static int min_argyris_elements(int p, int r);

    /// Throws InvalidConfig unless r >= 1, r <= p-2 and n is large enough.
    void require_argyris() const;
    bool argyris_admissible() const;

    bool operator==(const SpaceConfig&) const = default;
};

/// Linear polynomial c0 + c1*xi.
struct Linear {
    double c0 = 0.0;
    double c1 = 0.0;

    double operator()(double xi) const { return c0 + c1 * xi; }
    double slope() const { return c1; }
};

/// Values of the p+1 B-splines active at a parameter, and their derivatives.
struct BasisValues {
    int first = 0;          ///< global index of the first active function
    Eigen::MatrixXd d;      ///< d(k, i): k-th derivative of b_{first+i}
};

/// Univariate spline space S^{p,r}_h with uniform open knots; interior
/// breakpoints carry multiplicity p-r.
class UnivariateSpace {
public:
    UnivariateSpace() = default;
    UnivariateSpace(int p, int r, int n);
    explicit UnivariateSpace(const SpaceConfig& c) : UnivariateSpace(c.p, c.r, c.n) {}

    int degree() const { return p_; }
    int regularity() const { return r_; }
    int elements() const { return n_; }
    int multiplicity() const { return p_ - r_; }
    double h() const { return 1.0 / n_; }
    int dim() const { return (p_ - r_) * (n_ - 1) + p_ + 1; }
    SpaceConfig config() const { return {p_, r_, n_}; }
    const std::vector<double>& knots() const { return knots_; }

    /// Element containing xi; right-continuous except at xi = 1.
    int element_of(double xi) const;
    int first_active(int element) const { return element * (p_ - r_); }
    double breakpoint(int e) const { return static_cast<double>(e) / n_; }

    /// First element / one-past-last element on which b_j is nonzero.
    std::pair<int, int> support(int j) const;

    /// All active B-splines at xi with derivatives up to order k (k <= p).
    BasisValues eval(double xi, int k) const;
    /// Same, but evaluated as the limit from inside `element`.
    BasisValues eval_in(int element, double xi, int k) const;

    double greville(int j) const;

    bool operator==(const UnivariateSpace& o) const
    {
        return p_ == o.p_ && r_ == o.r_ && n_ == o.n_;
    }

private:
    int p_ = 0;
    int r_ = 0;
    int n_ = 0;
    std::vector<double> knots_;
};

/// Chebyshev points of the first kind mapped to [a, b].
std::vector<double> chebyshev_points(int count, double a, double b);

/// A spline of a univariate space.
class Spline {
public:
    Spline() = default;
    Spline(UnivariateSpace space, Eigen::VectorXd coeffs);

    const UnivariateSpace& space() const { return space_; }
    const Eigen::VectorXd& coeffs() const { return coeffs_; }

    double operator()(double xi) const { return derivative(xi, 0); }
    double derivative(double xi, int k) const;

private:
    UnivariateSpace space_;
    Eigen::VectorXd coeffs_;
};

/// S+ = S^{p,r+1} and S- = S^{p-1,r} on the same breakpoints.
std::pair<UnivariateSpace, UnivariateSpace> derived_edge_spaces(const UnivariateSpace& space);

using Sampler1D = std::function<double(double)>;
using Sampler2D = std::function<double(double, double)>;

/// Coefficients of a function known to lie in `space`, recovered by per-element
/// Chebyshev interpolation. Shared coefficients must agree across elements.
Eigen::VectorXd represent_exactly(const UnivariateSpace& space, const Sampler1D& f);

/// Tensor version on space x space; result(j1, j2) multiplies b_j1(xi1) b_j2(xi2).
Eigen::MatrixXd represent_exactly(const UnivariateSpace& space, const Sampler2D& f);

/// l * s as a spline of degree q+1 and the same smoothness as s.
Spline multiply_by_linear(const Spline& s, const Linear& l);

/// Local-interpolation dual basis: lambda_j samples p+1 Chebyshev points of one
/// element in supp(b_j) and returns the j-th coordinate of the interpolant.
class DualBasis {
public:
    DualBasis() = default;
    explicit DualBasis(const UnivariateSpace& space);

    const UnivariateSpace& space() const { return space_; }

    /// Sample abscissae of lambda_j.
    const std::vector<double>& points(int j) const { return points_[j]; }
    /// Weights of lambda_j: lambda_j(f) = sum_k weights(j)[k] f(points(j)[k]).
    const std::vector<double>& weights(int j) const { return weights_[j]; }

    double apply(int j, const Sampler1D& f) const;

private:
    UnivariateSpace space_;
    std::vector<std::vector<double>> points_;
    std::vector<std::vector<double>> weights_;
};

/// Value and derivatives up to second order of a tensor spline at a point.
struct TensorJet {
    double f = 0, f1 = 0, f2 = 0, f11 = 0, f12 = 0, f22 = 0;
};

/// Evaluates sum c(j1,j2) b_j1(xi1) b_j2(xi2) and its derivatives up to order 2.
TensorJet eval_tensor(const UnivariateSpace& space, const Eigen::MatrixXd& coeffs,
                      double xi1, double xi2);

} // namespace argyris
