#pragma once

#include <vector>

#include "argyris/bspline.hpp"
#include "argyris/multipatch.hpp"

namespace argyris {

/// The three determinants D1 = det[d1F1, d2F1](0,xi), D2 = det[d1F2, d2F2](xi,0) and
/// D12 = det[d2F2(xi,0), d1F1(0,xi)] sampled at per-element Chebyshev points.
struct ExactGluing {
    int degree = 0;             ///< polynomial degree bound of the determinants
    std::vector<double> xi;
    std::vector<double> D1, D2, D12;
};

/// Determinants (D1, D2, D12) at one interface parameter.
Eigen::Vector3d gluing_determinants(const Patch& F1, const Patch& F2, double xi);

/// Samples the determinants; throws NonConformingGeometry if (F1, F2) is not in
/// standard form.
ExactGluing exact_gluing(const Patch& F1, const Patch& F2);

/// Quadratic c0 + c1 xi + c2 xi^2.
struct Quadratic {
    double c0 = 0, c1 = 0, c2 = 0;
    double operator()(double xi) const { return c0 + xi * (c1 + xi * c2); }
    double derivative(double xi) const { return c1 + 2 * c2 * xi; }
};

/// Linear gluing data of one interface in standard form.
struct GluingData {
    Linear alpha1{1.0, 0.0};
    Linear alpha2{1.0, 0.0};
    Linear beta1{0.0, 0.0};
    Linear beta2{0.0, 0.0};
    Quadratic beta;
    double residual = 0.0;
    bool asg1 = true;
    bool boundary = false;
    /// Number of singular values below tolerance in the alpha fit.
    int null_dim = 1;

    /// Data seen from the other end: patches swapped, xi -> 1 - xi.
    GluingData reversed() const;
};

/// Fits linear gluing data and reports the AS-G1 verdict without throwing NotASG1.
GluingData fit_gluing(const Patch& F1, const Patch& F2, double tol = 1e-9);

/// Same as fit_gluing, but throws NotASG1 when the interface is not analysis-suitable.
GluingData fit_asg1(const Patch& F1, const Patch& F2, double tol = 1e-9);

/// alpha = 1, beta = 0 for a boundary edge.
GluingData boundary_gluing();

/// Max over samples of |alpha1 d2F2 + alpha2 d1F1 + beta d2F1| / (|d1F1| + |d2F1|).
double g1_residual(const GluingData& g, const Patch& F1, const Patch& F2, int samples = 200);

struct Transversal {
    Vec2 d;
    Vec2 dprime;
};

/// d = (d1F1(0,xi) + beta1 d2F1(0,xi)) / alpha1 and its derivative.
Transversal transversal_vector(const GluingData& g, const Patch& F1, double xi);

/// d = -(d2F2(xi,0) + beta2 d1F2(xi,0)) / alpha2 and its derivative.
Transversal transversal_vector_from_second(const GluingData& g, const Patch& F2, double xi);

} // namespace argyris
