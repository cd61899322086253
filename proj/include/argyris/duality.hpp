#pragma once

#include <functional>

#include "argyris/argyris_space.hpp"

namespace argyris {

/// Physical C2 data at the image of (xi1, xi2) under a patch map. Implementations
/// must be safe to call concurrently.
using C2Field = std::function<C2Data(int patch, double xi1, double xi2)>;

/// Field of a globally defined function given at physical points; keeps a
/// reference to mp.
C2Field analytic_field(const MultiPatch& mp, std::function<C2Data(const Vec2&)> f);

/// Field of sum_a c_a phi_a; keeps a reference to the space's geometry.
C2Field space_field(const ArgyrisSpace& space, const Eigen::VectorXd& c);

/// Field of the single basis function a.
C2Field basis_field(const ArgyrisSpace& space, int a);

/// Dual functionals for every basis function and the global projector.
class Duality {
public:
    explicit Duality(const ArgyrisSpace& space);

    const ArgyrisSpace& space() const { return *space_; }

    /// Tensor dual lambda_j1 x lambda_j2 of the pullback on one patch.
    double patch_dual(int patch, int j1, int j2, const C2Field& phi) const;
    /// s = 0: lambda+_j of the trace; s = 1: lambda-_j of (h/p) grad(phi) . d.
    double edge_dual(int edge, int j, int s, const C2Field& phi) const;
    /// Scaled derivative d^j phi(x_v) / sigma^|j|.
    double vertex_dual(int vertex, int j1, int j2, const C2Field& phi) const;

    /// Functional dual to basis function a.
    double apply(int a, const C2Field& phi) const;

    /// Coefficients of the projection of phi onto the space (parallel over functionals).
    Eigen::VectorXd project(const C2Field& phi) const;
    Eigen::VectorXd project_serial(const C2Field& phi) const;

    /// M(a, b) = (dual a)(basis b).
    Eigen::MatrixXd biorthogonality_matrix() const;

private:
    const ArgyrisSpace* space_;
    DualBasis dual_;
    DualBasis dual_plus_;
    DualBasis dual_minus_;
};

} // namespace argyris
