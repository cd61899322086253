#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "argyris/argyris_space.hpp"

namespace argyris {

using ScalarField = std::function<double(const Vec2&)>;

/// Gauss-Legendre rule with g points on [0,1].
struct QuadratureRule {
    int g = 0;
    std::vector<double> x;
    std::vector<double> w;

    static QuadratureRule gauss(int g);
};

/// Default quadrature order p + 2 per direction.
int default_quadrature_order(const UnivariateSpace& space);

/// Tensor-spline mass matrix of one patch, N^2 x N^2, tensor index j1 + N * j2.
/// Element contributions are computed in parallel and scattered in element order,
/// so the result is bit-identical to the serial twin.
Eigen::SparseMatrix<double> patch_mass(const Patch& patch, const QuadratureRule& q);
Eigen::SparseMatrix<double> patch_mass_serial(const Patch& patch, const QuadratureRule& q);

/// Load vector int z b_j |det grad F| of one patch.
Eigen::VectorXd patch_load(const Patch& patch, const ScalarField& z, const QuadratureRule& q);
Eigen::VectorXd patch_load_serial(const Patch& patch, const ScalarField& z, const QuadratureRule& q);

/// Squared L2 norms of (u - z) and z on one patch, u given by its N x N grid.
struct L2Parts {
    double error2 = 0.0;
    double norm2 = 0.0;
};
L2Parts patch_l2(const Patch& patch, const Eigen::MatrixXd& u, const ScalarField& z,
                 const QuadratureRule& q);
L2Parts patch_l2_serial(const Patch& patch, const Eigen::MatrixXd& u, const ScalarField& z,
                        const QuadratureRule& q);

/// Global mass matrix and load vector of the space.
Eigen::SparseMatrix<double> assemble_mass(const ArgyrisSpace& space, const QuadratureRule& q,
                                          bool parallel = true);
Eigen::VectorXd assemble_load(const ArgyrisSpace& space, const ScalarField& z,
                              const QuadratureRule& q, bool parallel = true);

/// Absolute and relative L2 error of sum_a c_a phi_a against z.
struct L2Error {
    double absolute = 0.0;
    double relative = 0.0;
    double norm = 0.0;
};
L2Error l2_error(const ArgyrisSpace& space, const Eigen::VectorXd& c, const ScalarField& z,
                 const QuadratureRule& q, bool parallel = true);

struct SolveReport {
    std::string method;
    double residual = 0.0;  ///< |M c - f| / |f| (0 when f = 0)
    int iterations = 0;
};

/// Solves M c = f after symmetric diagonal scaling. Dense LDLT up to dense_limit
/// unknowns, sparse Cholesky beyond, conjugate gradients as fallback.
Eigen::VectorXd solve_scaled(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& f,
                             SolveReport& report, int dense_limit = 4000, double cg_tol = 1e-12);

struct FitOptions {
    int quad_order = 0;     ///< assembly rule; 0 selects p + 2
    int error_order = 0;    ///< verification rule for the reported error; 0 selects quad_order + 3
    bool parallel = true;
    int dense_limit = 4000;
    double cg_tol = 1e-12;
};

struct FitResult {
    Eigen::VectorXd coeffs;
    double rel_error = 0.0;   ///< with the verification rule
    double abs_error = 0.0;
    double rel_error_assembly_rule = 0.0;
    double h = 0.0;
    int dim = 0;
    double assembly_seconds = 0.0;
    double solve_seconds = 0.0;
    SolveReport solve;
};

/// Galerkin L2 projection of z onto the space.
FitResult l2_fit(const ArgyrisSpace& space, const ScalarField& z, const FitOptions& opt = {});

/// log2(coarse / fine).
double ecr(double coarse_error, double fine_error);

struct ConvergenceRow {
    double h = 0.0;
    int dim = 0;
    double error = 0.0;
    std::optional<double> rate;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    /// All errors below 1e-10: z lies in the space and rates are meaningless.
    bool in_space = false;

    std::string text() const;
    std::string csv() const;
};

/// Fits z on each level n of a geometry family and tabulates errors and rates.
ConvergenceTable convergence_study(const std::function<MultiPatch(int n)>& family,
                                   const ScalarField& z, const std::vector<int>& levels,
                                   const FitOptions& opt = {});

struct SmoothnessReport {
    std::vector<double> interface_jump;  ///< per edge id, 0 for boundary edges
    std::vector<double> vertex_jump;     ///< per vertex id
    double max_c1 = 0.0;
    double max_c2 = 0.0;
};

/// Relative C1 jumps across interfaces and C2 jumps at vertices of a piecewise
/// function given by its per-patch N x N coefficient grids.
SmoothnessReport smoothness_report(const MultiPatch& mp, const std::vector<Eigen::MatrixXd>& grids,
                                   int samples_per_edge = 200);

/// Same for sum_a c_a phi_a.
SmoothnessReport smoothness_report(const ArgyrisSpace& space, const Eigen::VectorXd& c,
                                   int samples_per_edge = 200);

/// Worst jumps over all basis functions.
SmoothnessReport basis_smoothness(const ArgyrisSpace& space, int samples_per_edge = 200);

} // namespace argyris
