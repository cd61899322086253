#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "argyris/bspline.hpp"
#include "argyris/gluing.hpp"
#include "argyris/multipatch.hpp"

namespace argyris {

enum class BasisKind { Patch, Edge, Vertex };

std::string to_string(BasisKind k);

/// Identifies a basis function: owner is a patch, edge or vertex id; (j1, j2) is
/// the tensor index (patch), the (trace/derivative) index (edge) or the monomial
/// exponent (vertex).
struct BasisId {
    BasisKind kind = BasisKind::Patch;
    int owner = 0;
    int j1 = 0;
    int j2 = 0;
    bool operator==(const BasisId&) const = default;
};

/// One coefficient of a pullback f = phi o F^(patch), in the patch's own indexing.
struct CoefEntry {
    int patch;
    int j1;
    int j2;
    double value;
};

/// A function of the space, stored as its nonzero pullback coefficients.
struct ArgyrisFunction {
    BasisId id;
    std::vector<CoefEntry> entries;

    /// Dense N x N coefficient grid on one patch (zero if absent).
    Eigen::MatrixXd block(int patch, int N) const;
    std::vector<int> patches() const;
};

/// Value, gradient and Hessian of a function at a point.
struct C2Data {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
    Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

struct DimensionBreakdown {
    int patch = 0;
    int edge = 0;
    int vertex = 0;
    int total() const { return patch + edge + vertex; }
};

/// Closed-form dimension: patches (N-4)^2 + edges (2N^- - 9) + vertices 6.
DimensionBreakdown dimension_formula(const SpaceConfig& c, int patches, int edges, int vertices);

/// Breakdown for a geometry's topology without building the basis.
DimensionBreakdown dimension_of(const MultiPatch& mp);

/// sigma = (h / (p nu) sum_l |grad G_l(0,0)|_F)^(-1) over the vertex standard form.
double vertex_scaling(const std::vector<Patch>& vertex_patches, const UnivariateSpace& space);

/// Physical value/gradient/Hessian from the parametric jet of f = phi o F.
C2Data physical_jet(const PatchJet& F, const TensorJet& f);

/// Parametric derivatives of phi o F up to second order, from physical data.
TensorJet parametric_jet(const PatchJet& F, const C2Data& phi);

/// Per-edge transfer matrices mapping S+ / S- coefficients to the columns of
/// the pullbacks on the two adjacent patches.
struct EdgeTransfer {
    Eigen::MatrixXd trace;   ///< N x N+: T in S^{p,r}
    Eigen::MatrixXd beta1;   ///< N x N+: beta1 T'
    Eigen::MatrixXd beta2;   ///< N x N+: beta2 T'
    Eigen::MatrixXd alpha1;  ///< N x N-: alpha1 D
    Eigen::MatrixXd alpha2;  ///< N x N-: alpha2 D
};

class ArgyrisSpace {
public:
    /// Builds the space; throws InvalidConfig when the spline space is not admissible
    /// and NotASG1 when an interface is not analysis-suitable.
    explicit ArgyrisSpace(MultiPatch geometry, double asg1_tol = 1e-9);

    const MultiPatch& geometry() const { return mp_; }
    const UnivariateSpace& space() const { return space_; }
    const UnivariateSpace& splus() const { return splus_; }
    const UnivariateSpace& sminus() const { return sminus_; }
    int n_ctrl() const { return space_.dim(); }

    int dim() const { return static_cast<int>(functions_.size()); }
    DimensionBreakdown breakdown() const { return breakdown_; }
    const std::vector<ArgyrisFunction>& functions() const { return functions_; }
    const ArgyrisFunction& function(int a) const { return functions_[a]; }

    /// Gluing data of an edge in its own standard form (alpha = 1, beta = 0 on the boundary).
    const GluingData& gluing(int edge) const { return gluing_[edge]; }
    double sigma(int vertex) const { return sigma_[vertex]; }

    /// Standard-form patches of an edge (one for boundary edges).
    const std::vector<Patch>& edge_patches(int edge) const { return edge_patches_[edge]; }

    /// dim x N^2 matrix: row a holds the pullback of function a on the patch,
    /// tensor index j1 + N * j2.
    const Eigen::SparseMatrix<double>& extraction(int patch) const { return extraction_[patch]; }

    /// Pullback of sum_a c_a phi_a on one patch as an N x N grid.
    Eigen::MatrixXd patch_coefficients(const Eigen::VectorXd& c, int patch) const;

    /// Parametric jet of sum_a c_a phi_a on a patch.
    TensorJet evaluate(const Eigen::VectorXd& c, int patch, double xi1, double xi2) const;
    /// Physical value, gradient and Hessian of sum_a c_a phi_a.
    C2Data evaluate_physical(const Eigen::VectorXd& c, int patch, double xi1, double xi2) const;
    /// Same for a single basis function.
    C2Data evaluate_basis(int a, int patch, double xi1, double xi2) const;

    /// Alternating-sum vertex projector for the given C2 data at the vertex.
    ArgyrisFunction vertex_projector(int vertex, const C2Data& data) const;

    /// Coefficient columns of the edge function with trace t in S+ and scaled
    /// transversal derivative d in S- (edge's own standard form).
    ArgyrisFunction edge_function(int edge, const Eigen::VectorXd& t, const Eigen::VectorXd& d) const;

    /// Index of a basis function by id, or -1.
    int find(const BasisId& id) const;

private:
    void build_transfers(double tol);
    void build_patch_functions();
    void build_edge_functions();
    void build_vertex_functions();
    void build_extraction();

    EdgeTransfer make_transfer(const GluingData& g, int nplus, int nminus) const;
    void add_edge_columns(std::map<int, Eigen::MatrixXd>& out, const EdgeTransfer& tr,
                          const Eigen::VectorXd& t, const Eigen::VectorXd& d, int patch1,
                          int kappa1, int patch2, int kappa2) const;

    MultiPatch mp_;
    UnivariateSpace space_;
    UnivariateSpace splus_;
    UnivariateSpace sminus_;
    Eigen::MatrixXd trace_embed_;
    Eigen::Matrix3d cplus_;
    Eigen::Matrix2d cminus_;
    std::vector<GluingData> gluing_;
    std::vector<std::vector<Patch>> edge_patches_;
    std::vector<EdgeTransfer> transfer_;
    std::vector<double> sigma_;
    std::vector<ArgyrisFunction> functions_;
    std::vector<Eigen::SparseMatrix<double>> extraction_;
    DimensionBreakdown breakdown_;
};

} // namespace argyris
