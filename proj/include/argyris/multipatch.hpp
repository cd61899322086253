#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "argyris/bspline.hpp"

namespace argyris {

using Vec2 = Eigen::Vector2d;

/// Position and parametric derivatives up to order 2 of a patch map.
struct PatchJet {
    Vec2 x, d1, d2, d11, d12, d22;

    Eigen::Matrix2d jacobian() const
    {
        Eigen::Matrix2d J;
        J.col(0) = d1;
        J.col(1) = d2;
        return J;
    }
    double det() const { return d1.x() * d2.y() - d1.y() * d2.x(); }
};

/// Tensor-product spline map F: [0,1]^2 -> R^2. Control points are stored as
/// two N x N grids indexed (j1, j2).
struct Patch {
    UnivariateSpace space;
    Eigen::MatrixXd X;
    Eigen::MatrixXd Y;

    int n_ctrl() const { return space.dim(); }
    Vec2 ctrl(int j1, int j2) const { return {X(j1, j2), Y(j1, j2)}; }
    Vec2 operator()(double xi1, double xi2) const;
    PatchJet jet(double xi1, double xi2) const;
};

/// Parameter of corner kappa: F o r^kappa maps (0,0) there.
Eigen::Vector2d corner_parameter(int kappa);

/// The rotation r(xi1, xi2) = (1 - xi2, xi1) applied kappa times.
Eigen::Vector2d rotate_parameter(Eigen::Vector2d xi, int kappa);

/// Index into the original net of coefficient (j1, j2) of F o r^kappa.
std::pair<int, int> rotate_index(int N, int j1, int j2, int kappa);

/// F o r^kappa, realized as an exact permutation of the control net.
Patch rotate_patch(const Patch& patch, int kappa);

/// Minimum of det[d1F, d2F] on an m x m grid over [0,1]^2 (endpoints included).
double check_regularity(const Patch& patch, int m);

enum class EdgeKind { Interface, Boundary };
enum class VertexKind { Interior, Boundary };

/// (patch, local side) or (patch, local corner).
struct LocalIndex {
    int patch = 0;
    int kappa = 0;
    bool operator==(const LocalIndex&) const = default;
};

struct EdgeRecord {
    int id = 0;
    EdgeKind kind = EdgeKind::Boundary;
    std::vector<LocalIndex> locals;
    bool operator==(const EdgeRecord&) const = default;
};

struct VertexRecord {
    int id = 0;
    VertexKind kind = VertexKind::Interior;
    /// Counterclockwise list of (patch, corner).
    std::vector<LocalIndex> patches;

    int valence() const { return static_cast<int>(patches.size()); }
    bool operator==(const VertexRecord&) const = default;
};

/// Side of F o r^kappa that carries the edge entering the corner (its xi2 = 0 side).
inline int side_before(int corner) { return (corner + 1) % 4; }
/// Side of F o r^kappa that carries the edge leaving the corner (its xi1 = 0 side).
inline int side_after(int corner) { return corner; }

class MultiPatch {
public:
    SpaceConfig config;
    std::vector<Patch> patches;
    std::vector<EdgeRecord> edges;
    std::vector<VertexRecord> vertices;

    UnivariateSpace space() const { return UnivariateSpace(config); }

    int num_interfaces() const;
    int num_boundary_edges() const;
    int num_interior_vertices() const;

    /// Global edge holding (patch, side); rebuilt by index().
    int edge_of(int patch, int side) const { return edge_of_[patch][side]; }
    int vertex_of(int patch, int corner) const { return vertex_of_[patch][corner]; }

    /// Rebuilds lookup tables and checks the partition property.
    void index();

    /// Full validation: partition, corner coincidence, ordering, conformity and
    /// regularity. Throws TopologyError, NonConformingGeometry or InvalidGeometry.
    void validate(int samples_per_element = 4, double tol = 1e-12) const;

    /// Largest interface mismatch |F1(0,xi) - F2(xi,0)| over 50 samples per interface.
    double max_interface_gap() const;

private:
    std::vector<std::array<int, 4>> edge_of_;
    std::vector<std::array<int, 4>> vertex_of_;
};

/// Standard form for an edge: (F^{i1} o r^{k1}, F^{i2} o r^{k2-1}); boundary edges
/// return a single patch.
std::vector<Patch> standard_form_edge(const MultiPatch& mp, const EdgeRecord& edge,
                                      double tol = 1e-12);

/// Standard form for a vertex: F^{i_l} o r^{k_l} in counterclockwise order.
std::vector<Patch> standard_form_vertex(const MultiPatch& mp, const VertexRecord& vertex,
                                        double tol = 1e-12);

/// Nested refinement n -> factor * n; exact knot insertion.
MultiPatch refine(const MultiPatch& mp, int factor);

/// Builds edges and vertices from coincident sides and corners.
void infer_topology(MultiPatch& mp, double tol = 1e-12);

/// Multi-patch domain of bilinear quads given by corners (F(0,0), F(1,0), F(1,1), F(0,1)).
MultiPatch bilinear_multipatch(const SpaceConfig& config,
                               const std::vector<std::array<Vec2, 4>>& quads);

/// Names accepted by builtin_geometry.
const std::vector<std::string>& builtin_names();
MultiPatch builtin_geometry(const std::string& name, const SpaceConfig& config);

MultiPatch load_geometry(const std::string& path);
MultiPatch parse_geometry(const std::string& text);
void save_geometry(const MultiPatch& mp, const std::string& path);
std::string format_geometry(const MultiPatch& mp);

} // namespace argyris
