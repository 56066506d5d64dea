#pragma once

#include <type_traits>

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace alp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform 1D mesh of the interval [a, b].
struct Mesh1D {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> nodes;
    double h = 0.0;

    std::size_t size() const { return nodes.size(); }
};

enum class BoundaryFlag : int { Interior = 0, Dirichlet = 1, Neumann = 2 };

/// Triangulation of a planar domain with per-vertex boundary markers.
struct TriMesh {
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryFlag> boundary_flags;

    std::size_t size() const { return vertices.size(); }
};

enum class BoundaryCondition { Dirichlet, Neumann };

/// One quadrature point of the element-wise cubature, expressed directly on the
/// active degrees of freedom. Shape functions of eliminated (Dirichlet) nodes are
/// dropped, so `count` may be smaller than the number of element vertices.
struct QuadPoint {
    double weight = 0.0;
    int count = 0;
    std::array<int, 3> dofs{};
    std::array<double, 3> shape{};
    std::array<double, 3> dshape_dx{};
};

/// Assembled P1 operators on the active (non-eliminated) nodes.
struct FemOperators {
    SparseMatrix mass;        // G_ij = <v_j, v_i>
    SparseMatrix stiffness;   // K_ij = <grad v_j, grad v_i>
    SparseMatrix convection;  // C_ij = <d/dx v_j, v_i>, 1D only
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    int dim = 1;

    std::vector<int> active_to_node;
    std::vector<int> node_to_active;  // -1 for eliminated nodes

    /// Cubature exact for cubic integrands on every element (2-point Gauss in 1D,
    /// 4-point degree-3 rule on triangles).
    std::vector<QuadPoint> cubature;

    /// Active node coordinates, x (and y in 2D).
    std::vector<std::array<double, 2>> coords;

    Eigen::Index n_active() const { return mass.rows(); }
    double measure() const;  // |Omega| recovered from the cubature
};

Mesh1D build_uniform_mesh_1d(double a, double b, int n_nodes);
TriMesh build_structured_square_mesh(int n_per_side, BoundaryFlag boundary = BoundaryFlag::Neumann);

/// Validates TriMesh invariants and orients every triangle counter-clockwise.
void validate_and_orient(TriMesh& mesh);

FemOperators assemble(const Mesh1D& mesh, BoundaryCondition bc);
FemOperators assemble(const TriMesh& mesh, BoundaryCondition bc);

/// Entries <u v_j, v_i> for the P1 interpolant u of `u_active` (values on active nodes).
SparseMatrix assemble_weighted_mass(const FemOperators& fem, const Vector& u_active);

/// Nodal values of a function on the active nodes.
template <class F>
Vector sample_active(const FemOperators& fem, F&& f)
{
    Vector out(fem.n_active());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const auto& p = fem.coords[static_cast<std::size_t>(i)];
        if constexpr (std::is_invocable_v<F, double, double>)
            out[i] = fem.dim == 1 ? f(p[0], 0.0) : f(p[0], p[1]);
        else
            out[i] = f(p[0]);
    }
    return out;
}

/// Expands active-node values to all mesh nodes (eliminated nodes get 0).
Vector expand_to_nodes(const FemOperators& fem, const Vector& active, std::size_t n_nodes);

double g_inner(const FemOperators& fem, const Vector& u, const Vector& v);
double g_norm(const FemOperators& fem, const Vector& u);

// Plain-text mesh format:
//   <n_vertices>
//   x y            (one line per vertex)
//   <n_triangles>
//   i j k          (zero-based vertex indices)
//   flag_0 ... flag_{n_vertices-1}   (0 interior, 1 Dirichlet, 2 Neumann)
void write_mesh(std::ostream& out, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in);
TriMesh read_mesh_file(const std::string& path);

}  // namespace alp
