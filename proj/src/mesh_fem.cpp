#include "alp/mesh_fem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace alp {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(Eigen::Index n, const std::vector<Triplet>& t)
{
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

double signed_area(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                   const std::array<double, 2>& p2)
{
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

// Degree-3 rule on the reference triangle (barycentric coordinates, weights sum to 1).
constexpr std::array<std::array<double, 4>, 4> kTriangleRule = {{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -27.0 / 48.0},
    {0.6, 0.2, 0.2, 25.0 / 48.0},
    {0.2, 0.6, 0.2, 25.0 / 48.0},
    {0.2, 0.2, 0.6, 25.0 / 48.0},
}};

void setup_active(FemOperators& fem, std::size_t n_nodes, const std::vector<bool>& eliminated)
{
    fem.node_to_active.assign(n_nodes, -1);
    fem.active_to_node.clear();
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (eliminated[i])
            continue;
        fem.node_to_active[i] = static_cast<int>(fem.active_to_node.size());
        fem.active_to_node.push_back(static_cast<int>(i));
    }
}

}  // namespace

double FemOperators::measure() const
{
    double s = 0.0;
    for (const auto& q : cubature)
        s += q.weight;
    return s;
}

Mesh1D build_uniform_mesh_1d(double a, double b, int n_nodes)
{
    if (n_nodes < 3)
        throw MeshError("build_uniform_mesh_1d: need at least 3 nodes, got " + std::to_string(n_nodes));
    if (!(a < b))
        throw MeshError("build_uniform_mesh_1d: empty interval");
    Mesh1D m;
    m.a = a;
    m.b = b;
    m.h = (b - a) / (n_nodes - 1);
    m.nodes.resize(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i)
        m.nodes[static_cast<std::size_t>(i)] = a + i * m.h;
    m.nodes.back() = b;
    return m;
}

TriMesh build_structured_square_mesh(int n_per_side, BoundaryFlag boundary)
{
    if (n_per_side < 2)
        throw MeshError("build_structured_square_mesh: need at least 2 vertices per side");
    const int n = n_per_side;
    const double h = 1.0 / (n - 1);
    TriMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(n * n));
    mesh.boundary_flags.reserve(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            mesh.vertices.push_back({i * h, j * h});
            const bool on_boundary = i == 0 || j == 0 || i == n - 1 || j == n - 1;
            mesh.boundary_flags.push_back(on_boundary ? boundary : BoundaryFlag::Interior);
        }
    }
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            const int bl = j * n + i;
            const int br = bl + 1;
            const int tl = bl + n;
            const int tr = tl + 1;
            // diagonals mirrored across x = 1/2
            if (2 * i < n - 1) {
                mesh.triangles.push_back({bl, br, tr});
                mesh.triangles.push_back({bl, tr, tl});
            } else {
                mesh.triangles.push_back({bl, br, tl});
                mesh.triangles.push_back({br, tr, tl});
            }
        }
    }
    return mesh;
}

void validate_and_orient(TriMesh& mesh)
{
    const auto nv = static_cast<int>(mesh.vertices.size());
    if (mesh.boundary_flags.size() != mesh.vertices.size())
        throw MeshError("mesh: boundary flag count does not match vertex count");
    std::vector<int> use(mesh.vertices.size(), 0);
    std::map<std::pair<int, int>, int> edge_count;
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        auto& t = mesh.triangles[e];
        for (int v : t)
            if (v < 0 || v >= nv)
                throw MeshError("mesh: triangle " + std::to_string(e) + " references missing vertex");
        double area = signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
        if (area == 0.0)
            throw MeshError("mesh: triangle " + std::to_string(e) + " is degenerate");
        if (area < 0.0)
            std::swap(t[1], t[2]);
        for (int k = 0; k < 3; ++k) {
            ++use[static_cast<std::size_t>(t[k])];
            int a = t[k], b = t[(k + 1) % 3];
            ++edge_count[{std::min(a, b), std::max(a, b)}];
        }
    }
    for (std::size_t v = 0; v < use.size(); ++v)
        if (use[v] == 0)
            throw MeshError("mesh: vertex " + std::to_string(v) + " is not used by any triangle");
    std::vector<bool> on_boundary(mesh.vertices.size(), false);
    for (const auto& [edge, count] : edge_count) {
        if (count == 1) {
            on_boundary[static_cast<std::size_t>(edge.first)] = true;
            on_boundary[static_cast<std::size_t>(edge.second)] = true;
        }
    }
    for (std::size_t v = 0; v < use.size(); ++v)
        if (mesh.boundary_flags[v] != BoundaryFlag::Interior && !on_boundary[v])
            throw MeshError("mesh: vertex " + std::to_string(v) + " flagged as boundary but not on a boundary edge");
}

FemOperators assemble(const Mesh1D& mesh, BoundaryCondition bc)
{
    const std::size_t n = mesh.nodes.size();
    if (n < 2)
        throw AssemblyError("assemble: 1D mesh needs at least 2 nodes");
    FemOperators fem;
    fem.bc = bc;
    fem.dim = 1;
    std::vector<bool> eliminated(n, false);
    if (bc == BoundaryCondition::Dirichlet)
        eliminated.front() = eliminated.back() = true;
    setup_active(fem, n, eliminated);
    const auto na = static_cast<Eigen::Index>(fem.active_to_node.size());
    for (int node : fem.active_to_node)
        fem.coords.push_back({mesh.nodes[static_cast<std::size_t>(node)], 0.0});

    std::vector<Triplet> tm, tk, tc;
    const double g = 1.0 / std::sqrt(3.0);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double x0 = mesh.nodes[e];
        const double h = mesh.nodes[e + 1] - x0;
        if (!(h > 0.0))
            throw AssemblyError("assemble: element " + std::to_string(e) + " has non-positive length");
        const std::array<int, 2> dof = {fem.node_to_active[e], fem.node_to_active[e + 1]};
        const double mloc[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
        const double kloc[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
        const double cloc[2][2] = {{-0.5, 0.5}, {-0.5, 0.5}};
        for (int i = 0; i < 2; ++i) {
            if (dof[i] < 0)
                continue;
            for (int j = 0; j < 2; ++j) {
                if (dof[j] < 0)
                    continue;
                tm.emplace_back(dof[i], dof[j], mloc[i][j]);
                tk.emplace_back(dof[i], dof[j], kloc[i][j]);
                tc.emplace_back(dof[i], dof[j], cloc[i][j]);
            }
        }
        for (double s : {0.5 * (1.0 - g), 0.5 * (1.0 + g)}) {
            QuadPoint q;
            q.weight = 0.5 * h;
            const double sv[2] = {1.0 - s, s};
            const double dv[2] = {-1.0 / h, 1.0 / h};
            for (int i = 0; i < 2; ++i) {
                if (dof[i] < 0)
                    continue;
                q.dofs[q.count] = dof[i];
                q.shape[q.count] = sv[i];
                q.dshape_dx[q.count] = dv[i];
                ++q.count;
            }
            fem.cubature.push_back(q);
        }
    }
    fem.mass = from_triplets(na, tm);
    fem.stiffness = from_triplets(na, tk);
    fem.convection = from_triplets(na, tc);
    return fem;
}

FemOperators assemble(const TriMesh& mesh_in, BoundaryCondition bc)
{
    TriMesh mesh = mesh_in;
    validate_and_orient(mesh);
    FemOperators fem;
    fem.bc = bc;
    fem.dim = 2;
    const std::size_t n = mesh.vertices.size();
    std::vector<bool> eliminated(n, false);
    for (std::size_t v = 0; v < n; ++v) {
        const auto f = mesh.boundary_flags[v];
        eliminated[v] = (bc == BoundaryCondition::Dirichlet) ? f != BoundaryFlag::Interior
                                                              : f == BoundaryFlag::Dirichlet;
    }
    setup_active(fem, n, eliminated);
    const auto na = static_cast<Eigen::Index>(fem.active_to_node.size());
    for (int node : fem.active_to_node)
        fem.coords.push_back(mesh.vertices[static_cast<std::size_t>(node)]);

    double scale = 0.0;
    for (const auto& p : mesh.vertices)
        scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
    const double area_tol = 1e-14 * std::max(scale * scale, 1e-300);

    std::vector<Triplet> tm, tk;
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto& t = mesh.triangles[e];
        const auto& p0 = mesh.vertices[static_cast<std::size_t>(t[0])];
        const auto& p1 = mesh.vertices[static_cast<std::size_t>(t[1])];
        const auto& p2 = mesh.vertices[static_cast<std::size_t>(t[2])];
        const double area = signed_area(p0, p1, p2);
        if (!(area > area_tol))
            throw AssemblyError("assemble: triangle " + std::to_string(e) + " has zero area");
        const std::array<const std::array<double, 2>*, 3> p = {&p0, &p1, &p2};
        std::array<std::array<double, 2>, 3> grad;
        for (int i = 0; i < 3; ++i) {
            const auto& pj = *p[(i + 1) % 3];
            const auto& pk = *p[(i + 2) % 3];
            grad[i] = {(pj[1] - pk[1]) / (2.0 * area), (pk[0] - pj[0]) / (2.0 * area)};
        }
        std::array<int, 3> dof;
        for (int i = 0; i < 3; ++i)
            dof[i] = fem.node_to_active[static_cast<std::size_t>(t[i])];
        for (int i = 0; i < 3; ++i) {
            if (dof[i] < 0)
                continue;
            for (int j = 0; j < 3; ++j) {
                if (dof[j] < 0)
                    continue;
                tm.emplace_back(dof[i], dof[j], area / 12.0 * (i == j ? 2.0 : 1.0));
                tk.emplace_back(dof[i], dof[j], area * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]));
            }
        }
        for (const auto& r : kTriangleRule) {
            QuadPoint q;
            q.weight = r[3] * area;
            for (int i = 0; i < 3; ++i) {
                if (dof[i] < 0)
                    continue;
                q.dofs[q.count] = dof[i];
                q.shape[q.count] = r[i];
                q.dshape_dx[q.count] = grad[i][0];
                ++q.count;
            }
            fem.cubature.push_back(q);
        }
    }
    fem.mass = from_triplets(na, tm);
    fem.stiffness = from_triplets(na, tk);
    return fem;
}

SparseMatrix assemble_weighted_mass(const FemOperators& fem, const Vector& u_active)
{
    if (u_active.size() != fem.n_active())
        throw AssemblyError("assemble_weighted_mass: expected " + std::to_string(fem.n_active()) +
                            " nodal values, got " + std::to_string(u_active.size()));
    // Element-wise interpolation of u needs eliminated shapes too; they carry u = 0.
    std::vector<Triplet> t;
    t.reserve(fem.cubature.size() * 9);
    for (const auto& q : fem.cubature) {
        double uq = 0.0;
        for (int a = 0; a < q.count; ++a)
            uq += q.shape[a] * u_active[q.dofs[a]];
        for (int a = 0; a < q.count; ++a)
            for (int b = 0; b < q.count; ++b)
                t.emplace_back(q.dofs[a], q.dofs[b], q.weight * uq * q.shape[a] * q.shape[b]);
    }
    return from_triplets(fem.n_active(), t);
}

Vector expand_to_nodes(const FemOperators& fem, const Vector& active, std::size_t n_nodes)
{
    Vector out = Vector::Zero(static_cast<Eigen::Index>(n_nodes));
    for (std::size_t i = 0; i < fem.active_to_node.size(); ++i)
        out[fem.active_to_node[i]] = active[static_cast<Eigen::Index>(i)];
    return out;
}

double g_inner(const FemOperators& fem, const Vector& u, const Vector& v)
{
    return u.dot(fem.mass * v);
}

double g_norm(const FemOperators& fem, const Vector& u)
{
    return std::sqrt(std::max(0.0, g_inner(fem, u, u)));
}

void write_mesh(std::ostream& out, const TriMesh& mesh)
{
    out.precision(17);
    out << mesh.vertices.size() << '\n';
    for (const auto& v : mesh.vertices)
        out << v[0] << ' ' << v[1] << '\n';
    out << mesh.triangles.size() << '\n';
    for (const auto& t : mesh.triangles)
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (std::size_t i = 0; i < mesh.boundary_flags.size(); ++i)
        out << (i ? " " : "") << static_cast<int>(mesh.boundary_flags[i]);
    out << '\n';
}

TriMesh read_mesh(std::istream& in)
{
    TriMesh mesh;
    std::size_t nv = 0, nt = 0;
    if (!(in >> nv))
        throw MeshError("read_mesh: missing vertex count");
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices)
        if (!(in >> v[0] >> v[1]))
            throw MeshError("read_mesh: truncated vertex block");
    if (!(in >> nt))
        throw MeshError("read_mesh: missing triangle count");
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles)
        if (!(in >> t[0] >> t[1] >> t[2]))
            throw MeshError("read_mesh: truncated triangle block");
    mesh.boundary_flags.resize(nv);
    for (auto& f : mesh.boundary_flags) {
        int flag = -1;
        if (!(in >> flag) || flag < 0 || flag > 2)
            throw MeshError("read_mesh: bad or missing boundary flag");
        f = static_cast<BoundaryFlag>(flag);
    }
    validate_and_orient(mesh);
    return mesh;
}

TriMesh read_mesh_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MeshError("read_mesh: cannot open " + path);
    return read_mesh(in);
}

}  // namespace alp
