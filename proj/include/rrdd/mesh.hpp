#pragma once

#include "rrdd/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rrdd {

enum class VertexTag : std::uint8_t {
    interior,
    dirichlet,
    interface,
};

enum class Axis : std::uint8_t { x = 0, y = 1 };

/// P1 simplex mesh: segments in 1D, triangles in 2D. Immutable after
/// construction and shareable across threads.
struct Mesh {
    int id = -1;
    int dim = 0;
    std::vector<Vec2> vertices;               ///< y = 0 in 1D
    std::vector<std::array<int, 3>> elements; ///< 1D uses entries {a, b, -1}
    std::vector<VertexTag> tags;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_elements() const { return static_cast<int>(elements.size()); }
    int verts_per_element() const { return dim + 1; }

    /// Length of a segment / area of a triangle.
    double element_measure(int e) const;

    std::vector<int> tagged_vertices(VertexTag tag) const;
};

/// Nodal coefficient vector of a P1 function on one mesh.
struct FeFunction {
    int mesh_id = -1;
    Vector coeffs;
};

FeFunction zero_function(const Mesh& mesh);

/// Coefficient vector on the interface dofs of a Decomposition, in canonical
/// interface order. Also used for dual vectors via the plain dot pairing.
struct TraceVector {
    int dec_id = -1;
    Vector values;

    int size() const { return static_cast<int>(values.size()); }
};

/// Uniform mesh of (a, b) with n elements; endpoints tagged dirichlet.
Mesh build_interval_mesh(double a, double b, int n);

/// Structured triangulation of (0,lx) x (0,ly); each grid cell is split into
/// two triangles. All boundary vertices tagged dirichlet.
Mesh build_rect_mesh(double lx, double ly, int nx, int ny);

/// Two-subdomain nonoverlapping decomposition along a mesh line.
///
/// Subdomain 1 is the side with coordinate < cut. Interface vertices shared
/// by the two subdomains are tagged `interface` unless they lie on the outer
/// boundary, in which case they stay dirichlet. The canonical interface
/// order is ascending in the transverse coordinate.
struct Decomposition {
    int id = -1;
    Mesh global;
    std::array<Mesh, 2> sub;
    Axis axis = Axis::x;
    double cut = 0.0;

    std::array<std::vector<int>, 2> sub_to_global; ///< subdomain vertex -> global vertex
    std::array<std::vector<int>, 2> iface_to_sub;  ///< interface dof -> subdomain vertex
    std::vector<int> iface_to_global;              ///< interface dof -> global vertex
    std::vector<Vec2> iface_pos;                   ///< interface dof positions

    /// All global vertices on the cut line in transverse order, including
    /// the dirichlet-tagged endpoints; used for interface integration.
    std::vector<int> gamma_line;
    std::vector<int> gamma_line_dof; ///< interface dof index or -1 at endpoints

    int n_interface() const { return static_cast<int>(iface_to_global.size()); }

    /// Outward unit normal of subdomain i on the interface; normal(1) = -normal(2).
    Vec2 normal(int side) const;
};

Decomposition decompose(const Mesh& mesh, Axis axis, double cut);

/// Restriction of nodal values to interface dofs (discrete trace).
TraceVector trace(const Decomposition& dec, int side, const FeFunction& u);

/// Nodal extension by zero: interface values eta, zero elsewhere (discrete
/// lift; right inverse of trace).
FeFunction lift(const Decomposition& dec, int side, const TraceVector& eta);

/// Gather a global coefficient vector onto subdomain `side`.
FeFunction restrict_to(const Decomposition& dec, int side, const FeFunction& u_global);

/// Scatter two subdomain functions back into a global one. Shared interface
/// coefficients are averaged (exact when both sides agree).
FeFunction glue(const Decomposition& dec, const FeFunction& u1, const FeFunction& u2);

/// Plain-text listing, one vertex per line `v <id> <x> <y> <tag>` followed
/// by one element per line `e <id> <v0> <v1> [<v2>]`.
void dump_mesh(const Mesh& mesh, std::ostream& os);

} // namespace rrdd
