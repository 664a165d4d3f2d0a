#include "rrdd/mesh.hpp"

#include "rrdd/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>

namespace rrdd {

namespace {

constexpr double kGeomTol = 1e-12;

std::atomic<int> next_id{1};

int fresh_id()
{
    return next_id.fetch_add(1);
}

} // namespace

double Mesh::element_measure(int e) const
{
    const auto& el = elements.at(static_cast<std::size_t>(e));
    if (dim == 1) {
        return std::abs(vertices[el[1]][0] - vertices[el[0]][0]);
    }
    const Vec2 d1 = vertices[el[1]] - vertices[el[0]];
    const Vec2 d2 = vertices[el[2]] - vertices[el[0]];
    return 0.5 * std::abs(d1[0] * d2[1] - d1[1] * d2[0]);
}

std::vector<int> Mesh::tagged_vertices(VertexTag tag) const
{
    std::vector<int> out;
    for (int v = 0; v < n_vertices(); ++v) {
        if (tags[v] == tag) {
            out.push_back(v);
        }
    }
    return out;
}

FeFunction zero_function(const Mesh& mesh)
{
    return FeFunction{mesh.id, Vector::Zero(mesh.n_vertices())};
}

Mesh build_interval_mesh(double a, double b, int n)
{
    if (!(a < b)) {
        throw InvalidArgument("build_interval_mesh: requires a < b");
    }
    if (n < 2) {
        throw InvalidArgument("build_interval_mesh: requires n >= 2 elements");
    }
    Mesh mesh;
    mesh.id = fresh_id();
    mesh.dim = 1;
    mesh.vertices.resize(n + 1);
    mesh.tags.assign(n + 1, VertexTag::interior);
    const double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
        mesh.vertices[i] = Vec2(a + i * h, 0.0);
    }
    mesh.vertices[n][0] = b; // avoid accumulation drift at the endpoint
    mesh.tags.front() = VertexTag::dirichlet;
    mesh.tags.back() = VertexTag::dirichlet;
    mesh.elements.reserve(n);
    for (int e = 0; e < n; ++e) {
        mesh.elements.push_back({e, e + 1, -1});
    }
    return mesh;
}

Mesh build_rect_mesh(double lx, double ly, int nx, int ny)
{
    if (!(lx > 0.0) || !(ly > 0.0)) {
        throw InvalidArgument("build_rect_mesh: requires positive side lengths");
    }
    if (nx < 2 || ny < 2) {
        throw InvalidArgument("build_rect_mesh: requires nx, ny >= 2");
    }
    Mesh mesh;
    mesh.id = fresh_id();
    mesh.dim = 2;
    mesh.vertices.resize((nx + 1) * (ny + 1));
    mesh.tags.assign(mesh.vertices.size(), VertexTag::interior);
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double x = (i == nx) ? lx : lx * i / nx;
            const double y = (j == ny) ? ly : ly * j / ny;
            mesh.vertices[vid(i, j)] = Vec2(x, y);
            if (i == 0 || i == nx || j == 0 || j == ny) {
                mesh.tags[vid(i, j)] = VertexTag::dirichlet;
            }
        }
    }
    mesh.elements.reserve(2 * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j);
            const int v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1);
            const int v11 = vid(i + 1, j + 1);
            mesh.elements.push_back({v00, v10, v11});
            mesh.elements.push_back({v00, v11, v01});
        }
    }
    return mesh;
}

namespace {

Mesh extract_submesh(const Mesh& global, const std::vector<int>& elem_ids,
                     double cut_coord, int cut_axis, std::vector<int>& to_global)
{
    Mesh sub;
    sub.id = fresh_id();
    sub.dim = global.dim;

    std::vector<int> global_to_sub(global.n_vertices(), -1);
    for (int e : elem_ids) {
        for (int k = 0; k < global.verts_per_element(); ++k) {
            const int gv = global.elements[e][k];
            if (global_to_sub[gv] < 0) {
                global_to_sub[gv] = 0;
            }
        }
    }
    // Preserve global vertex order inside the subdomain.
    to_global.clear();
    for (int gv = 0; gv < global.n_vertices(); ++gv) {
        if (global_to_sub[gv] == 0) {
            global_to_sub[gv] = static_cast<int>(to_global.size());
            to_global.push_back(gv);
        }
    }

    sub.vertices.reserve(to_global.size());
    sub.tags.reserve(to_global.size());
    for (int gv : to_global) {
        sub.vertices.push_back(global.vertices[gv]);
        const bool on_cut = std::abs(global.vertices[gv][cut_axis] - cut_coord) <= kGeomTol;
        if (on_cut && global.tags[gv] != VertexTag::dirichlet) {
            sub.tags.push_back(VertexTag::interface);
        } else {
            sub.tags.push_back(global.tags[gv]);
        }
    }

    sub.elements.reserve(elem_ids.size());
    for (int e : elem_ids) {
        std::array<int, 3> conn{-1, -1, -1};
        for (int k = 0; k < global.verts_per_element(); ++k) {
            conn[k] = global_to_sub[global.elements[e][k]];
        }
        sub.elements.push_back(conn);
    }
    return sub;
}

} // namespace

Decomposition decompose(const Mesh& mesh, Axis axis, double cut)
{
    const int ax = static_cast<int>(axis);
    if (mesh.dim == 1 && axis != Axis::x) {
        throw InvalidArgument("decompose: 1D meshes can only be cut along x");
    }

    bool on_mesh_line = false;
    for (const Vec2& v : mesh.vertices) {
        if (std::abs(v[ax] - cut) <= kGeomTol) {
            on_mesh_line = true;
            break;
        }
    }
    if (!on_mesh_line) {
        throw InvalidArgument("decompose: cut does not coincide with a mesh line");
    }

    std::vector<int> side1, side2;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        Vec2 centroid = Vec2::Zero();
        bool below = false, above = false;
        for (int k = 0; k < mesh.verts_per_element(); ++k) {
            const Vec2& v = mesh.vertices[mesh.elements[e][k]];
            centroid += v;
            if (v[ax] < cut - kGeomTol) below = true;
            if (v[ax] > cut + kGeomTol) above = true;
        }
        if (below && above) {
            throw InvalidArgument("decompose: cut splits an element (not a mesh line)");
        }
        centroid /= mesh.verts_per_element();
        (centroid[ax] < cut ? side1 : side2).push_back(e);
    }
    if (side1.empty() || side2.empty()) {
        throw InvalidArgument("decompose: cut leaves one side empty");
    }

    Decomposition dec;
    dec.id = fresh_id();
    dec.global = mesh;
    dec.axis = axis;
    dec.cut = cut;
    dec.sub[0] = extract_submesh(mesh, side1, cut, ax, dec.sub_to_global[0]);
    dec.sub[1] = extract_submesh(mesh, side2, cut, ax, dec.sub_to_global[1]);

    // Canonical interface order: ascending transverse coordinate.
    const int tr = mesh.dim == 1 ? 0 : 1 - ax;
    std::vector<int> line;
    for (int gv = 0; gv < mesh.n_vertices(); ++gv) {
        if (std::abs(mesh.vertices[gv][ax] - cut) <= kGeomTol) {
            line.push_back(gv);
        }
    }
    std::sort(line.begin(), line.end(), [&](int a, int b) {
        return mesh.vertices[a][tr] < mesh.vertices[b][tr];
    });

    dec.gamma_line = line;
    dec.gamma_line_dof.assign(line.size(), -1);
    for (std::size_t k = 0; k < line.size(); ++k) {
        const int gv = line[k];
        if (mesh.tags[gv] == VertexTag::dirichlet) {
            continue;
        }
        dec.gamma_line_dof[k] = static_cast<int>(dec.iface_to_global.size());
        dec.iface_to_global.push_back(gv);
        dec.iface_pos.push_back(mesh.vertices[gv]);
    }
    if (dec.iface_to_global.empty()) {
        throw InvalidArgument("decompose: the cut line carries no interface dofs");
    }

    for (int i = 0; i < 2; ++i) {
        std::vector<int> global_to_sub(mesh.n_vertices(), -1);
        for (std::size_t sv = 0; sv < dec.sub_to_global[i].size(); ++sv) {
            global_to_sub[dec.sub_to_global[i][sv]] = static_cast<int>(sv);
        }
        dec.iface_to_sub[i].reserve(dec.iface_to_global.size());
        for (int gv : dec.iface_to_global) {
            const int sv = global_to_sub[gv];
            if (sv < 0 || dec.sub[i].tags[sv] != VertexTag::interface) {
                throw Error("decompose: interface dof missing from subdomain");
            }
            dec.iface_to_sub[i].push_back(sv);
        }
        // Every interface-tagged subdomain vertex must be an interface dof.
        std::size_t tagged = 0;
        for (VertexTag t : dec.sub[i].tags) {
            tagged += (t == VertexTag::interface) ? 1u : 0u;
        }
        if (tagged != dec.iface_to_global.size()) {
            throw Error("decompose: inconsistent interface tagging");
        }
    }

    // Geometric coincidence of the two interface dof sets.
    for (std::size_t k = 0; k < dec.iface_to_global.size(); ++k) {
        const Vec2 a = dec.sub[0].vertices[dec.iface_to_sub[0][k]];
        const Vec2 b = dec.sub[1].vertices[dec.iface_to_sub[1][k]];
        if ((a - b).norm() > kGeomTol) {
            throw Error("decompose: interface dof sets do not coincide");
        }
    }
    return dec;
}

Vec2 Decomposition::normal(int side) const
{
    if (side != 1 && side != 2) {
        throw InvalidArgument("Decomposition::normal: side must be 1 or 2");
    }
    Vec2 n = Vec2::Zero();
    n[static_cast<int>(axis)] = (side == 1) ? 1.0 : -1.0;
    return n;
}

namespace {

void check_side(int side)
{
    if (side != 1 && side != 2) {
        throw InvalidArgument("subdomain side must be 1 or 2");
    }
}

void check_on_mesh(const Mesh& mesh, const FeFunction& u, const char* where)
{
    if (u.mesh_id != mesh.id || u.coeffs.size() != mesh.n_vertices()) {
        throw InvalidArgument(std::string(where) + ": function does not live on this mesh");
    }
}

} // namespace

TraceVector trace(const Decomposition& dec, int side, const FeFunction& u)
{
    check_side(side);
    const Mesh& mesh = dec.sub[side - 1];
    check_on_mesh(mesh, u, "trace");
    TraceVector eta{dec.id, Vector(dec.n_interface())};
    const auto& map = dec.iface_to_sub[side - 1];
    for (int k = 0; k < dec.n_interface(); ++k) {
        eta.values[k] = u.coeffs[map[k]];
    }
    return eta;
}

FeFunction lift(const Decomposition& dec, int side, const TraceVector& eta)
{
    check_side(side);
    if (eta.dec_id != dec.id || eta.size() != dec.n_interface()) {
        throw InvalidArgument("lift: trace vector size/decomposition mismatch");
    }
    FeFunction u = zero_function(dec.sub[side - 1]);
    const auto& map = dec.iface_to_sub[side - 1];
    for (int k = 0; k < dec.n_interface(); ++k) {
        u.coeffs[map[k]] = eta.values[k];
    }
    return u;
}

FeFunction restrict_to(const Decomposition& dec, int side, const FeFunction& u_global)
{
    check_side(side);
    check_on_mesh(dec.global, u_global, "restrict_to");
    const auto& map = dec.sub_to_global[side - 1];
    FeFunction u{dec.sub[side - 1].id, Vector(map.size())};
    for (std::size_t sv = 0; sv < map.size(); ++sv) {
        u.coeffs[static_cast<Eigen::Index>(sv)] = u_global.coeffs[map[sv]];
    }
    return u;
}

FeFunction glue(const Decomposition& dec, const FeFunction& u1, const FeFunction& u2)
{
    check_on_mesh(dec.sub[0], u1, "glue");
    check_on_mesh(dec.sub[1], u2, "glue");
    FeFunction out = zero_function(dec.global);
    for (std::size_t sv = 0; sv < dec.sub_to_global[0].size(); ++sv) {
        out.coeffs[dec.sub_to_global[0][sv]] = u1.coeffs[static_cast<Eigen::Index>(sv)];
    }
    for (std::size_t sv = 0; sv < dec.sub_to_global[1].size(); ++sv) {
        out.coeffs[dec.sub_to_global[1][sv]] = u2.coeffs[static_cast<Eigen::Index>(sv)];
    }
    // Shared interface coefficients: average the two sides.
    for (int k = 0; k < dec.n_interface(); ++k) {
        const double a = u1.coeffs[dec.iface_to_sub[0][k]];
        const double b = u2.coeffs[dec.iface_to_sub[1][k]];
        out.coeffs[dec.iface_to_global[k]] = 0.5 * (a + b);
    }
    return out;
}

void dump_mesh(const Mesh& mesh, std::ostream& os)
{
    os << "# mesh dim=" << mesh.dim << " vertices=" << mesh.n_vertices()
       << " elements=" << mesh.n_elements() << "\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const char* tag = mesh.tags[v] == VertexTag::interior    ? "interior"
                          : mesh.tags[v] == VertexTag::dirichlet ? "dirichlet"
                                                                 : "interface";
        os << "v " << v << " " << mesh.vertices[v][0] << " " << mesh.vertices[v][1]
           << " " << tag << "\n";
    }
    for (int e = 0; e < mesh.n_elements(); ++e) {
        os << "e " << e;
        for (int k = 0; k < mesh.verts_per_element(); ++k) {
            os << " " << mesh.elements[e][k];
        }
        os << "\n";
    }
}

} // namespace rrdd
