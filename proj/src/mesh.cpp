#include "femdd/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "femdd/error.hpp"
#include "format.hpp"

namespace femdd {

const char* to_string(Region r) { return r == Region::silicon ? "silicon" : "oxide"; }

ElementGeometry element_geometry(const std::array<Vec3, 4>& c, long element) {
  // Columns of the Jacobian are the edge vectors from corner 0.
  double a[3][3];
  for (int i = 0; i < 3; ++i)
    for (int d = 0; d < 3; ++d) a[d][i] = c[i + 1][d] - c[0][d];

  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw MeshError("degenerate or inverted element " + std::to_string(element) +
                    " (6*volume = " + format_double(det) + ")");
  }

  // Rows of inv(J) are the gradients of lambda_1..lambda_3.
  const double inv = 1.0 / det;
  double r[3][3];
  r[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) * inv;
  r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * inv;
  r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * inv;
  r[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) * inv;
  r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * inv;
  r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * inv;
  r[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) * inv;
  r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * inv;
  r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * inv;

  ElementGeometry g{};
  g.volume = det / 6.0;
  for (int i = 0; i < 3; ++i) g.grad[i + 1] = {r[i][0], r[i][1], r[i][2]};
  for (int d = 0; d < 3; ++d) g.grad[0][d] = -(g.grad[1][d] + g.grad[2][d] + g.grad[3][d]);
  return g;
}

namespace {

using Triple = std::array<Index, 3>;

Triple sorted(Triple t) {
  std::sort(t.begin(), t.end());
  return t;
}

double signed_det(const std::vector<Vec3>& v, const std::array<Index, 4>& e) {
  Vec3 a, b, c;
  for (int d = 0; d < 3; ++d) {
    a[d] = v[e[1]][d] - v[e[0]][d];
    b[d] = v[e[2]][d] - v[e[0]][d];
    c[d] = v[e[3]][d] - v[e[0]][d];
  }
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> elements,
           std::vector<Region> regions, std::vector<std::string> contact_names,
           std::span<const FacetTag> tags)
    : vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      regions_(std::move(regions)),
      contact_names_(std::move(contact_names)) {
  const auto nv = static_cast<Index>(vertices_.size());
  if (nv < 4 || elements_.empty()) throw MeshError("mesh needs at least 4 vertices and 1 element");
  if (regions_.size() != elements_.size())
    throw MeshError("region list has " + std::to_string(regions_.size()) + " entries for " +
                    std::to_string(elements_.size()) + " elements");
  for (std::size_t i = 0; i < contact_names_.size(); ++i) {
    if (contact_names_[i].empty()) throw MeshError("empty contact name");
    for (std::size_t j = 0; j < i; ++j)
      if (contact_names_[i] == contact_names_[j]) throw MeshError("duplicate contact " + contact_names_[i]);
  }

  bbox_min_ = bbox_max_ = vertices_.front();
  for (const auto& p : vertices_) {
    for (int d = 0; d < 3; ++d) {
      if (!std::isfinite(p[d])) throw MeshError("non-finite vertex coordinate");
      bbox_min_[d] = std::min(bbox_min_[d], p[d]);
      bbox_max_[d] = std::max(bbox_max_[d], p[d]);
    }
  }

  // Orientation fix and geometry.
  geometry_.reserve(elements_.size());
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    auto& e = elements_[k];
    for (Index v : e)
      if (v < 0 || v >= nv) throw MeshError("element " + std::to_string(k) + " references vertex " + std::to_string(v));
    if (signed_det(vertices_, e) < 0.0) std::swap(e[2], e[3]);
    geometry_.push_back(element_geometry({vertices_[e[0]], vertices_[e[1]], vertices_[e[2]], vertices_[e[3]]},
                                         static_cast<long>(k)));
  }

  // Edges.
  std::vector<std::array<Index, 2>> all;
  all.reserve(elements_.size() * 6);
  for (const auto& e : elements_)
    for (const auto& le : kLocalEdges) {
      Index a = e[le[0]], b = e[le[1]];
      if (a == b) throw MeshError("element with repeated vertex");
      all.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  edges_ = std::move(all);
  element_edges_.resize(elements_.size());
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const auto& e = elements_[k];
    for (int l = 0; l < 6; ++l) {
      Index a = e[kLocalEdges[l][0]], b = e[kLocalEdges[l][1]];
      std::array<Index, 2> key{std::min(a, b), std::max(a, b)};
      element_edges_[k][l] = static_cast<Index>(std::lower_bound(edges_.begin(), edges_.end(), key) - edges_.begin());
    }
  }

  // Facets: each appears once (boundary) or twice (interior).
  struct FaceRef {
    Triple key;
    Index element;
    int local;
  };
  std::vector<FaceRef> faces;
  faces.reserve(elements_.size() * 4);
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const auto& e = elements_[k];
    for (int skip = 0; skip < 4; ++skip) {
      Triple t{};
      int m = 0;
      for (int i = 0; i < 4; ++i)
        if (i != skip) t[m++] = e[i];
      faces.push_back({sorted(t), static_cast<Index>(k), skip});
    }
  }
  std::sort(faces.begin(), faces.end(), [](const FaceRef& a, const FaceRef& b) {
    return a.key < b.key || (a.key == b.key && a.element < b.element);
  });
  for (std::size_t i = 0; i < faces.size();) {
    std::size_t j = i;
    while (j < faces.size() && faces[j].key == faces[i].key) ++j;
    if (j - i > 2) throw MeshError("non-conforming mesh: facet shared by more than two elements");
    if (j - i == 1) facets_.push_back({faces[i].key, faces[i].element, -1});
    i = j;
  }

  for (const auto& tag : tags) {
    if (tag.contact < 0 || tag.contact >= static_cast<int>(contact_names_.size()))
      throw MeshError("facet tag references unknown contact " + std::to_string(tag.contact));
    const Triple key = sorted(tag.vertices);
    auto it = std::lower_bound(facets_.begin(), facets_.end(), key,
                               [](const BoundaryFacet& f, const Triple& t) { return f.vertices < t; });
    if (it == facets_.end() || it->vertices != key) throw MeshError("tagged facet is not a boundary facet");
    if (it->contact >= 0 && it->contact != tag.contact)
      throw MeshError("facet carries two contact tags: " + contact_names_[it->contact] + " and " +
                      contact_names_[tag.contact]);
    it->contact = tag.contact;
  }

  contact_vertices_.assign(contact_names_.size(), {});
  for (const auto& f : facets_)
    if (f.contact >= 0)
      for (Index v : f.vertices) contact_vertices_[f.contact].push_back(v);
  for (auto& cv : contact_vertices_) {
    std::sort(cv.begin(), cv.end());
    cv.erase(std::unique(cv.begin(), cv.end()), cv.end());
  }

  silicon_vertex_.assign(vertices_.size(), 0);
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    if (regions_[k] != Region::silicon) continue;
    silicon_elements_.push_back(static_cast<Index>(k));
    for (Index v : elements_[k]) silicon_vertex_[v] = 1;
  }
}

int Mesh::find_contact(const std::string& name) const {
  for (std::size_t i = 0; i < contact_names_.size(); ++i)
    if (contact_names_[i] == name) return static_cast<int>(i);
  return -1;
}

bool AxisBox::contains(const Vec3& p, double tol) const {
  return p[0] >= x[0] - tol && p[0] <= x[1] + tol && p[1] >= y[0] - tol && p[1] <= y[1] + tol &&
         p[2] >= z[0] - tol && p[2] <= z[1] + tol;
}

BoxFace parse_face(const std::string& name) {
  if (name.size() != 2 || name[0] < 'x' || name[0] > 'z' || (name[1] != '+' && name[1] != '-'))
    throw InvalidArgument("face must be one of x-, x+, y-, y+, z-, z+ (got '" + name + "')");
  return BoxFace{name[0] - 'x', name[1] == '+'};
}

std::string face_name(const BoxFace& face) {
  return std::string(1, static_cast<char>('x' + face.axis)) + (face.max_side ? "+" : "-");
}

Mesh build_box_mesh(const BoxMeshSpec& spec) {
  for (int d = 0; d < 3; ++d) {
    if (!(spec.extent[d] > 0.0) || !std::isfinite(spec.extent[d]))
      throw InvalidArgument("box extent must be positive along every axis");
    if (spec.cells[d] < 1) throw InvalidArgument("box subdivisions must be >= 1 along every axis");
  }
  const int nx = spec.cells[0], ny = spec.cells[1], nz = spec.cells[2];
  const double hx = spec.extent[0] / nx, hy = spec.extent[1] / ny, hz = spec.extent[2] / nz;
  auto vid = [&](int i, int j, int k) { return static_cast<Index>(i + (nx + 1) * (j + (ny + 1) * k)); };

  std::vector<Vec3> verts;
  verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        verts.push_back({i == nx ? spec.extent[0] : i * hx, j == ny ? spec.extent[1] : j * hy,
                         k == nz ? spec.extent[2] : k * hz});

  // Six monotone lattice paths from corner (0,0,0) to (1,1,1).
  static constexpr std::array<std::array<int, 3>, 6> kPaths{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  std::vector<std::array<Index, 4>> elems;
  std::vector<Region> regions;
  elems.reserve(6ull * nx * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const Vec3 centroid{(i + 0.5) * hx, (j + 0.5) * hy, (k + 0.5) * hz};
        Region region = Region::silicon;
        for (const auto& slab : spec.slabs)
          if (slab.box.contains(centroid)) region = slab.region;
        for (const auto& path : kPaths) {
          std::array<int, 3> c{i, j, k};
          std::array<Index, 4> tet{};
          tet[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[path[s]];
            tet[s + 1] = vid(c[0], c[1], c[2]);
          }
          elems.push_back(tet);
          regions.push_back(region);
        }
      }

  // Tag boundary facets that lie on a contact rectangle. A boundary facet on
  // face (axis, side) has all three vertices on that plane.
  std::vector<std::string> names;
  for (const auto& c : spec.contacts) {
    const int a = c.face.axis;
    const int u = a == 0 ? 1 : 0, w = a == 2 ? 1 : 2;
    const std::array<double, 2> lim_u{0.0, spec.extent[u]}, lim_w{0.0, spec.extent[w]};
    const double eps = 1e-9 * std::max({spec.extent[0], spec.extent[1], spec.extent[2]});
    if (!(c.range[0][0] < c.range[0][1]) || !(c.range[1][0] < c.range[1][1]) || c.range[0][0] < lim_u[0] - eps ||
        c.range[0][1] > lim_u[1] + eps || c.range[1][0] < lim_w[0] - eps || c.range[1][1] > lim_w[1] + eps)
      throw InvalidArgument("contact '" + c.name + "' rectangle does not lie on face " + face_name(c.face));
    names.push_back(c.name);
  }

  // Collect the boundary triangles directly from the lattice: a tet face is
  // on the boundary plane when its three vertices share the extremal index.
  std::vector<FacetTag> tags;
  const double eps = 1e-9 * std::max({spec.extent[0], spec.extent[1], spec.extent[2]});
  for (const auto& tet : elems) {
    for (int skip = 0; skip < 4; ++skip) {
      std::array<Index, 3> f{};
      int m = 0;
      for (int q = 0; q < 4; ++q)
        if (q != skip) f[m++] = tet[q];
      for (int ci = 0; ci < static_cast<int>(spec.contacts.size()); ++ci) {
        const auto& c = spec.contacts[ci];
        const int a = c.face.axis;
        const int u = a == 0 ? 1 : 0, w = a == 2 ? 1 : 2;
        const double plane = c.face.max_side ? spec.extent[a] : 0.0;
        bool on_plane = true;
        Vec3 centroid{0, 0, 0};
        for (Index v : f) {
          on_plane = on_plane && std::abs(verts[v][a] - plane) <= eps;
          for (int d = 0; d < 3; ++d) centroid[d] += verts[v][d] / 3.0;
        }
        if (!on_plane) continue;
        if (centroid[u] >= c.range[0][0] - eps && centroid[u] <= c.range[0][1] + eps &&
            centroid[w] >= c.range[1][0] - eps && centroid[w] <= c.range[1][1] + eps)
          tags.push_back({f, ci});
      }
    }
  }

  return Mesh(std::move(verts), std::move(elems), std::move(regions), std::move(names), tags);
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void bad_mesh_file(int line, const std::string& what) {
  throw ParseError("mesh file: " + what, line, 1);
}

struct LineReader {
  std::istream& in;
  int line = 0;
  // Next non-empty, non-comment line split into tokens.
  std::vector<std::string> next() {
    std::string s;
    while (std::getline(in, s)) {
      ++line;
      auto hash = s.find('#');
      if (hash != std::string::npos) s.erase(hash);
      std::istringstream is(s);
      std::vector<std::string> tok;
      for (std::string t; is >> t;) tok.push_back(t);
      if (!tok.empty()) return tok;
    }
    bad_mesh_file(line, "unexpected end of file");
  }
};

template <class T>
T parse_num(const std::string& s, int line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad_mesh_file(line, "bad number '" + s + "'");
  return v;
}

std::size_t section(LineReader& r, const char* name) {
  auto tok = r.next();
  if (tok.size() != 2 || tok[0] != name) bad_mesh_file(r.line, std::string("expected '") + name + " <count>'");
  return parse_num<std::size_t>(tok[1], r.line);
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  LineReader r{in};
  auto head = r.next();
  if (head.size() != 2 || head[0] != "femdd-mesh" || head[1] != "1") bad_mesh_file(r.line, "expected 'femdd-mesh 1'");

  std::vector<Vec3> verts(section(r, "vertices"));
  for (auto& v : verts) {
    auto t = r.next();
    if (t.size() != 3) bad_mesh_file(r.line, "vertex needs 3 coordinates");
    for (int d = 0; d < 3; ++d) v[d] = parse_num<double>(t[d], r.line);
  }
  const std::size_t ne = section(r, "elements");
  std::vector<std::array<Index, 4>> elems(ne);
  std::vector<Region> regions(ne);
  for (std::size_t k = 0; k < ne; ++k) {
    auto t = r.next();
    if (t.size() != 5) bad_mesh_file(r.line, "element needs 4 vertex ids and a region");
    for (int q = 0; q < 4; ++q) elems[k][q] = parse_num<Index>(t[q], r.line);
    if (t[4] == "silicon") regions[k] = Region::silicon;
    else if (t[4] == "oxide") regions[k] = Region::oxide;
    else bad_mesh_file(r.line, "unknown region '" + t[4] + "'");
  }
  std::vector<std::string> names(section(r, "contacts"));
  for (auto& n : names) {
    auto t = r.next();
    if (t.size() != 1) bad_mesh_file(r.line, "contact name must be one token");
    n = t[0];
  }
  std::vector<FacetTag> tags(section(r, "facets"));
  for (auto& f : tags) {
    auto t = r.next();
    if (t.size() != 4) bad_mesh_file(r.line, "facet needs 3 vertex ids and a contact index");
    for (int q = 0; q < 3; ++q) f.vertices[q] = parse_num<Index>(t[q], r.line);
    f.contact = parse_num<int>(t[3], r.line);
  }
  return Mesh(std::move(verts), std::move(elems), std::move(regions), std::move(names), tags);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file " + path);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "femdd-mesh 1\n";
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& v : mesh.vertices())
    out << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
  out << "elements " << mesh.num_elements() << '\n';
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto& e = mesh.elements()[k];
    out << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << ' ' << to_string(mesh.regions()[k]) << '\n';
  }
  out << "contacts " << mesh.contact_names().size() << '\n';
  for (const auto& n : mesh.contact_names()) out << n << '\n';
  std::size_t tagged = 0;
  for (const auto& f : mesh.boundary_facets()) tagged += f.contact >= 0;
  out << "facets " << tagged << '\n';
  for (const auto& f : mesh.boundary_facets())
    if (f.contact >= 0) out << f.vertices[0] << ' ' << f.vertices[1] << ' ' << f.vertices[2] << ' ' << f.contact << '\n';
}

}  // namespace femdd
