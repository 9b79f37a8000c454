#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace femdd {

using Index = std::int32_t;
using Vec3 = std::array<double, 3>;

enum class Region : std::uint8_t { silicon = 0, oxide = 1 };

const char* to_string(Region r);

/// Boundary triangle of the mesh. `contact` indexes Mesh::contact_names(),
/// -1 marks an insulating (homogeneous Neumann) facet.
struct BoundaryFacet {
  std::array<Index, 3> vertices;
  Index element;
  int contact = -1;
};

/// A facet tag handed to the Mesh constructor: three vertex ids in any order.
struct FacetTag {
  std::array<Index, 3> vertices;
  int contact;
};

/// Constant P1 data of one tetrahedron.
struct ElementGeometry {
  double volume;
  std::array<Vec3, 4> grad;  // gradients of the barycentric coordinates
};

/// Local vertex pairs of the six tetrahedron edges, in the order used by
/// Mesh::element_edges().
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Conforming tetrahedral mesh with region labels and contact-tagged
/// boundary facets. Coordinates are micrometers. Immutable after
/// construction.
class Mesh {
 public:
  Mesh(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> elements,
       std::vector<Region> regions, std::vector<std::string> contact_names,
       std::span<const FacetTag> tags);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<Index, 4>>& elements() const { return elements_; }
  const std::vector<Region>& regions() const { return regions_; }
  Region region(Index k) const { return regions_[k]; }

  /// Sorted vertex pairs (i < j), each pair exactly once.
  const std::vector<std::array<Index, 2>>& edges() const { return edges_; }
  /// Edge ids of element k in kLocalEdges order.
  const std::array<Index, 6>& element_edges(Index k) const { return element_edges_[k]; }

  const std::vector<BoundaryFacet>& boundary_facets() const { return facets_; }
  const std::vector<std::string>& contact_names() const { return contact_names_; }
  /// Contact index by name, -1 when absent.
  int find_contact(const std::string& name) const;
  /// Sorted vertex ids lying on facets tagged with the contact.
  const std::vector<Index>& contact_vertices(int contact) const { return contact_vertices_[contact]; }

  /// True for vertices touched by at least one silicon element.
  bool is_silicon_vertex(Index v) const { return silicon_vertex_[v] != 0; }
  std::size_t num_silicon_elements() const { return silicon_elements_.size(); }
  /// Element ids of the silicon region, ascending.
  const std::vector<Index>& silicon_elements() const { return silicon_elements_; }

  /// Volume and barycentric gradients of element k (micrometer units).
  const ElementGeometry& geometry(Index k) const { return geometry_[k]; }

  Vec3 bounding_min() const { return bbox_min_; }
  Vec3 bounding_max() const { return bbox_max_; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<Index, 4>> elements_;
  std::vector<Region> regions_;
  std::vector<std::string> contact_names_;
  std::vector<std::array<Index, 2>> edges_;
  std::vector<std::array<Index, 6>> element_edges_;
  std::vector<BoundaryFacet> facets_;
  std::vector<std::vector<Index>> contact_vertices_;
  std::vector<std::uint8_t> silicon_vertex_;
  std::vector<Index> silicon_elements_;
  std::vector<ElementGeometry> geometry_;
  Vec3 bbox_min_{};
  Vec3 bbox_max_{};
};

/// Computes volume and barycentric gradients of a tetrahedron given its
/// corners. Throws MeshError if the volume is not strictly positive;
/// `element` only labels the message.
ElementGeometry element_geometry(const std::array<Vec3, 4>& corners, long element = -1);

/// Same, for element k of a mesh.
inline const ElementGeometry& element_geometry(const Mesh& mesh, Index k) { return mesh.geometry(k); }

/// Mean of a P1 function over a tetrahedron from its four nodal values.
inline double mean_value(const std::array<double, 4>& values) {
  return 0.25 * ((values[0] + values[1]) + (values[2] + values[3]));
}

// ---------------------------------------------------------------------------
// Structured box meshes

struct AxisBox {
  std::array<double, 2> x{}, y{}, z{};
  bool contains(const Vec3& p, double tol = 0.0) const;
};

struct RegionSlab {
  AxisBox box;
  Region region = Region::oxide;
};

/// Face of the bounding box: axis 0..2 and side (false = min, true = max).
struct BoxFace {
  int axis = 2;
  bool max_side = true;
};

/// Axis-aligned rectangle on one box face. `range` holds the extents along
/// the two remaining axes in increasing axis order.
struct ContactRect {
  std::string name;
  BoxFace face;
  std::array<std::array<double, 2>, 2> range{};
};

struct BoxMeshSpec {
  Vec3 extent{1.0, 1.0, 1.0};
  std::array<int, 3> cells{1, 1, 1};
  std::vector<RegionSlab> slabs;  // later entries win; default silicon
  std::vector<ContactRect> contacts;
};

/// Kuhn subdivision of an axis-aligned box anchored at the origin: every
/// grid cell is split into six tetrahedra sharing the (0,0,0)-(1,1,1)
/// diagonal.
Mesh build_box_mesh(const BoxMeshSpec& spec);

/// Parses a face name such as "z+" or "x-".
BoxFace parse_face(const std::string& name);
std::string face_name(const BoxFace& face);

// ---------------------------------------------------------------------------
// Plain-text mesh format (see docs/mesh_format.md)

Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);

}  // namespace femdd
