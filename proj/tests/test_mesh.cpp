#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "femdd/error.hpp"
#include "femdd/mesh.hpp"

using namespace femdd;

namespace {

BoxMeshSpec small_box() {
  BoxMeshSpec s;
  s.extent = {0.3, 0.2, 0.1};
  s.cells = {3, 2, 2};
  s.slabs.push_back({AxisBox{{0.0, 0.3}, {0.0, 0.2}, {0.05, 0.1}}, Region::oxide});
  s.contacts.push_back({"left", parse_face("x-"), {{{0.0, 0.2}, {0.0, 0.05}}}});
  s.contacts.push_back({"top", parse_face("z+"), {{{0.1, 0.2}, {0.0, 0.2}}}});
  return s;
}

double signed_volume(const std::array<Vec3, 4>& c) {
  const Vec3 a{c[1][0] - c[0][0], c[1][1] - c[0][1], c[1][2] - c[0][2]};
  const Vec3 b{c[2][0] - c[0][0], c[2][1] - c[0][1], c[2][2] - c[0][2]};
  const Vec3 d{c[3][0] - c[0][0], c[3][1] - c[0][1], c[3][2] - c[0][2]};
  return (a[0] * (b[1] * d[2] - b[2] * d[1]) - a[1] * (b[0] * d[2] - b[2] * d[0]) + a[2] * (b[0] * d[1] - b[1] * d[0])) / 6.0;
}

}  // namespace

TEST_CASE("box mesh counts") {
  const Mesh m = build_box_mesh(small_box());
  CHECK(m.num_vertices() == 4 * 3 * 3);
  CHECK(m.num_elements() == 6 * 3 * 2 * 2);
  // Euler characteristic of a triangulated ball: V - E + F - T = 1.
  const std::size_t boundary = 2 * 2 * (3 * 2 + 2 * 2 + 3 * 2);
  CHECK(m.boundary_facets().size() == boundary);
  const std::size_t faces = (4 * m.num_elements() + boundary) / 2;
  CHECK(static_cast<long>(m.num_vertices()) - static_cast<long>(m.num_edges()) + static_cast<long>(faces) -
            static_cast<long>(m.num_elements()) ==
        1);
}

TEST_CASE("box mesh volumes tile the box") {
  const Mesh m = build_box_mesh(small_box());
  double total = 0.0, oxide = 0.0;
  for (std::size_t k = 0; k < m.num_elements(); ++k) {
    const double v = m.geometry(static_cast<Index>(k)).volume;
    CHECK(v > 0.0);
    total += v;
    if (m.region(static_cast<Index>(k)) == Region::oxide) oxide += v;
  }
  CHECK(total == doctest::Approx(0.3 * 0.2 * 0.1).epsilon(1e-13));
  CHECK(oxide == doctest::Approx(0.3 * 0.2 * 0.05).epsilon(1e-13));
  CHECK(m.num_silicon_elements() == m.num_elements() / 2);
}

TEST_CASE("barycentric gradients are consistent with the corners") {
  const Mesh m = build_box_mesh(small_box());
  for (std::size_t k = 0; k < m.num_elements(); ++k) {
    const auto& g = m.geometry(static_cast<Index>(k));
    const auto& e = m.elements()[k];
    std::array<Vec3, 4> c;
    for (int i = 0; i < 4; ++i) c[i] = m.vertices()[e[i]];
    CHECK(signed_volume(c) == doctest::Approx(g.volume).epsilon(1e-12));
    // grad(l_i) . (x_j - x_0) = delta_ij - delta_i0
    for (int i = 0; i < 4; ++i)
      for (int j = 1; j < 4; ++j) {
        double s = 0.0;
        for (int d = 0; d < 3; ++d) s += g.grad[i][d] * (c[j][d] - c[0][d]);
        const double want = (i == j ? 1.0 : 0.0) - (i == 0 ? 1.0 : 0.0);
        CHECK(s == doctest::Approx(want).epsilon(1e-12));
      }
  }
}

TEST_CASE("Kuhn tetrahedra have non-negative stiffness edge weights") {
  const Mesh m = build_box_mesh(small_box());
  for (std::size_t k = 0; k < m.num_elements(); ++k) {
    const auto& g = m.geometry(static_cast<Index>(k));
    for (const auto& le : kLocalEdges) {
      double dot = 0.0;
      for (int d = 0; d < 3; ++d) dot += g.grad[le[0]][d] * g.grad[le[1]][d];
      CHECK(-g.volume * dot >= -1e-12);
    }
  }
}

TEST_CASE("edges are unique and sorted") {
  const Mesh m = build_box_mesh(small_box());
  std::set<std::array<Index, 2>> seen;
  for (const auto& e : m.edges()) {
    CHECK(e[0] < e[1]);
    CHECK(seen.insert(e).second);
  }
  for (std::size_t k = 0; k < m.num_elements(); ++k) {
    const auto& el = m.elements()[k];
    for (int l = 0; l < 6; ++l) {
      const auto& e = m.edges()[m.element_edges(static_cast<Index>(k))[l]];
      const Index a = el[kLocalEdges[l][0]], b = el[kLocalEdges[l][1]];
      CHECK(e == std::array<Index, 2>{std::min(a, b), std::max(a, b)});
    }
  }
}

TEST_CASE("contact vertices lie inside their rectangles") {
  const Mesh m = build_box_mesh(small_box());
  REQUIRE(m.contact_names().size() == 2);
  const int left = m.find_contact("left"), top = m.find_contact("top");
  CHECK(m.find_contact("nope") == -1);
  // x- face, y in [0,0.2], z in [0,0.05]: 3 x 2 grid points.
  CHECK(m.contact_vertices(left).size() == 6);
  for (Index v : m.contact_vertices(left)) {
    CHECK(m.vertices()[v][0] == 0.0);
    CHECK(m.vertices()[v][2] <= 0.05 + 1e-12);
  }
  // z+ face, x in [0.1,0.2]: 2 x 3 grid points, all on oxide only.
  CHECK(m.contact_vertices(top).size() == 6);
  for (Index v : m.contact_vertices(top)) {
    CHECK(m.vertices()[v][2] == doctest::Approx(0.1));
    CHECK_FALSE(m.is_silicon_vertex(v));
  }
}

TEST_CASE("mesh text format round trip") {
  const Mesh m = build_box_mesh(small_box());
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  CHECK(r.vertices() == m.vertices());
  CHECK(r.elements() == m.elements());
  CHECK(r.regions() == m.regions());
  CHECK(r.contact_names() == m.contact_names());
  for (int c = 0; c < 2; ++c) CHECK(r.contact_vertices(c) == m.contact_vertices(c));
  std::stringstream again;
  write_mesh(again, r);
  CHECK(again.str() == ss.str());
}

TEST_CASE("mesh reader accepts comments and reorients elements") {
  std::istringstream in(R"(femdd-mesh 1   # header
vertices 4
0 0 0
1 0 0
0 1 0
0 0 1

elements 1
0 2 1 3 silicon   # negative orientation on input
contacts 1
bottom
facets 1
0 1 2 0
)");
  const Mesh m = read_mesh(in);
  CHECK(m.geometry(0).volume == doctest::Approx(1.0 / 6.0));
  CHECK(m.contact_vertices(0) == std::vector<Index>{0, 1, 2});
  CHECK(m.boundary_facets().size() == 4);
}

TEST_CASE("mesh reader errors carry line numbers") {
  auto fails_at = [](const std::string& text, int line) {
    std::istringstream in(text);
    try {
      read_mesh(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
    }
  };
  fails_at("femdd-mesh 2\n", 1);
  fails_at("femdd-mesh 1\nvertices 1\n0 0\n", 3);
  fails_at("femdd-mesh 1\nvertices 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\nelements 1\n0 1 2 3 metal\n", 8);
  fails_at("femdd-mesh 1\nvertices 4\n0 0 0\n1 0 0\n0 1 0\n", 5);  // end of input after the last line
}

TEST_CASE("degenerate and inconsistent meshes are rejected") {
  std::vector<Vec3> flat{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  CHECK_THROWS_AS(Mesh(flat, {{0, 1, 2, 3}}, {Region::silicon}, {}, {}), MeshError);
  std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 2, 4}}, {Region::silicon}, {}, {}), MeshError);
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 2, 3}}, {}, {}, {}), MeshError);
  const FacetTag interior_free{{0, 1, 3}, 5};
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 2, 3}}, {Region::silicon}, {"a"}, std::span(&interior_free, 1)), MeshError);
}

TEST_CASE("face names") {
  CHECK(face_name(parse_face("y-")) == "y-");
  CHECK(parse_face("z+").axis == 2);
  CHECK(parse_face("z+").max_side);
  CHECK_THROWS_AS(parse_face("w+"), InvalidArgument);
}
