#pragma once
// Shared fixtures for the unit tests.

#include <cmath>
#include <limits>
#include <vector>

#include "femdd/device.hpp"
#include "femdd/mesh.hpp"

namespace femdd::test {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

/// Bar along x, extent L x w x w micrometers, nx cells along x and one
/// cell across, contacts on both x faces.
inline Mesh bar_mesh(double length, int nx, double width = 0.05) {
  BoxMeshSpec s;
  s.extent = {length, width, width};
  s.cells = {nx, 1, 1};
  s.contacts.push_back({"left", parse_face("x-"), {{{0.0, width}, {0.0, width}}}});
  s.contacts.push_back({"right", parse_face("x+"), {{{0.0, width}, {0.0, width}}}});
  return build_box_mesh(s);
}

inline DopingProfile uniform(Species s, double level) {
  return DopingProfile({ConstantSlab{AxisBox{{-1e9, 1e9}, {-1e9, 1e9}, {-1e9, 1e9}}, s, level}});
}

}  // namespace femdd::test
