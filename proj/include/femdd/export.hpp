#pragma once

#include <span>
#include <string>
#include <vector>

#include "femdd/device.hpp"
#include "femdd/gummel.hpp"
#include "femdd/jrecon.hpp"
#include "femdd/state.hpp"

namespace femdd {

/// Cell vectors for the VTK file, each in Mesh::silicon_elements() order.
/// Oxide cells are written as zero vectors.
struct ElementFields {
  ElementVectorField jn;
  ElementVectorField jp;
  ElementVectorField e;
};

/// Nodal generation rate, one entry per vertex (may be empty: written as 0).
struct VtkInput {
  const Device* device = nullptr;
  const DeviceState* state = nullptr;
  const ElementFields* cells = nullptr;
  std::span<const double> ii_rate;
};

/// Legacy ASCII unstructured grid, 17 significant digits. Sizes are checked
/// before the file is opened.
void export_vtk(const VtkInput& input, const std::string& path);
/// Same content written to a string.
std::string vtk_string(const VtkInput& input);

/// I-V table: bias, I_<contact>..., iterations, step. Throws on an empty
/// sweep.
void export_iv_csv(const SweepResult& sweep, const std::string& path);
std::string iv_csv_string(const SweepResult& sweep);

/// Fields of a converged state under one reconstruction method.
ElementFields compute_element_fields(const Device& device, const DeviceState& state, Method method);

}  // namespace femdd
