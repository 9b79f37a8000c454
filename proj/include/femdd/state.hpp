#pragma once

#include <vector>

namespace femdd {

class Device;

/// Nodal solution fields in physical units. All vectors span every mesh
/// vertex; carrier densities and quasi-Fermi potentials are zero on
/// oxide-only vertices and meaningful on silicon vertices.
struct DeviceState {
  std::vector<double> phi;    // V
  std::vector<double> n;      // 1/cm^3
  std::vector<double> p;      // 1/cm^3
  std::vector<double> phi_n;  // V
  std::vector<double> phi_p;  // V
  std::vector<double> bias;   // V, one per contact

  /// Recomputes phi_n and phi_p from (phi, n, p).
  void update_quasi_fermi(const Device& device, double floor_factor = 1e-25);
};

}  // namespace femdd
