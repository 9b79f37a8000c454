#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "femdd/device.hpp"
#include "femdd/state.hpp"

namespace femdd {

/// Per-element current density reconstruction.
///   ddfe     - drift-diffusion formula with element means (no fitting)
///   method_a - primal-mixed: harmonic-average conductivity along the edge
///              of maximum drop times the quasi-Fermi gradient
///   method_b - drift-diffusion formula with a diagonal exponential-fitting
///              diffusion tensor
enum class Method { ddfe, method_a, method_b };

const char* to_string(Method m);
/// Accepts "ddfe", "method_a", "method_b"; throws InvalidArgument otherwise.
Method parse_method(const std::string& name);

enum class FieldKind { electron_current, hole_current, electric_field };

/// One constant vector per silicon element, in Mesh::silicon_elements()
/// order. Currents in A/cm^2, fields in V/cm.
struct ElementVectorField {
  std::vector<Vec3> values;
  FieldKind kind = FieldKind::electric_field;
  std::optional<Method> method;  // empty for the electric field
};

/// Vertices of the element where the dimensionless potential
/// Phi = (phi - phi_n)/V_th (electrons) or (phi_p - phi)/V_th (holes) is
/// smallest and largest. Ties go to the lowest vertex id.
struct ExtremalEdge {
  Index m = -1;
  Index M = -1;
  double phi_min = 0.0;  // Phi_m
  double phi_max = 0.0;  // Phi_M
  double drop() const { return phi_max - phi_min; }
};

ExtremalEdge find_extremal_edge(const std::array<Index, 4>& vertices, const std::array<double, 4>& phi,
                                const std::array<double, 4>& phi_c, double thermal_voltage, Carrier carrier);

/// Diagonal of the exponential-fitting tensor of one element (dimensionless).
struct StabilizationTensor {
  Vec3 diagonal{0.0, 0.0, 0.0};
  Carrier carrier = Carrier::electron;
};

/// 1D optimal artificial diffusion B(2 Pe) + Pe - 1; Pe must be >= 0.
double stabilization_phi_1d(double peclet);

/// Relative threshold below which a gradient component of the exponential
/// interpolant counts as zero (the tensor entry then falls back to 0).
inline constexpr double kTensorGradientThreshold = 1e-12;

/// Tensor entries Phii = <w> d_i(psi) / (d_i(w) V_th) - 1 with
/// w = P1 interpolant of exp((psi - psi_max)/V_th), psi = phi for electrons
/// and psi = -phi for holes. `grad` are the barycentric gradients (any
/// consistent length unit).
StabilizationTensor stabilization_tensor_3d(const std::array<double, 4>& phi, const std::array<Vec3, 4>& grad,
                                            double thermal_voltage, Carrier carrier);

/// Nodal inputs of a single-element reconstruction, physical units, lengths
/// of `grad` in 1/cm.
struct ElementData {
  std::array<Index, 4> vertices{};
  std::array<Vec3, 4> grad{};
  std::array<double, 4> phi{};
  std::array<double, 4> density{};
  std::array<double, 4> phi_c{};
};

Vec3 element_current_ddfe(const ElementData& e, const MaterialParams& params, Carrier carrier);
Vec3 element_current_method_a(const ElementData& e, const MaterialParams& params, Carrier carrier);
Vec3 element_current_method_b(const ElementData& e, const MaterialParams& params, Carrier carrier);
Vec3 element_current(Method method, const ElementData& e, const MaterialParams& params, Carrier carrier);

ElementVectorField reconstruct_ddfe(const Device& device, const DeviceState& state, Carrier carrier);
ElementVectorField reconstruct_method_a(const Device& device, const DeviceState& state, Carrier carrier);
ElementVectorField reconstruct_method_b(const Device& device, const DeviceState& state, Carrier carrier);
ElementVectorField reconstruct_current(const Device& device, const DeviceState& state, Carrier carrier,
                                       Method method);
/// E = -grad(phi_h) on every silicon element.
ElementVectorField reconstruct_field(const Device& device, const DeviceState& state);

/// Un-eliminated continuity residuals (scaled) per silicon vertex, plus the
/// current scale that converts their sums to amperes.
struct ContinuityResiduals {
  std::vector<double> electron;
  std::vector<double> hole;
  double current_scale = 1.0;  // A per unit residual
};

/// Current leaving the device through the contact (A), from the residuals
/// weighted by the contact's nodal characteristic function.
double terminal_current(const Device& device, const ContinuityResiduals& residuals, const std::string& contact);
double terminal_current(const Device& device, const ContinuityResiduals& residuals, int contact);

}  // namespace femdd
