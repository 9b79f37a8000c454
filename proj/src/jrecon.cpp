#include "femdd/jrecon.hpp"

#include <cmath>

#include "femdd/error.hpp"

namespace femdd {

const char* to_string(Method m) {
  switch (m) {
    case Method::ddfe: return "ddfe";
    case Method::method_a: return "method_a";
    case Method::method_b: return "method_b";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "ddfe") return Method::ddfe;
  if (name == "method_a") return Method::method_a;
  if (name == "method_b") return Method::method_b;
  throw InvalidArgument("unknown reconstruction method '" + name + "' (expected ddfe, method_a or method_b)");
}

namespace {

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Differences against vertex 0 (the gradients sum to zero): constant data
// gives an exact zero and round-off scales with the variation, not the level.
Vec3 p1_gradient(const std::array<double, 4>& f, const std::array<Vec3, 4>& grad) {
  Vec3 g{0.0, 0.0, 0.0};
  for (int v = 1; v < 4; ++v)
    for (int d = 0; d < 3; ++d) g[d] += (f[v] - f[0]) * grad[v][d];
  return g;
}

}  // namespace

ExtremalEdge find_extremal_edge(const std::array<Index, 4>& vertices, const std::array<double, 4>& phi,
                                const std::array<double, 4>& phi_c, double thermal_voltage, Carrier carrier) {
  ExtremalEdge e;
  for (int v = 0; v < 4; ++v) {
    const double x = carrier == Carrier::electron ? (phi[v] - phi_c[v]) / thermal_voltage
                                                  : (phi_c[v] - phi[v]) / thermal_voltage;
    if (e.m < 0 || x < e.phi_min || (x == e.phi_min && vertices[v] < e.m)) {
      e.m = vertices[v];
      e.phi_min = x;
    }
    if (e.M < 0 || x > e.phi_max || (x == e.phi_max && vertices[v] < e.M)) {
      e.M = vertices[v];
      e.phi_max = x;
    }
  }
  return e;
}

namespace {

// e^x minus its Taylor polynomial through x^2, without cancellation near 0.
double exp_cubic_tail(double x) {
  if (std::abs(x) > 0.1) return std::expm1(x) - x - 0.5 * x * x;
  double term = x * x * x / 6.0, sum = term;
  for (int k = 4; k < 20 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
    term *= x / k;
    sum += term;
  }
  return sum;
}

}  // namespace

double stabilization_phi_1d(double peclet) {
  if (!(peclet >= 0.0)) throw InvalidArgument("Peclet number must be non-negative");
  if (peclet < 0.05) {
    // Bernoulli series with the constant and linear terms removed.
    const double x2 = 4.0 * peclet * peclet;
    return x2 * (1.0 / 12.0 + x2 * (-1.0 / 720.0 + x2 * (1.0 / 30240.0 - x2 / 1209600.0)));
  }
  return bernoulli(2.0 * peclet) + peclet - 1.0;
}

StabilizationTensor stabilization_tensor_3d(const std::array<double, 4>& phi, const std::array<Vec3, 4>& grad,
                                            double thermal_voltage, Carrier carrier) {
  const double sign = carrier == Carrier::electron ? 1.0 : -1.0;
  std::array<double, 4> psi{};
  double psi_max = -INFINITY;
  for (int v = 0; v < 4; ++v) {
    psi[v] = sign * phi[v];
    psi_max = std::max(psi_max, psi[v]);
  }
  // With x_v = (psi_v - psi_max)/V_th and w_v = exp(x_v), the tensor entry is
  // mean(w) * d_i x / d_i w - 1. Its numerator mean(w) d_i x - d_i w is split
  // into pieces of matching order so the leading terms cancel analytically.
  // The split only pays off for small drops; large ones use the direct form.
  std::array<double, 4> x{}, dw{}, tail{};
  double mean_x = 0.0, mean_c = 0.0, mean_dw = 0.0;  // c_v = w_v - 1 - x_v
  bool small = true;
  for (int v = 0; v < 4; ++v) {
    x[v] = (psi[v] - psi_max) / thermal_voltage;
    dw[v] = std::expm1(x[v]);
    tail[v] = exp_cubic_tail(x[v]);
    mean_x += 0.25 * x[v];
    mean_c += 0.25 * (0.5 * x[v] * x[v] + tail[v]);
    mean_dw += 0.25 * dw[v];
    small = small && x[v] >= -1.0;
  }

  StabilizationTensor t;
  t.carrier = carrier;
  for (int i = 0; i < 3; ++i) {
    double dwi = 0.0, scale = 0.0, dxi = 0.0, num = 0.0;
    // Differences against vertex 0, so data equal at two vertices cancels exactly.
    const double y0 = x[0] - mean_x;
    for (int v = 1; v < 4; ++v) {
      const double y = x[v] - mean_x;
      dwi += (dw[v] - dw[0]) * grad[v][i];
      scale += std::abs((dw[v] - dw[0]) * grad[v][i]);
      dxi += (x[v] - x[0]) * grad[v][i];
      num -= (0.5 * (x[v] - x[0]) * (y + y0) + tail[v] - tail[0]) * grad[v][i];
    }
    if (scale == 0.0 || std::abs(dwi) <= kTensorGradientThreshold * scale) {
      t.diagonal[i] = 0.0;
      continue;
    }
    if (small) t.diagonal[i] = (num + mean_c * dxi) / dwi;
    else t.diagonal[i] = (1.0 + mean_dw) * dxi / dwi - 1.0;
  }
  return t;
}

// ---------------------------------------------------------------------------

Vec3 element_current_ddfe(const ElementData& e, const MaterialParams& params, Carrier carrier) {
  const double q = params.q, mu = params.mobility(carrier), D = params.diffusivity(carrier);
  const Vec3 gphi = p1_gradient(e.phi, e.grad);
  const Vec3 gc = p1_gradient(e.density, e.grad);
  const double mean_c = mean_value(e.density);
  const double diff_sign = carrier == Carrier::electron ? 1.0 : -1.0;
  Vec3 j{};
  for (int d = 0; d < 3; ++d) j[d] = q * mu * mean_c * (-gphi[d]) + diff_sign * q * D * gc[d];
  return j;
}

Vec3 element_current_method_a(const ElementData& e, const MaterialParams& params, Carrier carrier) {
  const ExtremalEdge edge = find_extremal_edge(e.vertices, e.phi, e.phi_c, params.thermal_voltage, carrier);
  const double drop = edge.drop();
  if (std::abs(edge.phi_min) > 700.0 || std::abs(edge.phi_max) > 700.0)
    throw RangeError("dimensionless potential out of range in method A", edge.M);
  // Both halves equal the harmonic average of n_i exp(Phi) along the edge
  // of maximum drop; averaging them keeps the expression symmetric.
  const double c_min = params.n_i * std::exp(edge.phi_min);
  const double c_max = params.n_i * std::exp(edge.phi_max);
  const double conductance = 0.5 * (c_min * bernoulli(-drop) + c_max * bernoulli(drop));
  const Vec3 gqf = p1_gradient(e.phi_c, e.grad);
  const double f = -params.q * params.mobility(carrier) * conductance;
  return {f * gqf[0], f * gqf[1], f * gqf[2]};
}

Vec3 element_current_method_b(const ElementData& e, const MaterialParams& params, Carrier carrier) {
  const double q = params.q, mu = params.mobility(carrier), D = params.diffusivity(carrier);
  const StabilizationTensor t = stabilization_tensor_3d(e.phi, e.grad, params.thermal_voltage, carrier);
  const Vec3 gphi = p1_gradient(e.phi, e.grad);
  const Vec3 gc = p1_gradient(e.density, e.grad);
  const double mean_c = mean_value(e.density);
  const double diff_sign = carrier == Carrier::electron ? 1.0 : -1.0;
  Vec3 j{};
  for (int d = 0; d < 3; ++d) j[d] = q * mu * mean_c * (-gphi[d]) + diff_sign * q * D * (1.0 + t.diagonal[d]) * gc[d];
  return j;
}

Vec3 element_current(Method method, const ElementData& e, const MaterialParams& params, Carrier carrier) {
  switch (method) {
    case Method::ddfe: return element_current_ddfe(e, params, carrier);
    case Method::method_a: return element_current_method_a(e, params, carrier);
    case Method::method_b: return element_current_method_b(e, params, carrier);
  }
  throw InvalidArgument("bad method");
}

// ---------------------------------------------------------------------------

namespace {

ElementData gather(const Device& device, const DeviceState& state, Index k, Carrier carrier) {
  const Mesh& mesh = device.mesh();
  const auto& g = mesh.geometry(k);
  ElementData e;
  e.vertices = mesh.elements()[k];
  const auto& dens = carrier == Carrier::electron ? state.n : state.p;
  const auto& qf = carrier == Carrier::electron ? state.phi_n : state.phi_p;
  for (int v = 0; v < 4; ++v) {
    const Index id = e.vertices[v];
    for (int d = 0; d < 3; ++d) e.grad[v][d] = g.grad[v][d] * 1e4;  // 1/um -> 1/cm
    e.phi[v] = state.phi[id];
    e.density[v] = dens[id];
    e.phi_c[v] = qf[id];
  }
  return e;
}

void check_sizes(const Device& device, const DeviceState& state) {
  const std::size_t nv = device.mesh().num_vertices();
  if (state.phi.size() != nv || state.n.size() != nv || state.p.size() != nv || state.phi_n.size() != nv ||
      state.phi_p.size() != nv)
    throw InvalidArgument("device state does not match the mesh");
}

FieldKind kind_of(Carrier c) { return c == Carrier::electron ? FieldKind::electron_current : FieldKind::hole_current; }

}  // namespace

ElementVectorField reconstruct_current(const Device& device, const DeviceState& state, Carrier carrier,
                                       Method method) {
  check_sizes(device, state);
  ElementVectorField out;
  out.kind = kind_of(carrier);
  out.method = method;
  const auto& si = device.mesh().silicon_elements();
  out.values.resize(si.size());
  for (std::size_t i = 0; i < si.size(); ++i)
    out.values[i] = element_current(method, gather(device, state, si[i], carrier), device.params(), carrier);
  return out;
}

ElementVectorField reconstruct_ddfe(const Device& device, const DeviceState& state, Carrier carrier) {
  return reconstruct_current(device, state, carrier, Method::ddfe);
}
ElementVectorField reconstruct_method_a(const Device& device, const DeviceState& state, Carrier carrier) {
  return reconstruct_current(device, state, carrier, Method::method_a);
}
ElementVectorField reconstruct_method_b(const Device& device, const DeviceState& state, Carrier carrier) {
  return reconstruct_current(device, state, carrier, Method::method_b);
}

ElementVectorField reconstruct_field(const Device& device, const DeviceState& state) {
  const Mesh& mesh = device.mesh();
  if (state.phi.size() != mesh.num_vertices()) throw InvalidArgument("potential does not match the mesh");
  ElementVectorField out;
  out.kind = FieldKind::electric_field;
  const auto& si = mesh.silicon_elements();
  out.values.resize(si.size());
  for (std::size_t i = 0; i < si.size(); ++i) {
    const Index k = si[i];
    const auto& g = mesh.geometry(k);
    std::array<double, 4> phi;
    for (int v = 0; v < 4; ++v) phi[v] = state.phi[mesh.elements()[k][v]];
    const Vec3 gp = p1_gradient(phi, g.grad);
    out.values[i] = {-gp[0] * 1e4, -gp[1] * 1e4, -gp[2] * 1e4};
  }
  return out;
}

// ---------------------------------------------------------------------------

double terminal_current(const Device& device, const ContinuityResiduals& r, int contact) {
  if (contact < 0 || contact >= static_cast<int>(device.num_contacts()))
    throw InvalidArgument("contact index out of range");
  if (r.electron.size() != device.silicon_vertices().size() || r.hole.size() != r.electron.size())
    throw InvalidArgument("residual vectors do not match the device");
  // Electron residual sums to the outward flux of J_n/q, the hole residual
  // to minus the outward flux of J_p/q.
  double sum = 0.0;
  for (Index v : device.mesh().contact_vertices(contact)) {
    const Index s = device.silicon_index(v);
    if (s < 0) continue;
    sum += r.electron[s] - r.hole[s];
  }
  return r.current_scale * sum;
}

double terminal_current(const Device& device, const ContinuityResiduals& r, const std::string& contact) {
  return terminal_current(device, r, device.contact_index(contact));
}

}  // namespace femdd
