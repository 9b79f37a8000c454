#pragma once
// Reverse-biased symmetric junction with identical ionization coefficients
// for both carriers. Every generated pair is then multiplied by the same
// M = 1/(1 - int alpha dx), wherever it was created, which makes the
// ratio of terminal currents with and without avalanche generation a
// mesh-level oracle.

#include <cmath>
#include <vector>

#include "femdd/gummel.hpp"
#include "support.hpp"

namespace femdd::test {

inline Device junction_bar(double length, int nx, double na, double nd, MaterialParams params = {}) {
  const double h = 1e9;
  DopingProfile doping({ConstantSlab{AxisBox{{-h, 0.5 * length}, {-h, h}, {-h, h}}, Species::acceptor, na},
                        ConstantSlab{AxisBox{{0.5 * length, h}, {-h, h}, {-h, h}}, Species::donor, nd}});
  return Device(bar_mesh(length, nx), params, doping);
}

inline BiasPointResult solve_junction(const Device& dev, double v_left, const SolverOptions& opt) {
  const std::vector<double> zero(dev.num_contacts(), 0.0);
  DeviceState st = solve_bias_point(dev, initial_state(dev, zero), zero, opt).state;
  std::vector<double> b = zero;
  b[dev.contact_index("left")] = v_left;
  return ramp_to(dev, st, b, opt, 0.1, 1e-3);
}

struct MultiplicationCase {
  double integral = 0.0;  // int alpha dx over the junction
  double base = 0.0;      // A, avalanche off
  double multiplied = 0.0;
  double oracle() const { return 1.0 / (1.0 - integral); }
  double measured() const { return multiplied / base; }
};

inline MultiplicationCase multiplication_case() {
  MaterialParams params;
  params.tau_n = params.tau_p = 1e-10;  // raises the generation current well above round-off
  params.ii.a_n = params.ii.a_p = 2.0e4;
  params.ii.b_n = params.ii.b_p = 1.5e5;
  const double length = 1.0, width = 0.05;
  const Device dev = junction_bar(length, 100, 1e17, 1e17, params);
  const double vr = -4.0;

  SolverOptions off;
  off.tol = 1e-9;
  off.max_iter = 400;
  SolverOptions on = off;
  on.impact_ionization = true;

  MultiplicationCase out;
  const auto base = solve_junction(dev, vr, off);
  const auto mult = solve_junction(dev, vr, on);
  out.base = terminal_currents(dev, base.state, off)[1];
  out.multiplied = terminal_currents(dev, mult.state, on)[1];

  // Volume integral of alpha over the cross-section area.
  const auto e = reconstruct_field(dev, mult.state);
  const auto& se = dev.mesh().silicon_elements();
  for (std::size_t i = 0; i < se.size(); ++i) {
    const auto& v = e.values[i];
    const double mag = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    out.integral += ionization_coefficient(mag, Carrier::electron, params.ii) * dev.mesh().geometry(se[i]).volume * 1e-12;
  }
  out.integral /= width * width * 1e-8;
  return out;
}

}  // namespace femdd::test
