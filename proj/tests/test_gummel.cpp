#include <doctest.h>

#include <cmath>
#include <numeric>

#include "femdd/error.hpp"
#include "femdd/gummel.hpp"
#include "avalanche.hpp"
#include "support.hpp"

using namespace femdd;
using femdd::test::rel_err;

using test::junction_bar;

namespace {

BiasPointResult solve_at(const Device& dev, double v_left, const SolverOptions& opt) {
  return test::solve_junction(dev, v_left, opt);
}

}  // namespace

TEST_CASE("solver options validation") {
  SolverOptions o;
  CHECK_NOTHROW(o.validate());
  o.tol = 0.0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o = {};
  o.max_iter = 0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
}

TEST_CASE("junction at equilibrium") {
  const Device dev = junction_bar(0.4, 40, 1e17, 1e17);
  SolverOptions opt;
  opt.tol = 1e-10;
  const std::vector<double> zero(2, 0.0);
  const auto r = solve_bias_point(dev, initial_state(dev, zero), zero, opt);
  const auto& st = r.state;
  const double ni2 = dev.params().n_i * dev.params().n_i;
  for (Index v : dev.silicon_vertices()) {
    CHECK(st.n[v] > 0.0);
    CHECK(st.p[v] > 0.0);
    CHECK(rel_err(st.n[v] * st.p[v], ni2) < 1e-6);
  }
  // Built-in potential across the junction.
  const double vbi = dev.params().thermal_voltage * std::log(1e17 * 1e17 / ni2);
  double lo = 1e9, hi = -1e9;
  for (double v : st.phi) lo = std::min(lo, v), hi = std::max(hi, v);
  CHECK(hi - lo == doctest::Approx(vbi).epsilon(1e-6));
  const auto i = terminal_currents(dev, st, opt);
  for (double c : i) CHECK(std::abs(c) < 1e-15);
  // Method A current vanishes identically at equilibrium.
  for (Carrier c : {Carrier::electron, Carrier::hole})
    for (const auto& j : reconstruct_method_a(dev, st, c).values) CHECK(std::abs(j[0]) + std::abs(j[1]) + std::abs(j[2]) < 1e-6);
}

TEST_CASE("forward bias: conservation, ideal diode slope and iteration history") {
  const Device dev = junction_bar(0.4, 40, 1e17, 1e17);
  SolverOptions opt;
  opt.tol = 1e-10;
  const auto a = solve_at(dev, 0.5, opt);
  const auto b = solve_at(dev, 0.6, opt);
  const auto ia = terminal_currents(dev, a.state, opt);
  const auto ib = terminal_currents(dev, b.state, opt);
  CHECK(ia[0] < 0.0);  // outflow positive: current enters the p side, leaves through the right contact
  CHECK(std::abs(ia[0] + ia[1]) < 1e-8 * std::abs(ia[0]));
  CHECK(std::abs(ib[0] + ib[1]) < 1e-8 * std::abs(ib[0]));
  // Short diode with recombination: between the ideal exp(V/V_th) and exp(V/2V_th).
  const double ratio = ib[0] / ia[0];
  const double vt = dev.params().thermal_voltage;
  CHECK(ratio < std::exp(0.1 / vt) * 1.01);
  CHECK(ratio > std::exp(0.1 / (2 * vt)));
  REQUIRE(b.history.size() == static_cast<std::size_t>(b.iterations));
  CHECK(b.history.back() < opt.tol);
}

TEST_CASE("non-convergence is reported with its history") {
  const Device dev = junction_bar(0.4, 20, 1e17, 1e17);
  SolverOptions opt;
  opt.tol = 1e-14;
  opt.max_iter = 2;
  const std::vector<double> zero(2, 0.0);
  std::vector<double> b{0.4, 0.0};
  try {
    solve_bias_point(dev, initial_state(dev, zero), b, opt);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.history().size() == 2);
    CHECK(e.code() == Error::Code::solver);
  }
  CHECK_THROWS_AS(solve_bias_point(dev, initial_state(dev, zero), std::vector<double>{0.0}, opt), InvalidArgument);
}

TEST_CASE("bias sweep records every point") {
  const Device dev = junction_bar(0.4, 20, 1e17, 1e17);
  SolverOptions opt;
  opt.tol = 1e-8;
  const std::vector<double> zero(2, 0.0);
  SweepSpec spec;
  spec.contact = dev.contact_index("left");
  spec.start = 0.0;
  spec.stop = 0.3;
  spec.step = 0.1;
  int seen = 0;
  const auto res = bias_sweep(dev, initial_state(dev, zero), spec, opt, [&](const SweepPoint&, const DeviceState&) { ++seen; });
  CHECK(res.status == SweepStatus::completed);
  REQUIRE(res.points.size() == 4);
  CHECK(seen == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(res.points[k].bias == doctest::Approx(0.1 * k));
  for (std::size_t k = 2; k < 4; ++k) CHECK(res.points[k].currents[0] < res.points[k - 1].currents[0]);
  CHECK(res.final_state.bias[spec.contact] == doctest::Approx(0.3));
}

TEST_CASE("avalanche multiplication matches 1/(1 - int alpha dx) for equal coefficients") {
  const auto m = test::multiplication_case();
  MESSAGE("int alpha dx = " << m.integral << ", I0 = " << m.base << ", I1 = " << m.multiplied);
  REQUIRE(m.integral > 0.2);
  REQUIRE(m.integral < 0.8);
  CHECK(std::abs(m.base) > 1e-16);
  CHECK(rel_err(m.measured(), m.oracle()) < 0.05);
}
