#include "femdd/gummel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "femdd/error.hpp"
#include "format.hpp"
#include "log.hpp"

namespace femdd {

void DeviceState::update_quasi_fermi(const Device& device, double floor_factor) {
  const auto& params = device.params();
  phi_n.assign(phi.size(), 0.0);
  phi_p.assign(phi.size(), 0.0);
  for (Index v : device.silicon_vertices()) {
    phi_n[v] = quasi_fermi_from_density(phi[v], n[v], params, Carrier::electron, floor_factor, v);
    phi_p[v] = quasi_fermi_from_density(phi[v], p[v], params, Carrier::hole, floor_factor, v);
  }
}

void SolverOptions::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
  if (!(damping > 0.0)) throw InvalidArgument("damping must be positive");
  if (poisson_max_inner < 1 || !(poisson_inner_tol > 0.0)) throw InvalidArgument("bad Poisson inner loop settings");
  if (!(poisson_linear.tol > 0.0) || !(continuity_linear.tol > 0.0)) throw InvalidArgument("linear tolerance must be positive");
  if (!(density_floor > 0.0)) throw InvalidArgument("density floor must be positive");
}

double StepReport::increment() const { return std::max({dphi, dlogn, dlogp}); }

namespace {

std::string bias_fields(const Device& device, std::span<const double> bias) {
  std::string s;
  for (std::size_t c = 0; c < bias.size(); ++c) {
    if (c) s += ' ';
    s += "bias." + device.contact(static_cast<int>(c)).name + "=" + format_short(bias[c]);
  }
  return s;
}

void apply_contacts(const Device& device, DeviceState& state, const BoundaryData& bd) {
  const auto& si = device.silicon_vertices();
  for (std::size_t v = 0; v < bd.phi.size(); ++v)
    if (!std::isnan(bd.phi[v])) state.phi[v] = bd.phi[v];
  for (std::size_t s = 0; s < si.size(); ++s) {
    if (!std::isnan(bd.n[s])) state.n[si[s]] = bd.n[s];
    if (!std::isnan(bd.p[s])) state.p[si[s]] = bd.p[s];
  }
}

// Damped Newton loop for Poisson with phi_n, phi_p frozen. Returns the
// number of linear solves.
int solve_poisson(const Device& device, DeviceState& st, const BoundaryData& bd, const SolverOptions& opt) {
  const auto& params = device.params();
  const double vt = params.thermal_voltage;
  const std::size_t nv = st.phi.size();
  std::vector<double> n(nv, 0.0), p(nv, 0.0);
  int it = 0;
  for (; it < opt.poisson_max_inner;) {
    for (Index v : device.silicon_vertices()) {
      n[v] = mb_density(st.phi[v], st.phi_n[v], params, Carrier::electron, v);
      p[v] = mb_density(st.phi[v], st.phi_p[v], params, Carrier::hole, v);
    }
    SparseSystem sys = assemble_poisson(device, PoissonFields{st.phi, n, p}, bd.phi);
    sys.apply_dirichlet();
    LinearSolveResult res = solve(sys, opt.poisson_linear);
    ++it;
    if (!res.report.converged)
      throw SolverError("Poisson linear solve failed (" + res.report.method + "): " + res.report.message);
    double dmax = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      const double d = std::clamp(res.x[v], -opt.damping, opt.damping);
      if (!std::isfinite(d)) throw SolverError("non-finite potential update at node " + std::to_string(v));
      st.phi[v] += d * vt;
      dmax = std::max(dmax, std::abs(res.x[v]));
    }
    if (dmax < opt.poisson_inner_tol) break;
  }
  for (Index v : device.silicon_vertices()) {
    st.n[v] = mb_density(st.phi[v], st.phi_n[v], params, Carrier::electron, v);
    st.p[v] = mb_density(st.phi[v], st.phi_p[v], params, Carrier::hole, v);
  }
  return it;
}

// Method A currents are proportional to the quasi-Fermi gradient; a spread
// at round-off level means no current, and must not seed avalanche
// generation in the high built-in fields of a junction.
bool flat(const std::vector<double>& qf, const std::array<Index, 4>& e, double tol) {
  double lo = qf[e[0]], hi = qf[e[0]];
  for (int v = 1; v < 4; ++v) {
    lo = std::min(lo, qf[e[v]]);
    hi = std::max(hi, qf[e[v]]);
  }
  return hi - lo <= tol;
}

// Per-vertex lumped average of the avalanche rate.
std::vector<double> ii_silicon(const Device& device, const DeviceState& state, Method method, double flat_tol) {
  const Mesh& mesh = device.mesh();
  auto jn = reconstruct_current(device, state, Carrier::electron, method);
  auto jp = reconstruct_current(device, state, Carrier::hole, method);
  const auto e = reconstruct_field(device, state);
  const auto& se = mesh.silicon_elements();
  if (method == Method::method_a) {
    const double tol = flat_tol * device.params().thermal_voltage;
    for (std::size_t i = 0; i < se.size(); ++i) {
      if (flat(state.phi_n, mesh.elements()[se[i]], tol)) jn.values[i] = {0.0, 0.0, 0.0};
      if (flat(state.phi_p, mesh.elements()[se[i]], tol)) jp.values[i] = {0.0, 0.0, 0.0};
    }
  }
  std::vector<double> g(device.silicon_vertices().size(), 0.0);
  for (std::size_t i = 0; i < se.size(); ++i) {
    const double rate = impact_ionization_rate(jn.values[i], jp.values[i], e.values[i], device.params());
    if (rate == 0.0) continue;
    const double w = 0.25 * device.scaled_volume(se[i]);
    for (Index v : mesh.elements()[se[i]]) g[device.silicon_index(v)] += w * rate;
  }
  const auto& m = device.lumped_mass();
  for (std::size_t s = 0; s < g.size(); ++s) g[s] /= m[s];
  return g;
}

struct Rates {
  std::vector<double> srh_den;  // physical SRH denominator
  std::vector<double> gen;      // physical generation
};

Rates lagged_rates(const Device& device, const DeviceState& st, const SolverOptions& opt) {
  const auto& params = device.params();
  const auto& si = device.silicon_vertices();
  Rates r;
  r.srh_den.resize(si.size());
  for (std::size_t s = 0; s < si.size(); ++s)
    r.srh_den[s] = params.tau_p * (st.n[si[s]] + params.n_i) + params.tau_n * (st.p[si[s]] + params.n_i);
  if (opt.impact_ionization)
    r.gen = ii_silicon(device, st, opt.method, opt.ii_flat_tolerance);
  else
    r.gen.assign(si.size(), 0.0);
  return r;
}

// SRH split. With the other carrier o frozen, R(x) = (o x - n_i^2)/(A + B x)
// in the solved density x. Linearizing about the old x converges in a few
// passes where generation dominates and x sets the denominator (depleted
// regions, where lagging the denominator contracts only by x/(x + 2 n_i)
// per pass); it is used whenever its source part stays non-negative, so the
// matrix and right-hand side keep their signs. Otherwise R = x o/den -
// n_i^2/den with den lagged.
ContinuityTerms split_terms(const Device& device, const DeviceState& st, const Rates& r, Carrier c,
                            const SolverOptions& opt) {
  const auto& params = device.params();
  const auto& sc = device.scaling();
  const auto& si = device.silicon_vertices();
  const double t = sc.time(), rate = sc.rate();
  ContinuityTerms terms;
  terms.reaction.assign(si.size(), 0.0);
  terms.source.assign(si.size(), 0.0);
  for (std::size_t s = 0; s < si.size(); ++s) {
    double k = 0.0, src = r.gen[s];
    if (opt.srh) {
      const bool electron = c == Carrier::electron;
      const double x = electron ? st.n[si[s]] : st.p[si[s]];
      const double o = electron ? st.p[si[s]] : st.n[si[s]];
      const double ni2 = params.n_i * params.n_i;
      const double b = electron ? params.tau_p : params.tau_n;
      const double a = r.srh_den[s] - b * x;
      const double den2 = r.srh_den[s] * r.srh_den[s];
      const double lin = ni2 * (a + 2.0 * b * x) - o * b * x * x;
      if (lin >= 0.0) {
        k = (o * a + b * ni2) / den2;
        src += lin / den2;
      } else {
        k = o / r.srh_den[s];
        src += ni2 / r.srh_den[s];
      }
    }
    terms.reaction[s] = k * t;
    terms.source[s] = src / rate;
  }
  return terms;
}

std::vector<double> solve_continuity(const Device& device, const DeviceState& st, Carrier c,
                                     const ContinuityTerms& terms, const BoundaryData& bd, const SolverOptions& opt) {
  SparseSystem sys = assemble_continuity_eafe(device, c, st.phi, terms, c == Carrier::electron ? bd.n : bd.p);
  sys.apply_dirichlet();

  // Slotboom substitution c = d u with d = exp(psi - mid): the column
  // scaled EAFE matrix A D is symmetric with zero row sums, hence SPD once
  // the Dirichlet rows are eliminated. A symmetric Jacobi scaling on top
  // brings the diagonal to one; Cholesky then resolves densities spanning
  // tens of decades to a few ulp, where LU on the raw matrix loses up to
  // 1e-5 relative in minority regions.
  const auto& si = device.silicon_vertices();
  const double vt = device.params().thermal_voltage;
  const double sign = c == Carrier::electron ? 1.0 : -1.0;
  double lo = INFINITY, hi = -INFINITY;
  for (Index v : si) {
    lo = std::min(lo, sign * st.phi[v]);
    hi = std::max(hi, sign * st.phi[v]);
  }
  const double mid = 0.5 * (lo + hi);
  // Beyond the exponent window the scaled matrix is no longer symmetric.
  const bool symmetric = (hi - mid) / vt <= 600.0;
  std::vector<double> d(si.size());
  for (std::size_t s = 0; s < si.size(); ++s) d[s] = std::exp(std::clamp((sign * st.phi[si[s]] - mid) / vt, -600.0, 600.0));
  const auto& rp = sys.pattern->row_ptr();
  const auto& cols = sys.pattern->cols();
  for (std::size_t i = 0; i < si.size(); ++i)
    for (Index k = rp[i]; k < rp[i + 1]; ++k) sys.values[k] *= d[cols[k]];
  std::vector<double> j(si.size());
  for (std::size_t i = 0; i < si.size(); ++i) j[i] = 1.0 / std::sqrt(sys.at(static_cast<Index>(i), static_cast<Index>(i)));
  for (std::size_t i = 0; i < si.size(); ++i) {
    for (Index k = rp[i]; k < rp[i + 1]; ++k) sys.values[k] *= j[i] * j[cols[k]];
    sys.rhs[i] *= j[i];
  }
  sys.symmetric = symmetric;

  // Krylov residual tolerances say little about small entries; factorize.
  LinearSolveOptions lin = opt.continuity_linear;
  if (lin.method == LinearMethod::automatic) lin.method = LinearMethod::direct;
  LinearSolveResult res = solve(sys, lin);
  if (!res.report.converged)
    throw SolverError(std::string(to_string(c)) + " continuity solve failed (" + res.report.method +
                      "): " + res.report.message);
  const double c0 = device.scaling().concentration;
  for (std::size_t s = 0; s < res.x.size(); ++s) res.x[s] *= j[s] * d[s] * c0;
  return std::move(res.x);
}

}  // namespace

DeviceState initial_state(const Device& device, std::span<const double> biases) {
  const Mesh& mesh = device.mesh();
  const auto& params = device.params();
  BoundaryData bd = device.boundary(biases);
  DeviceState st;
  const std::size_t nv = mesh.num_vertices();
  st.phi.assign(nv, 0.0);
  st.n.assign(nv, 0.0);
  st.p.assign(nv, 0.0);
  st.bias.assign(biases.begin(), biases.end());
  for (Index v : device.silicon_vertices()) {
    const auto cv = ohmic_contact_values(device.net_doping()[v], 0.0, params);
    st.phi[v] = cv.phi;
    st.n[v] = cv.n;
    st.p[v] = cv.p;
  }
  apply_contacts(device, st, bd);
  st.update_quasi_fermi(device);
  return st;
}

StepReport gummel_step(const Device& device, DeviceState& state, const SolverOptions& opt) {
  const auto& si = device.silicon_vertices();
  const double vt = device.params().thermal_voltage;
  const BoundaryData bd = device.boundary(state.bias);
  const DeviceState old = state;

  StepReport rep;
  DeviceState st = state;
  try {
    rep.poisson_iterations = solve_poisson(device, st, bd, opt);
  } catch (const RangeError& e) {
    throw SolverError(e.what());
  }

  const Rates rates = lagged_rates(device, old, opt);
  const auto n = solve_continuity(device, st, Carrier::electron,
                                  split_terms(device, old, rates, Carrier::electron, opt), bd, opt);
  const auto p = solve_continuity(device, st, Carrier::hole, split_terms(device, old, rates, Carrier::hole, opt), bd,
                                  opt);
  for (std::size_t s = 0; s < si.size(); ++s) {
    const Index v = si[s];
    if (!(n[s] > 0.0) || !(p[s] > 0.0) || !std::isfinite(n[s]) || !std::isfinite(p[s]))
      throw SolverError("non-positive carrier density at node " + std::to_string(v) + " (n=" + format_short(n[s]) +
                        " p=" + format_short(p[s]) + ")");
    st.n[v] = n[s];
    st.p[v] = p[s];
  }
  st.update_quasi_fermi(device, opt.density_floor);

  for (std::size_t v = 0; v < st.phi.size(); ++v) rep.dphi = std::max(rep.dphi, std::abs(st.phi[v] - old.phi[v]) / vt);
  for (Index v : si) {
    rep.dlogn = std::max(rep.dlogn, std::abs(std::log(st.n[v] / old.n[v])));
    rep.dlogp = std::max(rep.dlogp, std::abs(std::log(st.p[v] / old.p[v])));
  }
  state = std::move(st);
  return rep;
}

BiasPointResult solve_bias_point(const Device& device, DeviceState state, std::span<const double> biases,
                                 const SolverOptions& opt) {
  opt.validate();
  if (biases.size() != device.num_contacts()) throw InvalidArgument("one bias per contact expected");
  state.bias.assign(biases.begin(), biases.end());
  // Contact values first so the Poisson loop sees consistent boundary levels.
  apply_contacts(device, state, device.boundary(biases));
  state.update_quasi_fermi(device, opt.density_floor);

  BiasPointResult out;
  const std::string where = bias_fields(device, biases);
  for (int it = 1; it <= opt.max_iter; ++it) {
    const StepReport r = gummel_step(device, state, opt);
    out.history.push_back(r.increment());
    out.iterations = it;
    if (opt.on_iterate) opt.on_iterate(state);
    if (log_enabled(LogLevel::info))
      log_message(LogLevel::info, "event=gummel " + where + " iter=" + std::to_string(it) + " dphi=" +
                                      format_short(r.dphi) + " dlogn=" + format_short(r.dlogn) +
                                      " dlogp=" + format_short(r.dlogp) + " poisson=" +
                                      std::to_string(r.poisson_iterations));
    if (r.dphi < opt.tol && r.dlogn < opt.tol && r.dlogp < opt.tol) {
      out.state = std::move(state);
      return out;
    }
    // Linear contraction measured over the last few passes; once past the
    // erratic start, give up when the tolerance is out of reach within
    // max_iter at that rate.
    constexpr int kWindow = 5;
    if (it >= std::max(2 * kWindow, opt.max_iter / 4)) {
      const auto& h = out.history;
      const double now = h[it - 1], then = h[it - 1 - kWindow];
      const double rho = std::pow(now / then, 1.0 / kWindow);
      if (rho >= 1.0 || it + std::log(opt.tol / now) / std::log(rho) > 1.5 * opt.max_iter) {
        log_message(LogLevel::info, "event=gummel_abort " + where + " iter=" + std::to_string(it) +
                                        " contraction=" + format_short(rho));
        break;
      }
    }
  }
  throw NonConvergence("Gummel iteration did not converge in " + std::to_string(out.iterations) + " iterations at " +
                           where,
                       std::move(out.history));
}

BiasPointResult ramp_to(const Device& device, DeviceState state, std::span<const double> biases,
                        const SolverOptions& opt, double max_step, double min_step) {
  if (biases.size() != device.num_contacts()) throw InvalidArgument("one bias per contact expected");
  if (!(max_step > 0.0) || !(min_step > 0.0)) throw InvalidArgument("ramp steps must be positive");
  const std::vector<double> from = state.bias;
  double span = 0.0;
  for (std::size_t c = 0; c < biases.size(); ++c) span = std::max(span, std::abs(biases[c] - from[c]));
  if (span == 0.0) return solve_bias_point(device, std::move(state), biases, opt);

  BiasPointResult last;
  last.state = std::move(state);
  double t = 0.0, h = std::min(1.0, max_step / span);
  std::vector<double> b(biases.size());
  while (t < 1.0) {
    const double tn = std::min(1.0, t + h);
    for (std::size_t c = 0; c < b.size(); ++c) b[c] = tn == 1.0 ? biases[c] : from[c] + tn * (biases[c] - from[c]);
    try {
      BiasPointResult r = solve_bias_point(device, last.state, b, opt);
      last = std::move(r);
      t = tn;
      h = std::min(2.0 * h, max_step / span);
    } catch (const SolverError& e) {
      h *= 0.5;
      log_message(LogLevel::warn, "event=ramp_reduce " + bias_fields(device, b) + " step=" + format_short(h * span));
      if (h * span < min_step) throw;
    }
  }
  return last;
}

std::vector<double> impact_ionization_nodal(const Device& device, const DeviceState& state, Method method,
                                            double flat_tolerance) {
  const auto g = ii_silicon(device, state, method, flat_tolerance);
  std::vector<double> out(device.mesh().num_vertices(), 0.0);
  const auto& si = device.silicon_vertices();
  for (std::size_t s = 0; s < si.size(); ++s) out[si[s]] = g[s];
  return out;
}

ContinuityResiduals continuity_residuals(const Device& device, const DeviceState& state, const SolverOptions& opt) {
  const auto& params = device.params();
  const auto& sc = device.scaling();
  const auto& si = device.silicon_vertices();
  const std::vector<double> gen =
      opt.impact_ionization ? ii_silicon(device, state, opt.method, opt.ii_flat_tolerance) : std::vector<double>(si.size(), 0.0);
  ContinuityTerms terms;
  terms.reaction.assign(si.size(), 0.0);
  terms.source.resize(si.size());
  for (std::size_t s = 0; s < si.size(); ++s) {
    const double r = opt.srh ? srh_recombination(state.n[si[s]], state.p[si[s]], params) : 0.0;
    terms.source[s] = (gen[s] - r) / sc.rate();
  }
  const std::vector<double> none(si.size(), std::numeric_limits<double>::quiet_NaN());
  ContinuityResiduals out;
  out.current_scale = sc.current();
  for (Carrier c : {Carrier::electron, Carrier::hole}) {
    const SparseSystem sys = assemble_continuity_eafe(device, c, state.phi, terms, none);
    const auto& dens = c == Carrier::electron ? state.n : state.p;
    std::vector<double> x(si.size());
    for (std::size_t s = 0; s < si.size(); ++s) x[s] = dens[si[s]] / sc.concentration;
    (c == Carrier::electron ? out.electron : out.hole) = sys.residual(x);
  }
  return out;
}

std::vector<double> terminal_currents(const Device& device, const DeviceState& state, const SolverOptions& opt) {
  const ContinuityResiduals r = continuity_residuals(device, state, opt);
  std::vector<double> out(device.num_contacts());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = terminal_current(device, r, static_cast<int>(c));
  return out;
}

SweepResult bias_sweep(const Device& device, DeviceState state, const SweepSpec& spec, const SolverOptions& opt,
                       const SweepCallback& on_point) {
  if (spec.contact < 0 || spec.contact >= static_cast<int>(device.num_contacts()))
    throw InvalidArgument("swept contact index out of range");
  if (!std::isfinite(spec.start) || !std::isfinite(spec.stop) || spec.start == spec.stop)
    throw InvalidArgument("sweep start and stop must be finite and different");
  if (!(spec.step > 0.0) || !(spec.min_step > 0.0) || spec.min_step > spec.step)
    throw InvalidArgument("sweep steps must satisfy 0 < min_step <= step");
  if (state.bias.size() != device.num_contacts()) throw InvalidArgument("state biases do not match the contacts");

  SweepResult out;
  for (std::size_t c = 0; c < device.num_contacts(); ++c) out.contacts.push_back(device.contact(static_cast<int>(c)).name);
  out.swept_contact = spec.contact;
  const double dir = spec.stop > spec.start ? 1.0 : -1.0;

  auto record = [&](const BiasPointResult& r, double bias, double step) {
    SweepPoint pt;
    pt.bias = bias;
    pt.currents = terminal_currents(device, r.state, opt);
    pt.iterations = r.iterations;
    pt.step = step;
    std::string cur;
    for (std::size_t c = 0; c < pt.currents.size(); ++c)
      cur += " I." + out.contacts[c] + "=" + format_short(pt.currents[c]);
    log_message(LogLevel::info, "event=point bias=" + format_short(bias) + " iter=" + std::to_string(pt.iterations) +
                                    " step=" + format_short(step) + cur);
    out.points.push_back(pt);
    if (on_point) on_point(out.points.back(), r.state);
  };

  std::vector<double> b = state.bias;
  b[spec.contact] = spec.start;
  BiasPointResult cur;
  try {
    cur = solve_bias_point(device, std::move(state), b, opt);
  } catch (const NonConvergence& e) {
    throw SolverError(std::string("first sweep point failed: ") + e.what());
  }
  record(cur, spec.start, 0.0);

  double v = spec.start, h = spec.step;
  while (dir * (spec.stop - v) > 0.0) {
    double next = std::nearbyint((v + dir * h) * 1e12) * 1e-12;
    if (dir * (next - spec.stop) >= -1e-12 * spec.step) next = spec.stop;
    b[spec.contact] = next;
    try {
      BiasPointResult r = solve_bias_point(device, cur.state, b, opt);
      const double used = std::abs(next - v);
      cur = std::move(r);
      v = next;
      record(cur, v, used);
      h = std::min(2.0 * h, spec.step);
    } catch (const SolverError& e) {
      h *= 0.5;
      ++out.step_reductions;
      log_message(LogLevel::warn, "event=step_reduce bias=" + format_short(next) + " step=" + format_short(h));
      if (h < spec.min_step) {
        out.status = SweepStatus::stalled;
        log_message(LogLevel::warn, "event=stall bias=" + format_short(v) + " step=" + format_short(h));
        break;
      }
    }
  }
  out.final_state = std::move(cur.state);
  return out;
}

}  // namespace femdd
