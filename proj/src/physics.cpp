#include "femdd/physics.hpp"

#include <algorithm>
#include <cmath>

#include "femdd/error.hpp"
#include "format.hpp"

namespace femdd {

void MaterialParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("material.") + name, "must be positive and finite");
  };
  check(q, "q");
  check(thermal_voltage, "thermal_voltage");
  check(n_i, "n_i");
  check(eps_si, "eps_si");
  check(eps_ox, "eps_ox");
  check(mu_n, "mu_n");
  check(mu_p, "mu_p");
  check(tau_n, "tau_n");
  check(tau_p, "tau_p");
  check(ii.a_n, "impact_ionization.a_n");
  check(ii.b_n, "impact_ionization.b_n");
  check(ii.a_p, "impact_ionization.a_p");
  check(ii.b_p, "impact_ionization.b_p");
  check(ii.field_threshold, "impact_ionization.field_threshold");
}

// ---------------------------------------------------------------------------

DopingProfile::DopingProfile(std::vector<DopingPrimitive> primitives) : primitives_(std::move(primitives)) {
  for (const auto& prim : primitives_) {
    if (const auto* s = std::get_if<ConstantSlab>(&prim)) {
      if (!(s->level > 0.0)) throw ConfigError("doping", "constant level must be positive");
    } else {
      const auto& g = std::get<GaussianImplant>(prim);
      if (!(g.peak > 0.0)) throw ConfigError("doping", "gaussian peak must be positive");
      if (!(g.depth > 0.0)) throw ConfigError("doping", "gaussian depth must be positive");
      if (g.axis < 0 || g.axis > 2) throw ConfigError("doping", "gaussian axis must be x, y or z");
      if (g.lateral_depth < 0.0) throw ConfigError("doping", "lateral depth must be >= 0");
    }
  }
}

namespace {

double lateral_factor(const GaussianImplant& g, const Vec3& x) {
  const std::array<const std::array<double, 2>*, 3> lim{&g.lateral.x, &g.lateral.y, &g.lateral.z};
  double f = 1.0;
  for (int d = 0; d < 3; ++d) {
    if (d == g.axis) continue;
    const auto& r = *lim[d];
    double dist = 0.0;
    if (x[d] < r[0]) dist = r[0] - x[d];
    else if (x[d] > r[1]) dist = x[d] - r[1];
    if (dist > 0.0) {
      if (g.lateral_depth <= 0.0) return 0.0;
      f *= std::exp(-(dist / g.lateral_depth) * (dist / g.lateral_depth));
    }
  }
  return f;
}

double species_sum(const std::vector<DopingPrimitive>& prims, const Vec3& x, Species which) {
  double sum = 0.0;
  for (const auto& prim : prims) {
    if (const auto* s = std::get_if<ConstantSlab>(&prim)) {
      if (s->species == which && s->box.contains(x, 1e-12)) sum += s->level;
    } else {
      const auto& g = std::get<GaussianImplant>(prim);
      if (g.species != which) continue;
      const double t = (x[g.axis] - g.position) / g.depth;
      sum += g.peak * std::exp(-t * t) * lateral_factor(g, x);
    }
  }
  return sum;
}

}  // namespace

double DopingProfile::donors(const Vec3& x) const { return species_sum(primitives_, x, Species::donor); }
double DopingProfile::acceptors(const Vec3& x) const { return species_sum(primitives_, x, Species::acceptor); }

// ---------------------------------------------------------------------------

Scaling Scaling::make(const Mesh& mesh, double max_abs_doping, const MaterialParams& params) {
  Scaling s;
  double ext = 0.0;
  for (int d = 0; d < 3; ++d) ext = std::max(ext, mesh.bounding_max()[d] - mesh.bounding_min()[d]);
  s.length = ext * 1e-4;
  s.potential = params.thermal_voltage;
  s.concentration = std::max(max_abs_doping, params.n_i);
  s.diffusivity = std::max(params.D_n(), params.D_p());
  s.validate();
  return s;
}

double Scaling::current_density() const { return constants::q * diffusivity * concentration / length; }
double Scaling::current() const { return current_density() * length * length; }
double Scaling::rate() const { return diffusivity * concentration / (length * length); }
double Scaling::time() const { return length * length / diffusivity; }

void Scaling::validate() const {
  for (double v : {length, potential, concentration, diffusivity})
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("scaling factors must be positive and finite");
}

// ---------------------------------------------------------------------------

double mb_density(double phi, double phi_c, const MaterialParams& params, Carrier carrier, long node) {
  const double x = carrier == Carrier::electron ? (phi - phi_c) / params.thermal_voltage
                                                : (phi_c - phi) / params.thermal_voltage;
  if (!(std::abs(x) <= 700.0))
    throw RangeError("Maxwell-Boltzmann exponent " + format_short(x) + " out of range" +
                         (node >= 0 ? " at node " + std::to_string(node) : std::string()),
                     node);
  return params.n_i * std::exp(x);
}

double quasi_fermi_from_density(double phi, double density, const MaterialParams& params, Carrier carrier,
                                double floor_factor, long node) {
  if (!(density >= 0.0))
    throw RangeError("non-positive carrier density" + (node >= 0 ? " at node " + std::to_string(node) : std::string()),
                     node);
  const double c = std::max(density, floor_factor * params.n_i);
  if (!(c > 0.0)) throw RangeError("density floor is not positive", node);
  const double l = params.thermal_voltage * std::log(c / params.n_i);
  return carrier == Carrier::electron ? phi - l : phi + l;
}

ContactValues ohmic_contact_values(double net_doping, double bias, const MaterialParams& params) {
  const double ni = params.n_i;
  const double half = 0.5 * net_doping;
  const double s = std::sqrt(half * half + ni * ni);
  ContactValues v{};
  // Add the two same-sign terms and recover the minority carrier from
  // n p = n_i^2, avoiding cancellation for strongly doped contacts.
  if (net_doping >= 0.0) {
    v.n = half + s;
    v.p = ni * ni / v.n;
  } else {
    v.p = -half + s;
    v.n = ni * ni / v.p;
  }
  v.phi = bias + params.thermal_voltage * std::asinh(net_doping / (2.0 * ni));
  return v;
}

double srh_recombination(double n, double p, const MaterialParams& params) {
  const double ni = params.n_i;
  const double den = params.tau_p * (n + ni) + params.tau_n * (p + ni);
  return (n * p - ni * ni) / den;
}

double ionization_coefficient(double e_parallel, Carrier carrier, const ImpactIonizationParams& ii) {
  const double e = std::abs(e_parallel);
  if (e < ii.field_threshold) return 0.0;
  return carrier == Carrier::electron ? ii.a_n * std::exp(-ii.b_n / e) : ii.a_p * std::exp(-ii.b_p / e);
}

double impact_ionization_rate(const Vec3& j_n, const Vec3& j_p, const Vec3& e, const MaterialParams& params) {
  auto term = [&](const Vec3& j, Carrier c) {
    const double jj = std::sqrt(j[0] * j[0] + j[1] * j[1] + j[2] * j[2]);
    if (jj == 0.0) return 0.0;
    const double e_par = std::abs(e[0] * j[0] + e[1] * j[1] + e[2] * j[2]) / jj;
    return ionization_coefficient(e_par, c, params.ii) * jj;
  };
  return (term(j_n, Carrier::electron) + term(j_p, Carrier::hole)) / params.q;
}

}  // namespace femdd
