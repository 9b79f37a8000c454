#pragma once

#include <array>
#include <variant>
#include <vector>

#include "femdd/mesh.hpp"

namespace femdd {

enum class Carrier { electron, hole };

inline const char* to_string(Carrier c) { return c == Carrier::electron ? "electron" : "hole"; }

namespace constants {
inline constexpr double q = 1.602176634e-19;       // C
inline constexpr double eps0 = 8.8541878128e-14;   // F/cm
inline constexpr double kB = 1.380649e-23;         // J/K
}  // namespace constants

/// Chynoweth coefficients alpha = a * exp(-b / E_par). Defaults are the
/// van Overstraeten - de Man high-field silicon values.
struct ImpactIonizationParams {
  double a_n = 7.03e5;   // 1/cm
  double b_n = 1.231e6;  // V/cm
  double a_p = 6.71e5;   // 1/cm
  double b_p = 1.693e6;  // V/cm
  double field_threshold = 1.0e4;  // V/cm, alpha = 0 below
};

/// Every physical constant the simulator uses. Diffusivities are derived
/// from the mobilities through the Einstein relation, so D = mu * V_th holds
/// exactly.
struct MaterialParams {
  double q = constants::q;
  double thermal_voltage = 0.025852;  // V, 300 K
  double n_i = 1.45e10;               // 1/cm^3
  double eps_si = 11.7 * constants::eps0;
  double eps_ox = 3.9 * constants::eps0;
  double mu_n = 1417.0;   // cm^2/(V s)
  double mu_p = 470.5;    // cm^2/(V s)
  double tau_n = 1.0e-7;  // s
  double tau_p = 1.0e-7;  // s
  ImpactIonizationParams ii;

  double mobility(Carrier c) const { return c == Carrier::electron ? mu_n : mu_p; }
  double diffusivity(Carrier c) const { return mobility(c) * thermal_voltage; }
  double D_n() const { return diffusivity(Carrier::electron); }
  double D_p() const { return diffusivity(Carrier::hole); }

  /// Throws ConfigError naming the first non-positive or non-finite field.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Doping

enum class Species { donor, acceptor };

struct ConstantSlab {
  AxisBox box;  // micrometers
  Species species = Species::acceptor;
  double level = 0.0;  // 1/cm^3
};

/// Gaussian profile along `axis`: peak * exp(-((x_axis - position)/depth)^2)
/// inside the lateral box (the box extent along `axis` is ignored). Outside
/// the lateral box the profile decays as a Gaussian of width
/// `lateral_depth`; zero width means an abrupt lateral edge.
struct GaussianImplant {
  double peak = 0.0;       // 1/cm^3
  double position = 0.0;   // micrometers, along `axis`
  double depth = 0.1;      // micrometers
  int axis = 2;
  AxisBox lateral;
  double lateral_depth = 0.0;
  Species species = Species::donor;
};

using DopingPrimitive = std::variant<ConstantSlab, GaussianImplant>;

class DopingProfile {
 public:
  DopingProfile() = default;
  explicit DopingProfile(std::vector<DopingPrimitive> primitives);

  const std::vector<DopingPrimitive>& primitives() const { return primitives_; }
  double donors(const Vec3& x) const;
  double acceptors(const Vec3& x) const;
  /// N_D - N_A at x (micrometers).
  double net(const Vec3& x) const { return donors(x) - acceptors(x); }

 private:
  std::vector<DopingPrimitive> primitives_;
};

// ---------------------------------------------------------------------------
// Scaling

/// Characteristic magnitudes used to make the discrete equations
/// dimensionless. Every quantity crossing a module boundary is physical; the
/// scaled values live only inside assembly.
struct Scaling {
  double length = 1e-4;        // cm
  double potential = 0.025852; // V
  double concentration = 1.0;  // 1/cm^3
  double diffusivity = 1.0;    // cm^2/s

  static Scaling make(const Mesh& mesh, double max_abs_doping, const MaterialParams& params);

  double current_density() const;  // A/cm^2
  double current() const;          // A
  double rate() const;             // 1/(cm^3 s)
  double time() const;             // s
  void validate() const;
};

// ---------------------------------------------------------------------------
// Statistics and models

/// Maxwell-Boltzmann density. Electrons n = n_i exp((phi - phi_n)/V_th);
/// holes p = n_i exp((phi_p - phi)/V_th). Throws RangeError when the
/// exponent magnitude exceeds 700; `node` labels the message.
double mb_density(double phi, double phi_c, const MaterialParams& params, Carrier carrier, long node = -1);

/// Inverse of mb_density. Densities below floor_factor * n_i are clamped to
/// the floor first.
double quasi_fermi_from_density(double phi, double density, const MaterialParams& params, Carrier carrier,
                                double floor_factor = 1e-25, long node = -1);

struct ContactValues {
  double phi;  // V
  double n;    // 1/cm^3
  double p;    // 1/cm^3
};

/// Charge-neutral equilibrium values at an ohmic contact, shifted by the
/// applied bias.
ContactValues ohmic_contact_values(double net_doping, double bias, const MaterialParams& params);

/// Shockley-Read-Hall net recombination (1/(cm^3 s)).
double srh_recombination(double n, double p, const MaterialParams& params);

/// Ionization coefficient (1/cm) for a field component along the current.
double ionization_coefficient(double e_parallel, Carrier carrier, const ImpactIonizationParams& ii);

/// Avalanche generation (1/(cm^3 s)) from element-constant current
/// densities (A/cm^2) and field (V/cm).
double impact_ionization_rate(const Vec3& j_n, const Vec3& j_p, const Vec3& e, const MaterialParams& params);

}  // namespace femdd
