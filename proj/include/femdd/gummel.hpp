#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "femdd/device.hpp"
#include "femdd/discretization.hpp"
#include "femdd/jrecon.hpp"
#include "femdd/state.hpp"

namespace femdd {

struct SolverOptions {
  double tol = 1e-6;         // on max |dphi|/V_th and max |d log n|, |d log p|
  int max_iter = 100;        // Gummel iterations per bias point
  double damping = 5.0;      // Newton updates clamped to +-damping * V_th
  int poisson_max_inner = 50;
  double poisson_inner_tol = 1e-10;  // V_th units
  LinearSolveOptions poisson_linear{LinearMethod::automatic, 1e-12, 2000};
  LinearSolveOptions continuity_linear{LinearMethod::automatic, 1e-12, 2000};
  bool srh = true;
  bool impact_ionization = false;
  Method method = Method::method_a;  // reconstruction feeding the II rate
  double density_floor = 1e-25;      // relative to n_i, for quasi-Fermi levels
  // Method A: elements whose quasi-Fermi spread is below this many V_th
  // carry no current as far as avalanche generation is concerned.
  double ii_flat_tolerance = 1e-6;
  // Called with every accepted Gummel iterate (monitoring only).
  std::function<void(const DeviceState&)> on_iterate;

  void validate() const;
};

/// Charge-neutral initial guess at the given contact biases: phi from the
/// local asinh formula, n and p at phi_n = phi_p = 0. Contact vertices get
/// their Dirichlet values.
DeviceState initial_state(const Device& device, std::span<const double> biases);

struct StepReport {
  double dphi = 0.0;   // max |delta phi| / V_th
  double dlogn = 0.0;  // max |delta ln n|
  double dlogp = 0.0;  // max |delta ln p|
  int poisson_iterations = 0;
  double increment() const;
};

/// One Gummel pass: damped Poisson Newton loop at frozen quasi-Fermi
/// levels, lagged R/G from the incoming state, electron then hole EAFE
/// solves. Dirichlet data come from state.bias. Throws SolverError on a
/// failed linear solve or a non-positive density.
StepReport gummel_step(const Device& device, DeviceState& state, const SolverOptions& options);

struct BiasPointResult {
  DeviceState state;
  int iterations = 0;
  std::vector<double> history;  // increment per iteration
};

/// Iterates gummel_step until both increments drop below options.tol.
/// Throws NonConvergence (with the increment history) after max_iter.
BiasPointResult solve_bias_point(const Device& device, DeviceState state, std::span<const double> biases,
                                 const SolverOptions& options);

/// Walks every contact linearly from state.bias to `biases` in sub-steps of
/// at most `max_step` volts, halving on failure down to `min_step`.
BiasPointResult ramp_to(const Device& device, DeviceState state, std::span<const double> biases,
                        const SolverOptions& options, double max_step = 0.1, double min_step = 1e-3);

/// Lumped avalanche generation per vertex (1/(cm^3 s)), zero off silicon.
std::vector<double> impact_ionization_nodal(const Device& device, const DeviceState& state, Method method,
                                            double flat_tolerance = 1e-6);

/// Un-eliminated continuity residuals of a state, with R and G evaluated
/// from that same state.
ContinuityResiduals continuity_residuals(const Device& device, const DeviceState& state, const SolverOptions& options);

/// Terminal currents (A, outflow positive), one per contact.
std::vector<double> terminal_currents(const Device& device, const DeviceState& state, const SolverOptions& options);

struct SweepPoint {
  double bias = 0.0;              // swept contact, V
  std::vector<double> currents;   // A, per contact
  int iterations = 0;
  bool converged = true;
  double step = 0.0;              // step that reached this point, V
};

enum class SweepStatus { completed, stalled };

struct SweepResult {
  std::vector<std::string> contacts;
  int swept_contact = -1;
  std::vector<SweepPoint> points;
  SweepStatus status = SweepStatus::completed;
  int step_reductions = 0;
  DeviceState final_state;
};

struct SweepSpec {
  int contact = -1;
  double start = 0.0;
  double stop = 0.0;
  double step = 0.1;
  double min_step = 1e-3;
};

using SweepCallback = std::function<void(const SweepPoint&, const DeviceState&)>;

/// Marches the swept contact from start to stop. Other contacts keep the
/// biases in `state.bias`. A failure at the start point throws; later
/// failures halve the step, and when it falls below min_step the sweep
/// stops with status stalled and everything converged so far.
SweepResult bias_sweep(const Device& device, DeviceState state, const SweepSpec& spec, const SolverOptions& options,
                       const SweepCallback& on_point = {});

}  // namespace femdd
