#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "femdd/mesh.hpp"
#include "femdd/physics.hpp"

namespace femdd {

class Device;

/// B(Z) = Z / (exp(Z) - 1), with B(0) = 1. Accurate to a few ulp on
/// [-700, 700]; throws RangeError outside that window or for non-finite Z.
double bernoulli(double z);

/// Below this |Z| the series 1 - Z/2 + Z^2/12 - Z^4/720 is used.
inline constexpr double kBernoulliSeriesThreshold = 1e-2;

/// The two branches, exposed for the switch-point tests.
double bernoulli_series(double z);
double bernoulli_exact(double z);

// ---------------------------------------------------------------------------
// Sparse systems

/// Compressed-row pattern with a symmetric structure that always contains
/// the diagonal.
class SparsePattern {
 public:
  /// Pattern of an n x n matrix coupling the endpoints of every edge.
  static std::shared_ptr<const SparsePattern> from_edges(std::size_t n, std::span<const std::array<Index, 2>> edges);

  std::size_t rows() const { return row_ptr_.size() - 1; }
  std::size_t nonzeros() const { return cols_.size(); }
  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& cols() const { return cols_; }
  /// Storage position of (row, col); throws InvalidArgument if absent.
  Index find(Index row, Index col) const;

 private:
  std::vector<Index> row_ptr_;
  std::vector<Index> cols_;
};

/// Matrix, right-hand side and Dirichlet data of one linear problem.
struct SparseSystem {
  std::shared_ptr<const SparsePattern> pattern;
  std::vector<double> values;
  std::vector<double> rhs;
  std::vector<std::uint8_t> dirichlet;
  std::vector<double> dirichlet_value;
  bool symmetric = false;

  explicit SparseSystem(std::shared_ptr<const SparsePattern> p);

  std::size_t size() const { return rhs.size(); }
  void add(Index row, Index col, double v) { values[pattern->find(row, col)] += v; }
  double at(Index row, Index col) const;
  void set_dirichlet(Index row, double value);

  /// Replaces every Dirichlet row by an identity row and moves the known
  /// values of Dirichlet columns to the right-hand side, which keeps a
  /// symmetric matrix symmetric.
  void apply_dirichlet();

  std::vector<double> multiply(std::span<const double> x) const;
  /// A x - b.
  std::vector<double> residual(std::span<const double> x) const;
};

struct LinearSolveReport {
  int iterations = 0;
  double residual_norm = 0.0;  // ||A x - b||_2
  bool converged = false;
  std::string method;
  std::string message;
};

enum class LinearMethod { automatic, direct, krylov };

/// `automatic` runs preconditioned CG on symmetric systems (falling back to
/// a sparse Cholesky factorization) and a sparse LU factorization on
/// nonsymmetric ones. `krylov` forces CG / BiCGSTAB with incomplete
/// factorization preconditioners and never falls back.
struct LinearSolveOptions {
  LinearMethod method = LinearMethod::automatic;
  double tol = 1e-12;
  int max_iter = 2000;
};

struct LinearSolveResult {
  std::vector<double> x;
  LinearSolveReport report;
};

/// Solves an assembled system (Dirichlet rows already applied). Success
/// means ||A x - b|| <= tol ||b||, checked on the returned vector; on
/// failure `report.converged` is false and `x` must not be used.
LinearSolveResult solve(const SparseSystem& system, const LinearSolveOptions& options = {});

// ---------------------------------------------------------------------------
// Assembly. All systems are in scaled variables (see Scaling).

/// Nodal fields the Poisson assembly reads, in physical units over all
/// vertices; n and p are ignored on oxide-only vertices.
struct PoissonFields {
  std::span<const double> phi;  // V
  std::span<const double> n;    // 1/cm^3
  std::span<const double> p;    // 1/cm^3
};

/// Newton system for the scaled potential increment of
/// -div(eps grad phi) = q (p - n + N_D - N_A) with frozen quasi-Fermi
/// potentials. Dirichlet rows are marked but not applied, so the raw rows
/// hold the full residual. `dirichlet_phi` has one value per vertex, NaN on
/// free vertices.
SparseSystem assemble_poisson(const Device& device, const PoissonFields& fields, std::span<const double> dirichlet_phi);

/// Stiffness matrix of -div(c grad u) with one coefficient per element, no
/// Dirichlet rows. Used by the Poisson assembly and by manufactured-solution
/// checks.
SparseSystem assemble_stiffness(const Mesh& mesh, std::span<const double> element_coefficient, double length_scale = 1.0);

/// Lumped reaction and source terms of a continuity equation, scaled, one
/// entry per silicon vertex (Device::silicon_vertices() order).
struct ContinuityTerms {
  std::vector<double> reaction;  // coefficient multiplying the unknown density
  std::vector<double> source;    // generation minus the density-independent part of R
};

/// EAFE system for -div(D (grad c - c grad psi)) + k c = s over the silicon
/// vertices, psi = phi/V_th for electrons and -phi/V_th for holes. Unknowns
/// are scaled densities; rows are in silicon_vertices() order. Dirichlet
/// rows are marked with `dirichlet_density` (physical, one per silicon vertex,
/// NaN on free vertices) but not applied.
SparseSystem assemble_continuity_eafe(const Device& device, Carrier carrier, std::span<const double> phi,
                                      const ContinuityTerms& terms, std::span<const double> dirichlet_density);

}  // namespace femdd
