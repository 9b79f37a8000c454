#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "femdd/discretization.hpp"
#include "femdd/mesh.hpp"
#include "femdd/physics.hpp"

namespace femdd {

enum class ContactKind { ohmic, gate };

/// Electrical behaviour of a named mesh contact. Ohmic contacts fix phi, n
/// and p; gate contacts fix only phi = bias + workfunction.
struct ContactSpec {
  std::string name;
  ContactKind kind = ContactKind::ohmic;
  double workfunction = 0.0;  // V, gate only
};

/// Dirichlet data for one set of contact biases. NaN marks free entries.
struct BoundaryData {
  std::vector<double> phi;  // per vertex, V
  std::vector<double> n;    // per silicon vertex, 1/cm^3
  std::vector<double> p;    // per silicon vertex, 1/cm^3
};

/// Mesh plus everything derived from it that the solvers reuse: nodal net
/// doping, scaling, scaled P1 edge weights, lumped masses, sparsity patterns
/// and contact data. Immutable; shared read-only between solvers.
class Device {
 public:
  Device(Mesh mesh, MaterialParams params, DopingProfile doping, std::vector<ContactSpec> contacts = {});

  const Mesh& mesh() const { return mesh_; }
  const MaterialParams& params() const { return params_; }
  const DopingProfile& doping() const { return doping_; }
  const Scaling& scaling() const { return scaling_; }

  /// N_D - N_A per vertex (1/cm^3); zero on oxide-only vertices.
  const std::vector<double>& net_doping() const { return net_doping_; }

  /// Vertices carrying carrier unknowns, ascending.
  const std::vector<Index>& silicon_vertices() const { return silicon_vertices_; }
  /// Compact carrier index of a vertex, -1 for oxide-only vertices.
  Index silicon_index(Index v) const { return silicon_index_[v]; }

  /// Scaled P1 edge weights -|K| grad(l_a).grad(l_b) per element, in
  /// kLocalEdges order.
  const std::array<double, 6>& edge_weights(Index k) const { return edge_weights_[k]; }
  double scaled_volume(Index k) const { return scaled_volume_[k]; }
  /// Scaled lumped silicon volume per silicon vertex.
  const std::vector<double>& lumped_mass() const { return lumped_mass_; }
  /// Scaled permittivity eps / (q C0 L0^2 / V_th) per element.
  double scaled_permittivity(Index k) const;

  std::size_t num_contacts() const { return contacts_.size(); }
  const ContactSpec& contact(int c) const { return contacts_[c]; }
  /// Contact index by name; throws InvalidArgument if unknown.
  int contact_index(const std::string& name) const;

  BoundaryData boundary(std::span<const double> biases) const;

  const std::shared_ptr<const SparsePattern>& full_pattern() const { return full_pattern_; }
  const std::shared_ptr<const SparsePattern>& silicon_pattern() const { return silicon_pattern_; }
  /// Silicon edges with a negative total EAFE weight; the discrete maximum
  /// principle is not guaranteed when this is non-zero.
  std::size_t negative_edge_weights() const { return negative_edges_; }

 private:
  Mesh mesh_;
  MaterialParams params_;
  DopingProfile doping_;
  Scaling scaling_;
  std::vector<double> net_doping_;
  std::vector<Index> silicon_vertices_;
  std::vector<Index> silicon_index_;
  std::vector<std::array<double, 6>> edge_weights_;
  std::vector<double> scaled_volume_;
  std::vector<double> lumped_mass_;
  std::vector<ContactSpec> contacts_;
  std::shared_ptr<const SparsePattern> full_pattern_;
  std::shared_ptr<const SparsePattern> silicon_pattern_;
  std::size_t negative_edges_ = 0;
};

}  // namespace femdd
