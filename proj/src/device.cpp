#include "femdd/device.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "femdd/error.hpp"
#include "log.hpp"

namespace femdd {

Device::Device(Mesh mesh, MaterialParams params, DopingProfile doping, std::vector<ContactSpec> contacts)
    : mesh_(std::move(mesh)), params_(params), doping_(std::move(doping)) {
  params_.validate();
  const std::size_t nv = mesh_.num_vertices();

  silicon_index_.assign(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    if (!mesh_.is_silicon_vertex(static_cast<Index>(v))) continue;
    silicon_index_[v] = static_cast<Index>(silicon_vertices_.size());
    silicon_vertices_.push_back(static_cast<Index>(v));
  }
  if (silicon_vertices_.empty()) throw MeshError("device has no silicon region");

  net_doping_.assign(nv, 0.0);
  double max_abs = 0.0;
  for (Index v : silicon_vertices_) {
    net_doping_[v] = doping_.net(mesh_.vertices()[v]);
    max_abs = std::max(max_abs, std::abs(net_doping_[v]));
  }
  scaling_ = Scaling::make(mesh_, max_abs, params_);

  // Micrometer geometry to scaled geometry: lengths scale by s.
  const double s = 1e-4 / scaling_.length;
  edge_weights_.resize(mesh_.num_elements());
  scaled_volume_.resize(mesh_.num_elements());
  lumped_mass_.assign(silicon_vertices_.size(), 0.0);
  for (std::size_t k = 0; k < mesh_.num_elements(); ++k) {
    const auto& g = mesh_.geometry(static_cast<Index>(k));
    scaled_volume_[k] = g.volume * s * s * s;
    for (int l = 0; l < 6; ++l) {
      const auto& ga = g.grad[kLocalEdges[l][0]];
      const auto& gb = g.grad[kLocalEdges[l][1]];
      edge_weights_[k][l] = -g.volume * (ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2]) * s;
    }
    if (mesh_.region(static_cast<Index>(k)) == Region::silicon)
      for (Index v : mesh_.elements()[k]) lumped_mass_[silicon_index_[v]] += 0.25 * scaled_volume_[k];
  }

  full_pattern_ = SparsePattern::from_edges(nv, mesh_.edges());

  // Carrier coupling only through edges of silicon elements.
  std::map<std::array<Index, 2>, double> si_edges;
  for (Index k : mesh_.silicon_elements()) {
    const auto& e = mesh_.elements()[k];
    for (int l = 0; l < 6; ++l) {
      Index a = silicon_index_[e[kLocalEdges[l][0]]], b = silicon_index_[e[kLocalEdges[l][1]]];
      si_edges[{std::min(a, b), std::max(a, b)}] += edge_weights_[k][l];
    }
  }
  std::vector<std::array<Index, 2>> edge_list;
  edge_list.reserve(si_edges.size());
  for (const auto& [edge, w] : si_edges) {
    edge_list.push_back(edge);
    if (w < -1e-14) ++negative_edges_;
  }
  silicon_pattern_ = SparsePattern::from_edges(silicon_vertices_.size(), edge_list);
  if (negative_edges_ > 0)
    log_message(LogLevel::warn, "event=mesh_quality negative_edge_weights=" + std::to_string(negative_edges_) +
                                    " note=maximum_principle_not_guaranteed");

  // Contacts: every mesh contact gets a spec, ohmic unless told otherwise.
  for (const auto& spec : contacts)
    if (mesh_.find_contact(spec.name) < 0) throw ConfigError("contacts." + spec.name, "no such contact in the mesh");
  for (const auto& name : mesh_.contact_names()) {
    ContactSpec spec{name};
    for (const auto& c : contacts)
      if (c.name == name) spec = c;
    const auto& verts = mesh_.contact_vertices(mesh_.find_contact(name));
    if (verts.empty()) throw ConfigError("contacts." + name, "contact has no boundary facets");
    if (spec.kind == ContactKind::ohmic &&
        std::none_of(verts.begin(), verts.end(), [&](Index v) { return mesh_.is_silicon_vertex(v); }))
      throw ConfigError("contacts." + name, "ohmic contact does not touch silicon");
    contacts_.push_back(spec);
  }
}

double Device::scaled_permittivity(Index k) const {
  const double eps = mesh_.region(k) == Region::silicon ? params_.eps_si : params_.eps_ox;
  const double l = scaling_.length;
  return eps * scaling_.potential / (params_.q * scaling_.concentration * l * l);
}

int Device::contact_index(const std::string& name) const {
  for (std::size_t i = 0; i < contacts_.size(); ++i)
    if (contacts_[i].name == name) return static_cast<int>(i);
  throw InvalidArgument("unknown contact '" + name + "'");
}

BoundaryData Device::boundary(std::span<const double> biases) const {
  if (biases.size() != contacts_.size())
    throw InvalidArgument("expected " + std::to_string(contacts_.size()) + " contact biases, got " +
                          std::to_string(biases.size()));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  BoundaryData bd;
  bd.phi.assign(mesh_.num_vertices(), nan);
  bd.n.assign(silicon_vertices_.size(), nan);
  bd.p.assign(silicon_vertices_.size(), nan);
  for (std::size_t c = 0; c < contacts_.size(); ++c) {
    if (!std::isfinite(biases[c])) throw InvalidArgument("non-finite bias on contact " + contacts_[c].name);
    for (Index v : mesh_.contact_vertices(static_cast<int>(c))) {
      if (contacts_[c].kind == ContactKind::gate) {
        bd.phi[v] = biases[c] + contacts_[c].workfunction;
        continue;
      }
      const auto cv = ohmic_contact_values(net_doping_[v], biases[c], params_);
      bd.phi[v] = cv.phi;
      const Index s = silicon_index_[v];
      if (s >= 0) {
        bd.n[s] = cv.n;
        bd.p[s] = cv.p;
      }
    }
  }
  return bd;
}

}  // namespace femdd
