#include <cmath>

#include "femdd/device.hpp"
#include "femdd/discretization.hpp"
#include "femdd/error.hpp"

namespace femdd {

SparseSystem assemble_stiffness(const Mesh& mesh, std::span<const double> coeff, double length_scale) {
  if (coeff.size() != mesh.num_elements()) throw InvalidArgument("one coefficient per element expected");
  SparseSystem sys(SparsePattern::from_edges(mesh.num_vertices(), mesh.edges()));
  sys.symmetric = true;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto& g = mesh.geometry(static_cast<Index>(k));
    const auto& e = mesh.elements()[k];
    // |K| s^3 * (grad/s).(grad/s)
    const double f = coeff[k] * g.volume * length_scale;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double v = f * (g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1] + g.grad[a][2] * g.grad[b][2]);
        sys.add(e[a], e[b], v);
      }
  }
  return sys;
}

SparseSystem assemble_poisson(const Device& device, const PoissonFields& f, std::span<const double> dirichlet_phi) {
  const Mesh& mesh = device.mesh();
  const std::size_t nv = mesh.num_vertices();
  if (f.phi.size() != nv || f.n.size() != nv || f.p.size() != nv || dirichlet_phi.size() != nv)
    throw InvalidArgument("Poisson fields do not match the mesh");

  const Scaling& sc = device.scaling();
  SparseSystem sys(device.full_pattern());
  sys.symmetric = true;

  // Stiffness from edge weights: row sums vanish exactly.
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto& e = mesh.elements()[k];
    const double eps = device.scaled_permittivity(static_cast<Index>(k));
    const auto& w = device.edge_weights(static_cast<Index>(k));
    for (int l = 0; l < 6; ++l) {
      const Index a = e[kLocalEdges[l][0]], b = e[kLocalEdges[l][1]];
      const double c = eps * w[l];
      sys.add(a, a, c);
      sys.add(b, b, c);
      sys.add(a, b, -c);
      sys.add(b, a, -c);
    }
  }

  std::vector<double> phis(nv);
  for (std::size_t v = 0; v < nv; ++v) phis[v] = f.phi[v] / sc.potential;
  std::vector<double> kphi = sys.multiply(phis);

  // rhs = -(K phi - M (p - n + N)); Jacobian adds M (n + p).
  const auto& mass = device.lumped_mass();
  const auto& net = device.net_doping();
  for (std::size_t v = 0; v < nv; ++v) sys.rhs[v] = -kphi[v];
  for (std::size_t s = 0; s < device.silicon_vertices().size(); ++s) {
    const Index v = device.silicon_vertices()[s];
    const double n = f.n[v] / sc.concentration, p = f.p[v] / sc.concentration, N = net[v] / sc.concentration;
    sys.rhs[v] += mass[s] * (p - n + N);
    sys.add(v, v, mass[s] * (n + p));
  }

  for (std::size_t v = 0; v < nv; ++v)
    if (!std::isnan(dirichlet_phi[v])) sys.set_dirichlet(static_cast<Index>(v), (dirichlet_phi[v] - f.phi[v]) / sc.potential);
  return sys;
}

SparseSystem assemble_continuity_eafe(const Device& device, Carrier carrier, std::span<const double> phi,
                                      const ContinuityTerms& terms, std::span<const double> dirichlet_density) {
  const Mesh& mesh = device.mesh();
  const std::size_t ns = device.silicon_vertices().size();
  if (phi.size() != mesh.num_vertices()) throw InvalidArgument("potential does not match the mesh");
  if (terms.reaction.size() != ns || terms.source.size() != ns || dirichlet_density.size() != ns)
    throw InvalidArgument("continuity terms do not match the silicon vertices");

  const Scaling& sc = device.scaling();
  const double sign = carrier == Carrier::electron ? 1.0 : -1.0;
  const double diff = device.params().diffusivity(carrier) / sc.diffusivity;

  SparseSystem sys(device.silicon_pattern());
  for (Index k : mesh.silicon_elements()) {
    const auto& e = mesh.elements()[k];
    const auto& w = device.edge_weights(k);
    for (int l = 0; l < 6; ++l) {
      const Index va = e[kLocalEdges[l][0]], vb = e[kLocalEdges[l][1]];
      const Index a = device.silicon_index(va), b = device.silicon_index(vb);
      const double c = diff * w[l];
      const double delta = sign * (phi[vb] - phi[va]) / sc.potential;
      const double bp = bernoulli(delta), bm = bernoulli(-delta);
      // Flux a->b of D (grad c - c grad psi) is D [B(d) c_b - B(-d) c_a] / |e|.
      sys.add(a, a, c * bm);
      sys.add(a, b, -c * bp);
      sys.add(b, b, c * bp);
      sys.add(b, a, -c * bm);
    }
  }

  const auto& mass = device.lumped_mass();
  for (std::size_t s = 0; s < ns; ++s) {
    sys.add(static_cast<Index>(s), static_cast<Index>(s), mass[s] * terms.reaction[s]);
    sys.rhs[s] = mass[s] * terms.source[s];
    if (!std::isnan(dirichlet_density[s]))
      sys.set_dirichlet(static_cast<Index>(s), dirichlet_density[s] / sc.concentration);
  }
  return sys;
}

}  // namespace femdd
