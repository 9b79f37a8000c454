#include "femdd/export.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "femdd/error.hpp"
#include "format.hpp"

namespace femdd {

namespace {

void check_input(const VtkInput& in) {
  if (!in.device || !in.state || !in.cells) throw InvalidArgument("VTK export needs a device, a state and cell fields");
  const Mesh& mesh = in.device->mesh();
  const std::size_t nv = mesh.num_vertices(), ns = mesh.silicon_elements().size();
  const DeviceState& s = *in.state;
  for (const auto* f : {&s.phi, &s.n, &s.p, &s.phi_n, &s.phi_p})
    if (f->size() != nv) throw InvalidArgument("nodal field length does not match the mesh");
  if (!in.ii_rate.empty() && in.ii_rate.size() != nv) throw InvalidArgument("generation field length does not match the mesh");
  for (const auto* f : {&in.cells->jn, &in.cells->jp, &in.cells->e})
    if (f->values.size() != ns) throw InvalidArgument("cell field length does not match the silicon elements");
}

void write(std::ostream& os, const VtkInput& in) {
  const Mesh& mesh = in.device->mesh();
  const std::size_t nv = mesh.num_vertices(), ne = mesh.num_elements();
  os << "# vtk DataFile Version 3.0\nfemdd\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << nv << " double\n";
  for (const auto& x : mesh.vertices())
    os << format_double(x[0]) << ' ' << format_double(x[1]) << ' ' << format_double(x[2]) << '\n';
  os << "CELLS " << ne << ' ' << ne * 5 << '\n';
  for (const auto& e : mesh.elements()) os << "4 " << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << '\n';
  os << "CELL_TYPES " << ne << '\n';
  for (std::size_t k = 0; k < ne; ++k) os << "10\n";

  os << "CELL_DATA " << ne << '\n';
  std::vector<Index> slot(ne, -1);
  const auto& se = mesh.silicon_elements();
  for (std::size_t i = 0; i < se.size(); ++i) slot[se[i]] = static_cast<Index>(i);
  auto vectors = [&](const char* name, const ElementVectorField& f) {
    os << "VECTORS " << name << " double\n";
    for (std::size_t k = 0; k < ne; ++k) {
      if (slot[k] < 0) {
        os << "0 0 0\n";
        continue;
      }
      const Vec3& v = f.values[slot[k]];
      os << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
    }
  };
  vectors("Jn", in.cells->jn);
  vectors("Jp", in.cells->jp);
  vectors("E", in.cells->e);
  os << "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (Region r : mesh.regions()) os << (r == Region::silicon ? 0 : 1) << '\n';

  os << "POINT_DATA " << nv << '\n';
  auto scalars = [&](const char* name, std::span<const double> f) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < nv; ++v) os << (f.empty() ? "0" : format_double(f[v])) << '\n';
  };
  const DeviceState& s = *in.state;
  scalars("phi", s.phi);
  scalars("n", s.n);
  scalars("p", s.p);
  scalars("phi_n", s.phi_n);
  scalars("phi_p", s.phi_p);
  scalars("net_doping", in.device->net_doping());
  scalars("ii_rate", in.ii_rate);
}

void write_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::string vtk_string(const VtkInput& input) {
  check_input(input);
  std::ostringstream os;
  write(os, input);
  return os.str();
}

void export_vtk(const VtkInput& input, const std::string& path) { write_file(path, vtk_string(input)); }

std::string iv_csv_string(const SweepResult& sweep) {
  if (sweep.points.empty()) throw InvalidArgument("cannot export an empty sweep");
  std::ostringstream os;
  os << "bias";
  for (const auto& c : sweep.contacts) os << ",I_" << c;
  os << ",iterations,step\n";
  for (const auto& p : sweep.points) {
    if (!p.converged) continue;
    os << format_double(p.bias);
    for (double i : p.currents) os << ',' << format_double(i);
    os << ',' << p.iterations << ',' << format_double(p.step) << '\n';
  }
  return os.str();
}

void export_iv_csv(const SweepResult& sweep, const std::string& path) { write_file(path, iv_csv_string(sweep)); }

ElementFields compute_element_fields(const Device& device, const DeviceState& state, Method method) {
  return {reconstruct_current(device, state, Carrier::electron, method),
          reconstruct_current(device, state, Carrier::hole, method), reconstruct_field(device, state)};
}

}  // namespace femdd
