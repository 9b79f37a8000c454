#include "femdd/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "femdd/error.hpp"

namespace femdd {

bool DumpSchedule::wants(double bias, bool last) const {
  switch (kind) {
    case Kind::every: return true;
    case Kind::final_only: return last;
    case Kind::list:
      for (double b : biases)
        if (std::abs(b - bias) <= 1e-9) return true;
      return false;
  }
  return false;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail_at(const YAML::Node& n, const std::string& what) {
  const YAML::Mark m = n.Mark();
  throw ParseError(what, m.line + 1, m.column + 1);
}

// Mapping reader that remembers which keys were consumed so leftovers can
// be reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail_at(node_, "'" + path_ + "' must be a mapping");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return static_cast<bool>(node_[key]);
  }
  YAML::Node get(const std::string& key) {
    used_.insert(key);
    return node_[key];
  }
  YAML::Node require(const std::string& key) {
    used_.insert(key);
    YAML::Node n = node_[key];
    if (!n) fail_at(node_, "missing key '" + child(key) + "'");
    return n;
  }
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& path() const { return path_; }
  const YAML::Node& node() const { return node_; }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (!used_.count(k)) fail_at(kv.first, "unknown key '" + child(k) + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

double as_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail_at(n, "'" + path + "' must be a number");
  const std::string s = n.Scalar();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    if (!std::isfinite(v)) throw std::invalid_argument("not finite");
    return v;
  } catch (const std::exception&) {
    fail_at(n, "'" + path + "' must be a finite number, got '" + s + "'");
  }
}

int as_int(const YAML::Node& n, const std::string& path) {
  const double v = as_double(n, path);
  if (v != std::floor(v) || std::abs(v) > 1e9) fail_at(n, "'" + path + "' must be an integer");
  return static_cast<int>(v);
}

bool as_bool(const YAML::Node& n, const std::string& path) {
  if (n.IsScalar()) {
    const std::string s = n.Scalar();
    if (s == "true" || s == "on" || s == "yes") return true;
    if (s == "false" || s == "off" || s == "no") return false;
  }
  fail_at(n, "'" + path + "' must be true or false");
}

std::string as_string(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail_at(n, "'" + path + "' must be a string");
  return n.Scalar();
}

std::vector<double> as_list(const YAML::Node& n, const std::string& path, std::size_t size = 0) {
  if (!n.IsSequence()) fail_at(n, "'" + path + "' must be a list");
  if (size && n.size() != size) fail_at(n, "'" + path + "' must have " + std::to_string(size) + " entries");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_double(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::array<double, 2> as_range(const YAML::Node& n, const std::string& path) {
  const auto v = as_list(n, path, 2);
  if (!(v[0] <= v[1])) fail_at(n, "'" + path + "' must be [low, high]");
  return {v[0], v[1]};
}

int as_axis(const YAML::Node& n, const std::string& path) {
  const std::string s = as_string(n, path);
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  fail_at(n, "'" + path + "' must be x, y or z");
}

Species as_species(const YAML::Node& n, const std::string& path) {
  const std::string s = as_string(n, path);
  if (s == "donor") return Species::donor;
  if (s == "acceptor") return Species::acceptor;
  fail_at(n, "'" + path + "' must be donor or acceptor");
}

// Optional x/y/z ranges; missing axes are unbounded.
AxisBox read_box(Section& s) {
  AxisBox b{{-kInf, kInf}, {-kInf, kInf}, {-kInf, kInf}};
  const char* names[3] = {"x", "y", "z"};
  std::array<double, 2>* dst[3] = {&b.x, &b.y, &b.z};
  for (int d = 0; d < 3; ++d)
    if (s.has(names[d])) *dst[d] = as_range(s.get(names[d]), s.child(names[d]));
  return b;
}

void read_mesh_section(Section s, RunConfig& c, const std::string& base_dir) {
  const bool has_box = s.has("box"), has_file = s.has("file");
  if (has_box == has_file) fail_at(s.node(), "'mesh' needs exactly one of 'box' or 'file'");
  if (has_file) {
    std::filesystem::path p = as_string(s.get("file"), "mesh.file");
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    c.mesh_file = p.string();
    s.finish();
    return;
  }
  Section b(s.get("box"), "mesh.box");
  BoxMeshSpec spec;
  const auto ext = as_list(b.require("extent"), "mesh.box.extent", 3);
  const auto cells = b.require("cells");
  const auto cl = as_list(cells, "mesh.box.cells", 3);
  for (int d = 0; d < 3; ++d) {
    spec.extent[d] = ext[d];
    if (cl[d] != std::floor(cl[d])) fail_at(cells, "'mesh.box.cells' must be integers");
    spec.cells[d] = static_cast<int>(cl[d]);
    if (!(ext[d] > 0.0)) throw ConfigError("mesh.box.extent", "extents must be positive");
    if (spec.cells[d] < 1) throw ConfigError("mesh.box.cells", "subdivisions must be at least 1");
  }
  if (b.has("regions")) {
    const YAML::Node rs = b.get("regions");
    if (!rs.IsSequence()) fail_at(rs, "'mesh.box.regions' must be a list");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      Section r(rs[i], "mesh.box.regions[" + std::to_string(i) + "]");
      RegionSlab slab;
      const std::string reg = as_string(r.require("region"), r.child("region"));
      if (reg == "oxide") slab.region = Region::oxide;
      else if (reg == "silicon") slab.region = Region::silicon;
      else fail_at(r.get("region"), "'" + r.child("region") + "' must be silicon or oxide");
      slab.box = read_box(r);
      r.finish();
      spec.slabs.push_back(slab);
    }
  }
  if (b.has("contacts")) {
    const YAML::Node cs = b.get("contacts");
    if (!cs.IsSequence()) fail_at(cs, "'mesh.box.contacts' must be a list");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      Section r(cs[i], "mesh.box.contacts[" + std::to_string(i) + "]");
      ContactRect rect;
      rect.name = as_string(r.require("name"), r.child("name"));
      const YAML::Node f = r.require("face");
      try {
        rect.face = parse_face(as_string(f, r.child("face")));
      } catch (const InvalidArgument& e) {
        fail_at(f, e.what());
      }
      // Default: the whole face.
      int k = 0;
      for (int d = 0; d < 3; ++d)
        if (d != rect.face.axis) rect.range[k++] = {0.0, spec.extent[d]};
      if (r.has("range")) {
        const YAML::Node rn = r.get("range");
        if (!rn.IsSequence() || rn.size() != 2) fail_at(rn, "'" + r.child("range") + "' must be two [low, high] pairs");
        for (int j = 0; j < 2; ++j) rect.range[j] = as_range(rn[j], r.child("range"));
      }
      r.finish();
      spec.contacts.push_back(rect);
    }
  }
  b.finish();
  s.finish();
  c.box = spec;
}

void read_material(Section s, MaterialParams& m) {
  auto opt = [&](const char* key, double& dst) {
    if (s.has(key)) dst = as_double(s.get(key), s.child(key));
  };
  opt("thermal_voltage", m.thermal_voltage);
  opt("n_i", m.n_i);
  double er = m.eps_si / constants::eps0, eo = m.eps_ox / constants::eps0;
  opt("eps_si", er);
  opt("eps_ox", eo);
  m.eps_si = er * constants::eps0;
  m.eps_ox = eo * constants::eps0;
  opt("mu_n", m.mu_n);
  opt("mu_p", m.mu_p);
  opt("tau_n", m.tau_n);
  opt("tau_p", m.tau_p);
  if (s.has("impact_ionization")) {
    Section ii(s.get("impact_ionization"), "material.impact_ionization");
    auto o2 = [&](const char* key, double& dst) {
      if (ii.has(key)) dst = as_double(ii.get(key), ii.child(key));
    };
    o2("a_n", m.ii.a_n);
    o2("b_n", m.ii.b_n);
    o2("a_p", m.ii.a_p);
    o2("b_p", m.ii.b_p);
    o2("field_threshold", m.ii.field_threshold);
    ii.finish();
  }
  s.finish();
  m.validate();
}

void read_doping(const YAML::Node& list, std::vector<DopingPrimitive>& out) {
  if (!list.IsSequence()) fail_at(list, "'doping' must be a list");
  for (std::size_t i = 0; i < list.size(); ++i) {
    Section s(list[i], "doping[" + std::to_string(i) + "]");
    const std::string type = as_string(s.require("type"), s.child("type"));
    if (type == "constant") {
      ConstantSlab slab;
      slab.species = as_species(s.require("species"), s.child("species"));
      slab.level = as_double(s.require("level"), s.child("level"));
      if (!(slab.level > 0.0)) throw ConfigError(s.child("level"), "must be positive");
      slab.box = read_box(s);
      out.emplace_back(slab);
    } else if (type == "gaussian") {
      GaussianImplant g;
      g.species = as_species(s.require("species"), s.child("species"));
      g.peak = as_double(s.require("peak"), s.child("peak"));
      g.position = as_double(s.require("position"), s.child("position"));
      g.depth = as_double(s.require("depth"), s.child("depth"));
      if (s.has("axis")) g.axis = as_axis(s.get("axis"), s.child("axis"));
      if (s.has("lateral_depth")) g.lateral_depth = as_double(s.get("lateral_depth"), s.child("lateral_depth"));
      if (!(g.peak > 0.0)) throw ConfigError(s.child("peak"), "must be positive");
      if (!(g.depth > 0.0)) throw ConfigError(s.child("depth"), "must be positive");
      if (g.lateral_depth < 0.0) throw ConfigError(s.child("lateral_depth"), "must be >= 0");
      g.lateral = read_box(s);
      out.emplace_back(g);
    } else {
      fail_at(s.get("type"), "'" + s.child("type") + "' must be constant or gaussian");
    }
    s.finish();
  }
}

void read_contacts(Section s, std::vector<ContactSpec>& out) {
  for (const auto& kv : s.node()) {
    ContactSpec spec;
    spec.name = kv.first.as<std::string>();
    Section c(kv.second, s.child(spec.name));
    s.get(spec.name);
    if (c.has("kind")) {
      const std::string k = as_string(c.get("kind"), c.child("kind"));
      if (k == "ohmic") spec.kind = ContactKind::ohmic;
      else if (k == "gate") spec.kind = ContactKind::gate;
      else fail_at(c.get("kind"), "'" + c.child("kind") + "' must be ohmic or gate");
    }
    if (c.has("workfunction")) {
      spec.workfunction = as_double(c.get("workfunction"), c.child("workfunction"));
      if (spec.kind != ContactKind::gate) throw ConfigError(c.child("workfunction"), "only gate contacts take a workfunction");
    }
    c.finish();
    out.push_back(spec);
  }
}

void read_bias(Section s, RunConfig& c) {
  if (s.has("fixed")) {
    Section f(s.get("fixed"), "bias.fixed");
    for (const auto& kv : f.node()) {
      const std::string name = kv.first.as<std::string>();
      f.get(name);
      c.fixed_bias[name] = as_double(kv.second, f.child(name));
    }
  }
  if (s.has("sweep")) {
    const YAML::Node n = s.get("sweep");
    if (n.IsSequence()) throw ConfigError("bias.sweep", "exactly one swept contact per run");
    Section w(n, "bias.sweep");
    SweepConfig sw;
    sw.contact = as_string(w.require("contact"), w.child("contact"));
    sw.start = as_double(w.require("start"), w.child("start"));
    sw.stop = as_double(w.require("stop"), w.child("stop"));
    if (w.has("step")) sw.step = as_double(w.get("step"), w.child("step"));
    sw.min_step = std::min(sw.step, sw.min_step);
    if (w.has("min_step")) sw.min_step = as_double(w.get("min_step"), w.child("min_step"));
    w.finish();
    if (sw.start == sw.stop) throw ConfigError("bias.sweep", "start and stop must differ");
    if (!(sw.step > 0.0)) throw ConfigError("bias.sweep.step", "must be positive");
    if (!(sw.min_step > 0.0) || sw.min_step > sw.step)
      throw ConfigError("bias.sweep.min_step", "must be positive and not larger than step");
    c.sweep = sw;
  }
  if (s.has("ramp_step")) {
    c.ramp_step = as_double(s.get("ramp_step"), "bias.ramp_step");
    if (!(c.ramp_step > 0.0)) throw ConfigError("bias.ramp_step", "must be positive");
  }
  s.finish();
}

LinearMethod as_linear(const YAML::Node& n, const std::string& path) {
  const std::string s = as_string(n, path);
  if (s == "automatic") return LinearMethod::automatic;
  if (s == "direct") return LinearMethod::direct;
  if (s == "krylov") return LinearMethod::krylov;
  fail_at(n, "'" + path + "' must be automatic, direct or krylov");
}

void read_solver(Section s, SolverOptions& o) {
  auto pos = [&](const char* key, double& dst) {
    if (!s.has(key)) return;
    dst = as_double(s.get(key), s.child(key));
    if (!(dst > 0.0)) throw ConfigError(s.child(key), "must be positive");
  };
  auto posi = [&](const char* key, int& dst) {
    if (!s.has(key)) return;
    dst = as_int(s.get(key), s.child(key));
    if (dst < 1) throw ConfigError(s.child(key), "must be at least 1");
  };
  pos("tol", o.tol);
  posi("max_iter", o.max_iter);
  pos("damping", o.damping);
  pos("poisson_inner_tol", o.poisson_inner_tol);
  posi("poisson_max_inner", o.poisson_max_inner);
  pos("density_floor", o.density_floor);
  pos("ii_flat_tolerance", o.ii_flat_tolerance);
  double lt = o.poisson_linear.tol;
  int li = o.poisson_linear.max_iter;
  pos("linear_tol", lt);
  posi("linear_max_iter", li);
  o.poisson_linear.tol = o.continuity_linear.tol = lt;
  o.poisson_linear.max_iter = o.continuity_linear.max_iter = li;
  if (s.has("linear")) o.poisson_linear.method = o.continuity_linear.method = as_linear(s.get("linear"), "solver.linear");
  s.finish();
}

void read_output(Section s, RunConfig& c) {
  if (s.has("directory")) c.output_dir = as_string(s.get("directory"), "output.directory");
  if (s.has("dump")) {
    const YAML::Node d = s.get("dump");
    if (d.IsSequence()) {
      c.dump.kind = DumpSchedule::Kind::list;
      c.dump.biases = as_list(d, "output.dump");
    } else {
      const std::string k = as_string(d, "output.dump");
      if (k == "final") c.dump.kind = DumpSchedule::Kind::final_only;
      else if (k == "every") c.dump.kind = DumpSchedule::Kind::every;
      else fail_at(d, "'output.dump' must be final, every or a list of biases");
    }
  }
  s.finish();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root || root.IsNull()) throw ParseError("empty configuration", 1, 1);
  Section top(root, "");

  RunConfig c;
  if (top.has("name")) c.name = as_string(top.get("name"), "name");
  read_mesh_section(Section(top.require("mesh"), "mesh"), c, base_dir);
  if (top.has("material")) read_material(Section(top.get("material"), "material"), c.material);
  if (top.has("doping")) read_doping(top.get("doping"), c.doping);
  if (top.has("contacts")) read_contacts(Section(top.get("contacts"), "contacts"), c.contacts);
  if (top.has("bias")) read_bias(Section(top.get("bias"), "bias"), c);
  if (top.has("models")) {
    Section m(top.get("models"), "models");
    if (m.has("srh")) c.solver.srh = as_bool(m.get("srh"), "models.srh");
    if (m.has("impact_ionization"))
      c.solver.impact_ionization = as_bool(m.get("impact_ionization"), "models.impact_ionization");
    m.finish();
  }
  if (top.has("method")) {
    const YAML::Node n = top.get("method");
    try {
      c.solver.method = parse_method(as_string(n, "method"));
    } catch (const InvalidArgument& e) {
      fail_at(n, e.what());
    }
  }
  if (top.has("solver")) read_solver(Section(top.get("solver"), "solver"), c.solver);
  if (top.has("output")) read_output(Section(top.get("output"), "output"), c);
  top.finish();

  if (c.sweep && c.fixed_bias.count(c.sweep->contact))
    throw ConfigError("bias.fixed." + c.sweep->contact, "contact is also swept");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

Device build_device(const RunConfig& config) {
  Mesh mesh = config.box ? build_box_mesh(*config.box) : read_mesh_file(config.mesh_file);
  std::vector<std::string> known = mesh.contact_names();
  auto check = [&](const std::string& name, const std::string& path) {
    for (const auto& k : known)
      if (k == name) return;
    throw ConfigError(path, "no contact named '" + name + "' in the mesh");
  };
  for (const auto& [name, v] : config.fixed_bias) check(name, "bias.fixed." + name);
  if (config.sweep) check(config.sweep->contact, "bias.sweep.contact");
  return Device(std::move(mesh), config.material, DopingProfile(config.doping), config.contacts);
}

std::vector<double> fixed_biases(const RunConfig& config, const Device& device) {
  std::vector<double> b(device.num_contacts(), 0.0);
  for (const auto& [name, v] : config.fixed_bias) b[device.contact_index(name)] = v;
  return b;
}

}  // namespace femdd
