#include "femdd/femdd.h"

#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "femdd/config.hpp"
#include "femdd/error.hpp"
#include "femdd/export.hpp"
#include "femdd/gummel.hpp"
#include "format.hpp"
#include "log.hpp"

struct femdd_config {
  femdd::RunConfig config;
  std::string method_name;
};

struct femdd_simulation {
  femdd::RunConfig config;
  std::unique_ptr<femdd::Device> device;
  femdd::DeviceState state;
  bool solved = false;
  std::optional<femdd::SweepResult> sweep;
  std::vector<std::string> names;
};

namespace {

thread_local std::string g_last_error;

femdd_status fail(femdd_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
femdd_status guarded(F&& f) {
  try {
    return f();
  } catch (const femdd::Error& e) {
    return fail(static_cast<femdd_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FEMDD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FEMDD_ERR_INTERNAL, e.what());
  }
}

std::string dump_path(const femdd_simulation& sim, const std::string& tag) {
  return (std::filesystem::path(sim.config.output_dir) / (sim.config.name + tag + ".vtk")).string();
}

void write_state_vtk(const femdd_simulation& sim, const femdd::DeviceState& st, const std::string& path) {
  const femdd::Method m = sim.config.solver.method;
  const auto cells = femdd::compute_element_fields(*sim.device, st, m);
  std::vector<double> g;
  if (sim.config.solver.impact_ionization) g = femdd::impact_ionization_nodal(*sim.device, st, m, sim.config.solver.ii_flat_tolerance);
  femdd::VtkInput in{sim.device.get(), &st, &cells, g};
  femdd::export_vtk(in, path);
}

}  // namespace

extern "C" {

const char* femdd_version(void) { return "0.1.0"; }

const char* femdd_status_name(femdd_status s) {
  switch (s) {
    case FEMDD_OK: return "ok";
    case FEMDD_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case FEMDD_ERR_PARSE: return "parse";
    case FEMDD_ERR_CONFIG: return "config";
    case FEMDD_ERR_IO: return "io";
    case FEMDD_ERR_SOLVER: return "solver";
    case FEMDD_ERR_STALL: return "stall";
    case FEMDD_ERR_RANGE: return "range";
    case FEMDD_ERR_MESH: return "mesh";
    case FEMDD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* femdd_last_error(void) { return g_last_error.c_str(); }

void femdd_set_log_callback(femdd_log_fn fn, void* user) {
  if (!fn) {
    femdd::set_log_sink({});
    return;
  }
  femdd::set_log_sink([fn, user](femdd::LogLevel l, const std::string& body) {
    fn(static_cast<femdd_log_level>(static_cast<int>(l)), body.c_str(), user);
  });
}

void femdd_set_log_level(femdd_log_level level) { femdd::set_log_level(static_cast<femdd::LogLevel>(level)); }

femdd_status femdd_parse_log_level(const char* name, femdd_log_level* out) {
  if (!name || !out) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  static const char* names[] = {"debug", "info", "warn", "error", "off"};
  for (int i = 0; i < 5; ++i)
    if (std::strcmp(name, names[i]) == 0) {
      *out = static_cast<femdd_log_level>(i);
      return FEMDD_OK;
    }
  return fail(FEMDD_ERR_INVALID_ARGUMENT, std::string("unknown log level '") + name + "'");
}

femdd_status femdd_config_parse(const char* text, const char* base_dir, femdd_config** out) {
  if (!text || !out) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<femdd_config>();
    c->config = femdd::parse_config(text, base_dir ? base_dir : "");
    *out = c.release();
    return FEMDD_OK;
  });
}

femdd_status femdd_config_load(const char* path, femdd_config** out) {
  if (!path || !out) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<femdd_config>();
    c->config = femdd::load_config(path);
    *out = c.release();
    return FEMDD_OK;
  });
}

void femdd_config_free(femdd_config* config) { delete config; }

femdd_status femdd_config_set_method(femdd_config* config, const char* method) {
  if (!config || !method) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    config->config.solver.method = femdd::parse_method(method);
    return FEMDD_OK;
  });
}

const char* femdd_config_method(const femdd_config* config) {
  return config ? femdd::to_string(config->config.solver.method) : nullptr;
}

femdd_status femdd_config_set_output_dir(femdd_config* config, const char* dir) {
  if (!config || !dir || !*dir) return fail(FEMDD_ERR_INVALID_ARGUMENT, "output directory must be a non-empty path");
  config->config.output_dir = dir;
  return FEMDD_OK;
}

const char* femdd_config_output_dir(const femdd_config* config) {
  return config ? config->config.output_dir.c_str() : nullptr;
}

const char* femdd_config_name(const femdd_config* config) { return config ? config->config.name.c_str() : nullptr; }

int femdd_config_has_sweep(const femdd_config* config) { return config && config->config.sweep ? 1 : 0; }

femdd_status femdd_config_validate(const femdd_config* config) {
  if (!config) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    femdd::Device d = femdd::build_device(config->config);
    config->config.solver.validate();
    if (d.negative_edge_weights() > 0)
      femdd::log_message(femdd::LogLevel::warn,
                         "event=mesh negative_edge_weights=" + std::to_string(d.negative_edge_weights()));
    return FEMDD_OK;
  });
}

femdd_status femdd_simulation_create(const femdd_config* config, femdd_simulation** out) {
  if (!config || !out) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<femdd_simulation>();
    s->config = config->config;
    s->config.solver.validate();
    s->device = std::make_unique<femdd::Device>(femdd::build_device(s->config));
    for (std::size_t c = 0; c < s->device->num_contacts(); ++c) s->names.push_back(s->device->contact(static_cast<int>(c)).name);
    const std::vector<double> zero(s->device->num_contacts(), 0.0);
    s->state = femdd::initial_state(*s->device, zero);
    femdd::log_message(femdd::LogLevel::info,
                       "event=device vertices=" + std::to_string(s->device->mesh().num_vertices()) +
                           " elements=" + std::to_string(s->device->mesh().num_elements()) +
                           " silicon_vertices=" + std::to_string(s->device->silicon_vertices().size()));
    *out = s.release();
    return FEMDD_OK;
  });
}

void femdd_simulation_free(femdd_simulation* sim) { delete sim; }

size_t femdd_simulation_num_vertices(const femdd_simulation* sim) {
  return sim ? sim->device->mesh().num_vertices() : 0;
}
size_t femdd_simulation_num_elements(const femdd_simulation* sim) {
  return sim ? sim->device->mesh().num_elements() : 0;
}
size_t femdd_simulation_num_contacts(const femdd_simulation* sim) { return sim ? sim->names.size() : 0; }

const char* femdd_simulation_contact_name(const femdd_simulation* sim, size_t index) {
  if (!sim || index >= sim->names.size()) return nullptr;
  return sim->names[index].c_str();
}

femdd_status femdd_simulation_solve(femdd_simulation* sim) {
  if (!sim) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const femdd::Device& d = *sim->device;
    const std::vector<double> zero(d.num_contacts(), 0.0);
    auto eq = femdd::solve_bias_point(d, femdd::initial_state(d, zero), zero, sim->config.solver);
    const std::vector<double> target = femdd::fixed_biases(sim->config, d);
    auto r = femdd::ramp_to(d, std::move(eq.state), target, sim->config.solver, sim->config.ramp_step);
    sim->state = std::move(r.state);
    sim->solved = true;
    return FEMDD_OK;
  });
}

femdd_status femdd_simulation_sweep(femdd_simulation* sim, int write_fields, femdd_point_fn on_point, void* user) {
  if (!sim) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  if (!sim->config.sweep) return fail(FEMDD_ERR_CONFIG, "bias.sweep: configuration has no sweep");
  return guarded([&] {
    const femdd::Device& d = *sim->device;
    const auto& sw = *sim->config.sweep;
    const std::vector<double> zero(d.num_contacts(), 0.0);
    std::vector<double> start = femdd::fixed_biases(sim->config, d);
    const int contact = d.contact_index(sw.contact);
    start[contact] = sw.start;

    femdd::BiasPointResult first;
    try {
      auto eq = femdd::solve_bias_point(d, femdd::initial_state(d, zero), zero, sim->config.solver);
      first = femdd::ramp_to(d, std::move(eq.state), start, sim->config.solver, sim->config.ramp_step);
    } catch (const femdd::SolverError& e) {
      throw femdd::SolverError(std::string("could not reach the sweep start: ") + e.what());
    }

    femdd::SweepSpec spec{contact, sw.start, sw.stop, sw.step, sw.min_step};
    auto cb = [&](const femdd::SweepPoint& pt, const femdd::DeviceState& st) {
      if (write_fields && sim->config.dump.kind != femdd::DumpSchedule::Kind::final_only &&
          sim->config.dump.wants(pt.bias, false))
        write_state_vtk(*sim, st, dump_path(*sim, "_" + sw.contact + "_" + femdd::format_short(pt.bias)));
      if (on_point) on_point(pt.bias, pt.currents.data(), pt.currents.size(), pt.iterations, pt.step, user);
    };
    sim->sweep = femdd::bias_sweep(d, std::move(first.state), spec, sim->config.solver, cb);
    sim->state = sim->sweep->final_state;
    sim->solved = true;
    if (write_fields && sim->config.dump.kind == femdd::DumpSchedule::Kind::final_only)
      write_state_vtk(*sim, sim->state,
                      dump_path(*sim, "_" + sw.contact + "_" + femdd::format_short(sim->sweep->points.back().bias)));
    if (sim->sweep->status == femdd::SweepStatus::stalled)
      return fail(FEMDD_ERR_STALL, "sweep stalled at " + sw.contact + "=" +
                                       femdd::format_short(sim->sweep->points.back().bias) + " V");
    return FEMDD_OK;
  });
}

size_t femdd_simulation_sweep_size(const femdd_simulation* sim) {
  return sim && sim->sweep ? sim->sweep->points.size() : 0;
}

int femdd_simulation_step_reductions(const femdd_simulation* sim) {
  return sim && sim->sweep ? sim->sweep->step_reductions : 0;
}

femdd_status femdd_simulation_currents(const femdd_simulation* sim, double* out, size_t count) {
  if (!sim || !out) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  if (count != sim->names.size()) return fail(FEMDD_ERR_INVALID_ARGUMENT, "buffer size must equal the contact count");
  return guarded([&] {
    const auto c = femdd::terminal_currents(*sim->device, sim->state, sim->config.solver);
    std::copy(c.begin(), c.end(), out);
    return FEMDD_OK;
  });
}

femdd_status femdd_simulation_field(const femdd_simulation* sim, const char* name, double* out, size_t count) {
  if (!sim || !name || !out) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  const std::size_t nv = sim->device->mesh().num_vertices();
  if (count != nv) return fail(FEMDD_ERR_INVALID_ARGUMENT, "buffer size must equal the vertex count");
  return guarded([&] {
    const std::string n = name;
    const femdd::DeviceState& s = sim->state;
    std::vector<double> tmp;
    const std::vector<double>* f = nullptr;
    if (n == "phi") f = &s.phi;
    else if (n == "n") f = &s.n;
    else if (n == "p") f = &s.p;
    else if (n == "phi_n") f = &s.phi_n;
    else if (n == "phi_p") f = &s.phi_p;
    else if (n == "net_doping") f = &sim->device->net_doping();
    else if (n == "ii_rate") {
      tmp = femdd::impact_ionization_nodal(*sim->device, s, sim->config.solver.method,
                                          sim->config.solver.ii_flat_tolerance);
      f = &tmp;
    } else {
      return fail(FEMDD_ERR_INVALID_ARGUMENT, "unknown field '" + n + "'");
    }
    std::copy(f->begin(), f->end(), out);
    return FEMDD_OK;
  });
}

femdd_status femdd_simulation_write_vtk(const femdd_simulation* sim, const char* path) {
  if (!sim || !path) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    write_state_vtk(*sim, sim->state, path);
    return FEMDD_OK;
  });
}

femdd_status femdd_simulation_write_iv_csv(const femdd_simulation* sim, const char* path) {
  if (!sim || !path) return fail(FEMDD_ERR_INVALID_ARGUMENT, "null argument");
  if (!sim->sweep || sim->sweep->points.empty()) return fail(FEMDD_ERR_INVALID_ARGUMENT, "no sweep results to write");
  return guarded([&] {
    femdd::export_iv_csv(*sim->sweep, path);
    return FEMDD_OK;
  });
}

}  // extern "C"
