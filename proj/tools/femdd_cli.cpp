// Command-line driver: simulate, sweep, check.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "femdd/femdd.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kSolver = 2, kStall = 3 };

const char* level_label(femdd_log_level l) {
  switch (l) {
    case FEMDD_LOG_DEBUG: return "DEBUG";
    case FEMDD_LOG_INFO: return "INFO";
    case FEMDD_LOG_WARN: return "WARN";
    case FEMDD_LOG_ERROR: return "ERROR";
    default: return "OFF";
  }
}

void log_to_stderr(femdd_log_level level, const char* body, void*) {
  std::fprintf(stderr, "%s %s\n", level_label(level), body);
}

// Quoted so the value survives spaces; the rest of the line stays key=value.
int report(femdd_status s) {
  std::string msg = femdd_last_error();
  for (char& c : msg)
    if (c == '"') c = '\'';
  std::fprintf(stderr, "ERROR status=%s message=\"%s\"\n", femdd_status_name(s), msg.c_str());
  switch (s) {
    case FEMDD_ERR_SOLVER:
    case FEMDD_ERR_RANGE:
    case FEMDD_ERR_INTERNAL: return kSolver;
    case FEMDD_ERR_STALL: return kStall;
    default: return kUsage;
  }
}

struct Options {
  std::string config;
  std::string method;
  std::string output_dir;
  std::string log_level = "warn";
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Run configuration file")->required();
  cmd->add_option("--method", o.method, "Current reconstruction: ddfe, method_a, method_b");
  cmd->add_option("--output-dir", o.output_dir, "Directory for VTK and CSV output");
  cmd->add_option("--log-level", o.log_level, "debug, info, warn, error or off");
}

struct ConfigHandle {
  femdd_config* c = nullptr;
  ~ConfigHandle() { femdd_config_free(c); }
};
struct SimHandle {
  femdd_simulation* s = nullptr;
  ~SimHandle() { femdd_simulation_free(s); }
};

int prepare(const Options& o, ConfigHandle& cfg) {
  femdd_log_level level;
  if (femdd_status s = femdd_parse_log_level(o.log_level.c_str(), &level)) return report(s);
  femdd_set_log_level(level);
  if (femdd_status s = femdd_config_load(o.config.c_str(), &cfg.c)) return report(s);
  if (!o.method.empty())
    if (femdd_status s = femdd_config_set_method(cfg.c, o.method.c_str())) return report(s);
  if (!o.output_dir.empty())
    if (femdd_status s = femdd_config_set_output_dir(cfg.c, o.output_dir.c_str())) return report(s);
  return kOk;
}

std::string out_path(const femdd_config* c, const std::string& suffix) {
  return (std::filesystem::path(femdd_config_output_dir(c)) / (std::string(femdd_config_name(c)) + suffix)).string();
}

int run_check(const Options& o) {
  ConfigHandle cfg;
  if (int rc = prepare(o, cfg)) return rc;
  if (femdd_status s = femdd_config_validate(cfg.c)) return report(s);
  std::printf("ok config=%s method=%s sweep=%s\n", o.config.c_str(), femdd_config_method(cfg.c),
              femdd_config_has_sweep(cfg.c) ? "yes" : "no");
  return kOk;
}

int run_simulate(const Options& o) {
  ConfigHandle cfg;
  if (int rc = prepare(o, cfg)) return rc;
  SimHandle sim;
  if (femdd_status s = femdd_simulation_create(cfg.c, &sim.s)) return report(s);
  if (femdd_status s = femdd_simulation_solve(sim.s)) return report(s);

  const size_t nc = femdd_simulation_num_contacts(sim.s);
  std::vector<double> cur(nc);
  if (femdd_status s = femdd_simulation_currents(sim.s, cur.data(), nc)) return report(s);
  if (femdd_status s = femdd_simulation_write_vtk(sim.s, out_path(cfg.c, ".vtk").c_str())) return report(s);

  const std::string csv = out_path(cfg.c, "_currents.csv");
  std::ofstream f(csv);
  if (!f) {
    std::fprintf(stderr, "ERROR status=io message=\"cannot write %s\"\n", csv.c_str());
    return kUsage;
  }
  f.precision(17);
  f << "contact,current\n";
  for (size_t c = 0; c < nc; ++c) {
    f << femdd_simulation_contact_name(sim.s, c) << ',' << cur[c] << '\n';
    std::printf("contact=%s current=%.17g\n", femdd_simulation_contact_name(sim.s, c), cur[c]);
  }
  return kOk;
}

void print_point(double bias, const double* currents, size_t n, int iterations, double step, void*) {
  std::printf("bias=%.6g iterations=%d step=%.6g", bias, iterations, step);
  for (size_t c = 0; c < n; ++c) std::printf(" I%zu=%.17g", c, currents[c]);
  std::printf("\n");
  std::fflush(stdout);
}

int run_sweep(const Options& o) {
  ConfigHandle cfg;
  if (int rc = prepare(o, cfg)) return rc;
  if (!femdd_config_has_sweep(cfg.c)) {
    std::fprintf(stderr, "ERROR status=config message=\"bias.sweep: configuration has no sweep\"\n");
    return kUsage;
  }
  SimHandle sim;
  if (femdd_status s = femdd_simulation_create(cfg.c, &sim.s)) return report(s);
  const femdd_status s = femdd_simulation_sweep(sim.s, 1, print_point, nullptr);
  if (s != FEMDD_OK && s != FEMDD_ERR_STALL) return report(s);
  const std::string saved = femdd_last_error();
  if (femdd_status w = femdd_simulation_write_iv_csv(sim.s, out_path(cfg.c, "_iv.csv").c_str())) return report(w);
  if (s == FEMDD_ERR_STALL) {
    std::fprintf(stderr, "ERROR status=stall message=\"%s\"\n", saved.c_str());
    return kStall;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  femdd_set_log_callback(log_to_stderr, nullptr);
  CLI::App app{"femdd: 3D drift-diffusion simulation with current reconstruction"};
  app.require_subcommand(1);
  Options o;
  auto* simulate = app.add_subcommand("simulate", "Solve at the configured fixed biases and write fields");
  auto* sweep = app.add_subcommand("sweep", "Run the configured bias sweep and write the I-V table");
  auto* check = app.add_subcommand("check", "Validate a configuration");
  for (auto* c : {simulate, sweep, check}) add_common(c, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::fprintf(stderr, "%s", app.help().c_str());
    return kUsage;
  }
  if (*simulate) return run_simulate(o);
  if (*sweep) return run_sweep(o);
  return run_check(o);
}
