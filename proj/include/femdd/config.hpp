#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "femdd/device.hpp"
#include "femdd/gummel.hpp"
#include "femdd/jrecon.hpp"
#include "femdd/mesh.hpp"
#include "femdd/physics.hpp"

namespace femdd {

struct SweepConfig {
  std::string contact;
  double start = 0.0;
  double stop = 0.0;
  double step = 0.1;
  double min_step = 1e-3;
};

/// When field files are written during a sweep.
struct DumpSchedule {
  enum class Kind { final_only, every, list };
  Kind kind = Kind::final_only;
  std::vector<double> biases;  // Kind::list
  bool wants(double bias, bool last) const;
};

/// Everything one run needs. See docs/config.md for the file grammar.
struct RunConfig {
  std::string name = "run";
  std::optional<BoxMeshSpec> box;
  std::string mesh_file;  // used when `box` is empty, relative paths resolved against the config file
  MaterialParams material;
  std::vector<DopingPrimitive> doping;
  std::vector<ContactSpec> contacts;  // electrical kind per named contact
  std::map<std::string, double> fixed_bias;
  std::optional<SweepConfig> sweep;
  double ramp_step = 0.1;  // V, largest bias change per solve when simulate ramps up
  SolverOptions solver;
  std::string output_dir = "output";
  DumpSchedule dump;
};

/// Parses configuration text. Unknown keys and malformed values raise
/// ParseError with the line and column; semantic problems raise ConfigError
/// naming the field path. `base_dir` anchors a relative mesh file path.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

/// Mesh, doping and contacts of the run. Throws ConfigError when a named
/// contact does not exist in the mesh.
Device build_device(const RunConfig& config);

/// One bias per device contact from `fixed_bias` (unlisted contacts at 0 V).
std::vector<double> fixed_biases(const RunConfig& config, const Device& device);

}  // namespace femdd
