#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "femdd/femdd.h"

namespace {

const char* kBar = R"(
name: bar
mesh:
  box:
    extent: [0.4, 0.05, 0.05]
    cells: [20, 1, 1]
    contacts:
      - {name: anode, face: x-}
      - {name: cathode, face: x+}
doping:
  - {type: constant, species: acceptor, level: 1.0e17, x: [0.0, 0.2]}
  - {type: constant, species: donor, level: 1.0e17, x: [0.2, 0.4]}
bias:
  fixed: {cathode: 0.0}
  sweep: {contact: anode, start: 0.0, stop: 0.3, step: 0.1}
solver: {tol: 1.0e-9}
)";

struct Points {
  std::vector<double> bias;
  std::vector<double> anode;
};

void on_point(double bias, const double* currents, size_t n, int, double, void* user) {
  auto* p = static_cast<Points*>(user);
  p->bias.push_back(bias);
  if (n > 0) p->anode.push_back(currents[0]);
}

}  // namespace

TEST_CASE("C API: status names and log levels") {
  CHECK(std::string(femdd_status_name(FEMDD_OK)) == "ok");
  CHECK(std::string(femdd_status_name(FEMDD_ERR_STALL)) == "stall");
  femdd_log_level l;
  CHECK(femdd_parse_log_level("warn", &l) == FEMDD_OK);
  CHECK(l == FEMDD_LOG_WARN);
  CHECK(femdd_parse_log_level("loud", &l) == FEMDD_ERR_INVALID_ARGUMENT);
  CHECK(std::string(femdd_last_error()).size() > 0);
  CHECK(std::string(femdd_version()).size() > 0);
}

TEST_CASE("C API: configuration errors surface as status codes") {
  femdd_config* c = nullptr;
  CHECK(femdd_config_parse("", nullptr, &c) == FEMDD_ERR_PARSE);
  CHECK(c == nullptr);
  CHECK(femdd_config_parse("name: [", nullptr, &c) == FEMDD_ERR_PARSE);
  CHECK(femdd_config_load("/nonexistent/femdd.yaml", &c) == FEMDD_ERR_IO);
  CHECK(femdd_config_parse(nullptr, nullptr, &c) == FEMDD_ERR_INVALID_ARGUMENT);

  std::string bad = kBar;
  bad.replace(bad.find("contact: anode"), 14, "contact: grid");
  REQUIRE(femdd_config_parse(bad.c_str(), nullptr, &c) == FEMDD_OK);
  CHECK(femdd_config_validate(c) == FEMDD_ERR_CONFIG);
  CHECK(std::string(femdd_last_error()).find("bias.sweep.contact") != std::string::npos);
  femdd_config_free(c);
}

TEST_CASE("C API: configuration accessors") {
  femdd_config* c = nullptr;
  REQUIRE(femdd_config_parse(kBar, nullptr, &c) == FEMDD_OK);
  CHECK(std::string(femdd_config_name(c)) == "bar");
  CHECK(std::string(femdd_config_method(c)) == "method_a");
  CHECK(femdd_config_set_method(c, "method_b") == FEMDD_OK);
  CHECK(std::string(femdd_config_method(c)) == "method_b");
  CHECK(femdd_config_set_method(c, "sg") == FEMDD_ERR_INVALID_ARGUMENT);
  CHECK(femdd_config_set_output_dir(c, "elsewhere") == FEMDD_OK);
  CHECK(std::string(femdd_config_output_dir(c)) == "elsewhere");
  CHECK(femdd_config_has_sweep(c) == 1);
  CHECK(femdd_config_validate(c) == FEMDD_OK);
  femdd_config_free(c);
}

TEST_CASE("C API: sweep and queries") {
  femdd_config* c = nullptr;
  REQUIRE(femdd_config_parse(kBar, nullptr, &c) == FEMDD_OK);
  femdd_simulation* s = nullptr;
  REQUIRE(femdd_simulation_create(c, &s) == FEMDD_OK);
  femdd_config_free(c);  // the simulation keeps its own copy

  CHECK(femdd_simulation_num_vertices(s) == 21 * 4);
  CHECK(femdd_simulation_num_elements(s) == 20 * 6);
  REQUIRE(femdd_simulation_num_contacts(s) == 2);
  CHECK(std::string(femdd_simulation_contact_name(s, 0)) == "anode");
  CHECK(femdd_simulation_contact_name(s, 2) == nullptr);

  Points pts;
  REQUIRE(femdd_simulation_sweep(s, 0, on_point, &pts) == FEMDD_OK);
  CHECK(femdd_simulation_sweep_size(s) == 4);
  REQUIRE(pts.bias.size() == 4);
  CHECK(pts.bias.back() == doctest::Approx(0.3));
  // Outflow positive: forward current enters the anode.
  CHECK(pts.anode[3] < pts.anode[2]);
  CHECK(pts.anode[2] < 0.0);

  double cur[2];
  REQUIRE(femdd_simulation_currents(s, cur, 2) == FEMDD_OK);
  CHECK(cur[0] == pts.anode.back());
  CHECK(std::abs(cur[0] + cur[1]) < 1e-5 * std::abs(cur[0]));  // fA current, near the round-off floor
  CHECK(femdd_simulation_currents(s, cur, 1) == FEMDD_ERR_INVALID_ARGUMENT);

  std::vector<double> f(femdd_simulation_num_vertices(s));
  CHECK(femdd_simulation_field(s, "n", f.data(), f.size()) == FEMDD_OK);
  for (double v : f) CHECK(v > 0.0);
  CHECK(femdd_simulation_field(s, "psi", f.data(), f.size()) == FEMDD_ERR_INVALID_ARGUMENT);
  CHECK(femdd_simulation_field(s, "phi", f.data(), 3) == FEMDD_ERR_INVALID_ARGUMENT);
  CHECK(femdd_simulation_write_vtk(s, "/dev/null/y.vtk") != FEMDD_OK);
  femdd_simulation_free(s);
}
