#include <doctest.h>

#include <string>

#include "femdd/config.hpp"
#include "femdd/error.hpp"

using namespace femdd;

namespace {

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

const std::string kMinimal = R"(
name: tiny
mesh:
  box:
    extent: [0.2, 0.1, 0.1]
    cells: [4, 2, 2]
    contacts:
      - {name: a, face: x-}
      - {name: b, face: x+}
doping:
  - {type: constant, species: donor, level: 1.0e16}
bias:
  fixed: {a: 0.0}
  sweep: {contact: b, start: 0.0, stop: 0.2, step: 0.1}
)";

}  // namespace

TEST_CASE("shipped diode configuration") {
  const RunConfig c = load_config(FEMDD_SOURCE_DIR "/configs/diode.yaml");
  CHECK(c.name == "diode");
  REQUIRE(c.box.has_value());
  CHECK(c.box->extent == Vec3{0.3, 0.3, 0.3});
  REQUIRE(c.doping.size() == 2);
  const auto& body = std::get<ConstantSlab>(c.doping[0]);
  CHECK(body.species == Species::acceptor);
  CHECK(body.level == 1.0e18);
  const auto& implant = std::get<GaussianImplant>(c.doping[1]);
  CHECK(implant.peak == 1.0e19);
  CHECK(implant.depth == 0.15);
  REQUIRE(c.sweep.has_value());
  CHECK(c.sweep->contact == "body");
  CHECK(c.sweep->stop == 0.8);
  CHECK(c.solver.method == Method::method_a);
  const Device d = build_device(c);
  CHECK(d.num_contacts() == 2);
}

TEST_CASE("shipped n-MOS configuration") {
  const RunConfig c = load_config(FEMDD_SOURCE_DIR "/configs/nmos.yaml");
  CHECK(c.material.mu_n == 1417.0);
  CHECK(c.material.mu_p == 470.5);
  CHECK(c.solver.impact_ionization);
  const Device d = build_device(c);
  CHECK(d.contact_index("gate") >= 0);
}

TEST_CASE("shipped p-MOS stand-in parses") { CHECK_NOTHROW(build_device(load_config(FEMDD_SOURCE_DIR "/configs/pmos.yaml"))); }

TEST_CASE("defaults") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.solver.method == Method::method_a);
  CHECK(c.solver.srh);
  CHECK_FALSE(c.solver.impact_ionization);
  CHECK(c.dump.kind == DumpSchedule::Kind::final_only);
  CHECK(c.sweep->min_step == doctest::Approx(1e-3));
  const Device d = build_device(c);
  const auto b = fixed_biases(c, d);
  CHECK(b == std::vector<double>{0.0, 0.0});
}

TEST_CASE("unknown keys are reported with their position") {
  std::string text = kMinimal + "solver:\n  tolerance: 1e-6\n";
  try {
    parse_config(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 16);
    CHECK(e.column() == 3);
    CHECK(std::string(e.what()).find("tolerance") != std::string::npos);
  }
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_config(""), ParseError);
  CHECK_THROWS_AS(parse_config("name: [unclosed"), ParseError);
  CHECK_THROWS_AS(parse_config(kMinimal + "method: method_c\n"), Error);
  CHECK_THROWS_AS(parse_config(kMinimal + "models: {srh: maybe}\n"), ParseError);
}

TEST_CASE("semantic errors name the field") {
  auto expect_path = [](const std::string& text, const std::string& path) {
    try {
      build_device(parse_config(text));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.path() == path);
    }
  };
  std::string t = replaced(kMinimal, "sweep: {contact: b, start: 0.0, stop: 0.2, step: 0.1}",
                           "sweep: [{contact: b, start: 0.0, stop: 0.2}, {contact: a, start: 0.0, stop: 0.2}]");
  expect_path(t, "bias.sweep");
  expect_path(replaced(kMinimal, "step: 0.1", "step: -0.1"), "bias.sweep.step");
  expect_path(replaced(kMinimal, "contact: b", "contact: c"), "bias.sweep.contact");
  t = replaced(kMinimal, "level: 1.0e16", "level: -1.0");
  expect_path(t, "doping[0].level");
}

TEST_CASE("dump schedule") {
  DumpSchedule d;
  CHECK(d.wants(0.3, true));
  CHECK_FALSE(d.wants(0.3, false));
  d.kind = DumpSchedule::Kind::list;
  d.biases = {0.1, 0.5};
  CHECK(d.wants(0.5, false));
  CHECK_FALSE(d.wants(0.4, true));
  const RunConfig c = parse_config(kMinimal + "output: {directory: out, dump: [0.1]}\n");
  CHECK(c.dump.kind == DumpSchedule::Kind::list);
  CHECK(c.output_dir == "out");
}
