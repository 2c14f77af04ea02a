#include "hypflux/config.hpp"
#include "hypflux/driver.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

using namespace hypflux;
namespace fs = std::filesystem;

namespace {

const char* kBurgers = R"(
; comment
[problem]
name = burgers1d
seed = 7

[initial]
kind = sine
offset = 0.5
amplitude = 0.25   # trailing comment

[mesh]
cells = 32

[flux]
name = rusanov
speed = auto

[time]
final_time = 0.05
zeta = 0.2

[run]
record_every = 5
)";

fs::path temp_dir() {
  std::random_device rd;
  const fs::path p = fs::temp_directory_path() / ("hypflux_test_" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

std::string write(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string replace(std::string s, const std::string& a, const std::string& b) {
  const auto pos = s.find(a);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, a.size(), b);
}

}  // namespace

TEST_CASE("parse and serialize", "[config]") {
  const Config c = parse_config(kBurgers);
  CHECK(c.problem == "burgers1d");
  CHECK(c.seed == 7);
  CHECK(c.cells == 32);
  CHECK(c.flux_speed == 0.0);
  CHECK(c.zeta == 0.2);
  CHECK(c.initial_params.at("amplitude") == std::vector<double>{0.25});
  CHECK(c.dim() == 1);
  CHECK(c.components() == 1);
  CHECK_NOTHROW(validate_config(c, false));

  const std::string once = serialize_config(c);
  const Config back = parse_config(once);
  CHECK(back == c);
  CHECK(serialize_config(back) == once);
}

TEST_CASE("parse errors", "[config]") {
  CHECK_THROWS_AS(parse_config("[problem]\nname = burgers1d\nbogus = 1\n"), ParseError);
  CHECK_THROWS_WITH(parse_config("[problem]\nname = burgers1d\n[mesh]\nsize = 4\n"),
                    Catch::Matchers::ContainsSubstring("[mesh] size"));
  CHECK_THROWS_AS(parse_config("[problem]\nname = burgers1d\n[mesh]\ncells = many\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[problem]\nname = burgers1d\n[time]\nzeta = nan\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[mesh]\ncells = 4\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[problem\nname = x\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[problem]\nname = burgers1d\n[nowhere]\nx = 1\n"), ParseError);
}

TEST_CASE("validation errors", "[config]") {
  Config c = parse_config(kBurgers);
  c.zeta = 1.5;
  CHECK_THROWS_AS(validate_config(c, false), ValidationError);
  c = parse_config(kBurgers);
  c.problem = "maxwell";
  CHECK_THROWS_AS(validate_config(c, false), ValidationError);
  c = parse_config(kBurgers);
  c.cells = 2;
  CHECK_THROWS_AS(validate_config(c, false), ValidationError);
  c = parse_config(kBurgers);
  CHECK_THROWS_AS(validate_config(c, true), ValidationError);  // no levels
  c.final_time = 5.0;  // past the shock guard
  CHECK_THROWS_AS(build_problem(c), ValidationError);
}

TEST_CASE("entry points map failures to exit codes", "[config]") {
  const fs::path dir = temp_dir();
  const std::string good = write(dir, "good.ini", kBurgers);
  const std::string bad_zeta =
      write(dir, "zeta.ini", replace(kBurgers, "zeta = 0.2", "zeta = 1.5"));
  const std::string bad_syntax = write(dir, "syntax.ini", replace(kBurgers, "cells = 32", "cells = x"));

  CHECK(validate_only(good) == kExitOk);
  CHECK(validate_only(bad_zeta) == kExitValidation);
  CHECK(validate_only(bad_syntax) == kExitParse);
  CHECK(validate_only((dir / "missing.ini").string()) == kExitParse);
  CHECK(run_single(bad_zeta, (dir / "out").string(), 1) == kExitValidation);
  CHECK(run_single(good, (dir / "out").string(), 2) == kExitOk);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(fs::exists(dir / "out" / "ledger.json"));
  CHECK(fs::exists(dir / "out" / "metadata.json"));
  fs::remove_all(dir);
}

TEST_CASE("constant data runs clean", "[config]") {
  const Config c = parse_config(R"(
[problem]
name = advection1d
[system]
speed = 1.0
[initial]
kind = constant
value = 0.3
[mesh]
cells = 16
[time]
final_time = 0.1
)");
  validate_config(c, false);
  const Problem p = build_problem(c);
  const RunOutcome r = execute(p);
  CHECK(r.pass());
  CHECK(r.ledger.wbv_sq == 0.0);
  CHECK(r.ledger.wbv_l1 == 0.0);
  CHECK(r.ledger.mu_t_mass <= 1e-15);
  CHECK(r.cone_error <= 1e-28);
  CHECK(r.mass_drift <= 1e-15);
}

TEST_CASE("shipped configs", "[config][slow]") {
  const std::string dir = std::string(HYPFLUX_SOURCE_DIR) + "/configs/";
  for (const char* name : {"burgers1d.ini", "burgers1d_study.ini", "burgers1d_godunov_study.ini",
                           "advection1d_study.ini", "advection2d_perturbed.ini", "friedrichs1d.ini",
                           "shallow_water1d.ini", "constant.ini"}) {
    INFO(name);
    CHECK(validate_only(dir + name) == kExitOk);
  }

  const Config b = load_config(dir + "burgers1d.ini");
  const RunOutcome r = execute(build_problem(b));
  CHECK(r.pass());
  CHECK(r.ledger.entropy_residual_normalized_max <= 1e-10);

  const StudyOutcome s = execute_study(load_config(dir + "advection1d_study.ini"), 2);
  CHECK(s.table.fitted_rate >= 0.45);
  CHECK(s.table.fitted_rate <= 1.05);
  for (std::size_t i = 1; i < s.table.rows.size(); ++i)
    CHECK(s.table.rows[i].err_l2 < s.table.rows[i - 1].err_l2);
}
