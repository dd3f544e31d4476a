#include <doctest.h>

#include "adlab/config.hpp"

using adlab::Error;
using adlab::cli::parse_config;

TEST_CASE("minimal config fills in the defaults") {
  auto cfg = parse_config("[model]\nname = constant\n");
  CHECK(cfg.model_name == "constant");
  CHECK(cfg.grid_size == 2048);
  CHECK(cfg.sample_count == 513);
  CHECK(cfg.steps == 0);
  CHECK(cfg.level == 0);
  CHECK(cfg.picture == 'a');
  CHECK(cfg.mode == "self-consistent");
  CHECK(cfg.format == "csv");
  REQUIRE(cfg.T_values.size() == 7);
  CHECK(cfg.T_values.front() == 16);
  CHECK(cfg.T_values.back() == 1024);
}

TEST_CASE("T lists parse and must increase") {
  auto cfg = parse_config("[model]\nname = constant\n[run]\nT = 16,32,64\n");
  REQUIRE(cfg.T_values == std::vector<double>{16, 32, 64});
  CHECK_THROWS_WITH_AS(
      parse_config("[model]\nname = constant\n[run]\nT = 32,16\n"),
      doctest::Contains("strictly increasing"), Error);
  auto single = parse_config("[model]\nname = constant\n[run]\nT = 100\n");
  REQUIRE(single.T_values == std::vector<double>{100});
}

TEST_CASE("typos are hard errors carrying the line number") {
  CHECK_THROWS_WITH_AS(parse_config("[model]\nnamee = constant\n"),
                       doctest::Contains("line 2"), Error);
  CHECK_THROWS_WITH_AS(
      parse_config("[model]\nname = constant\n[run]\nstepss = 2\n"),
      doctest::Contains("line 4"), Error);
  CHECK_THROWS_WITH_AS(parse_config("[modell]\nname = constant\n"),
                       doctest::Contains("line 1"), Error);
}

TEST_CASE("model parameters are validated against the catalog") {
  auto cfg = parse_config(
      "[model]\nname = spin-rotating-field\ntheta = 0.5\nomega0 = 8\n");
  CHECK(cfg.model_scalars.at("theta") == doctest::Approx(0.5));
  CHECK(cfg.model_scalars.at("omega0") == doctest::Approx(8.0));
  CHECK_THROWS_WITH_AS(
      parse_config("[model]\nname = spin-rotating-field\nthetaa = 0.5\n"),
      doctest::Contains("line 3"), Error);
  CHECK_THROWS_WITH_AS(parse_config("[model]\nname = no-such-model\n"),
                       doctest::Contains("unknown model"), Error);
  auto lists = parse_config("[model]\nname = constant\nenergies = 0,0.5,2\n");
  REQUIRE(lists.model_lists.at("energies") ==
          std::vector<double>{0.0, 0.5, 2.0});
}

TEST_CASE("missing model.name is rejected") {
  CHECK_THROWS_WITH_AS(parse_config("[run]\nT = 16,32\n"),
                       doctest::Contains("model.name"), Error);
}

TEST_CASE("malformed values are parse errors") {
  CHECK_THROWS_WITH_AS(
      parse_config("[model]\nname = constant\n[run]\nK = many\n"),
      doctest::Contains("line 4"), Error);
  CHECK_THROWS_AS(
      parse_config("[model]\nname = constant\n[run]\nsteps = 1.5\n"), Error);
  CHECK_THROWS_AS(
      parse_config("[model]\nname = constant\n[run]\npicture = c\n"), Error);
  CHECK_THROWS_AS(
      parse_config("[model]\nname = constant\n[output]\nformat = xml\n"),
      Error);
  CHECK_THROWS_AS(parse_config("name = constant\n"), Error);
}

TEST_CASE("comments and blank lines are ignored") {
  auto cfg = parse_config(
      "# experiment\n\n[model]\nname = constant  # default energies\n\n"
      "[output]\npath = out.csv\n");
  CHECK(cfg.model_name == "constant");
  CHECK(cfg.out_path == "out.csv");
}
