#include <doctest.h>

#include "liectrl/config.hpp"

using namespace liectrl;

TEST_CASE("minimal catalog config parses with defaults") {
  ExperimentConfig cfg = parse_config_text(R"({"algebra": "rn:1"})");
  CHECK(cfg.algebra_name == "rn:1");
  CHECK(cfg.table->dim() == 1);
  CHECK(cfg.drift.D.norm() == doctest::Approx(0.0));
  CHECK(cfg.drift.z.norm() == doctest::Approx(0.0));
  CHECK(cfg.controls.dirs.size() == 1);
  CHECK(cfg.numerics.seed == 0);
  CHECK(cfg.pair.eps.size() == 2);
  CHECK_NOTHROW(cfg.system().validate());
}

TEST_CASE("derivation failures are reported with the Leibniz residual") {
  const char* text = R"({
    "algebra": "heis3",
    "drift": {"D": [[1,0,0],[0,2,0],[0,0,4]], "z": [0,0,0]}
  })";
  CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("Leibniz"), Error);
}

TEST_CASE("a control range touching zero is rejected") {
  const char* text = R"({
    "algebra": "rn:1",
    "controls": {"dirs": [[1]], "range_lo": [0.0], "range_hi": [1.0]}
  })";
  CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("not interior"), Error);
}

TEST_CASE("every validation error is aggregated into one report") {
  const char* text = R"({
    "algebra": "heis3",
    "drift": {"D": [[1,0,0],[0,2,0],[0,0,4]], "z": [0,0,0]},
    "controls": {"dirs": [[1,0,0]], "range_lo": [0.0], "range_hi": [1.0]},
    "pair": {"k_lo": [-1,-1,-1], "k_hi": [1,1,1], "q_lo": [-0.5,-0.5,-0.5],
             "q_hi": [0.5,0.5,0.5], "k_spacing": 0.5, "eps": [0.1], "tau": [1,2,3,4]}
  })";
  try {
    parse_config_text(text);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    std::string msg = e.what();
    CHECK(msg.find("Leibniz") != std::string::npos);
    CHECK(msg.find("not interior") != std::string::npos);
    CHECK(msg.find("contained in Q") != std::string::npos);
    CHECK(msg.find("3 validation error") != std::string::npos);
  }
}

TEST_CASE("malformed json raises a parse error") {
  CHECK_THROWS_AS(parse_config_text("{not json"), Error);
  try {
    parse_config_text("{not json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

TEST_CASE("inline algebra tables are validated and parsed") {
  const char* text = R"({
    "algebra": {
      "dim": 3,
      "structure": [[1,2,3,1.0],[2,1,3,-1.0]],
      "rep_basis": [[0,1,0, 0,0,0, 0,0,0], [0,0,0, 0,0,1, 0,0,0], [0,0,1, 0,0,0, 0,0,0]],
      "basis_names": ["P","Q","R"],
      "exp_global": true,
      "nilpotency_class": 2
    },
    "drift": {"D": [[1,0,0],[0,2,0],[0,0,3]], "z": [1,0,0]},
    "controls": {"dirs": [[1,0,0]], "range_lo": [-1], "range_hi": [1]}
  })";
  ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.algebra_name.empty());
  CHECK(cfg.table->dim() == 3);
  CHECK(cfg.table->rep_nilpotent());
  CHECK(validate_algebra(*cfg.table).pass);
}

TEST_CASE("an inline table violating the axioms is rejected") {
  const char* text = R"({
    "algebra": {
      "dim": 3,
      "structure": [[1,2,3,1.0],[2,1,3,1.0]],
      "rep_basis": [[0,1,0, 0,0,0, 0,0,0], [0,0,0, 0,0,1, 0,0,0], [0,0,1, 0,0,0, 0,0,0]],
      "exp_global": true
    }
  })";
  CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("antisymmetry"), Error);
}

TEST_CASE("dumped configs reparse to the same experiment") {
  const char* text = R"({
    "algebra": "heis3",
    "drift": {"D": [[1,0,0],[0,2,0],[0,0,3]], "z": [1,0,0]},
    "controls": {"dirs": [[1,0,0],[0,1,0]], "range_lo": [-1,-2], "range_hi": [1,2], "dt": 0.5},
    "pair": {"k_lo": [-0.4,-0.4,-0.4], "k_hi": [0.4,0.4,0.4], "k_spacing": 0.2,
             "q_lo": [-0.5,-0.5,-0.5], "q_hi": [0.5,0.5,0.5],
             "eps": [0.2,0.1], "tau": [1,2,3,4,5]},
    "numerics": {"seed": 42, "step": 0.001}
  })";
  ExperimentConfig cfg = parse_config_text(text);
  nlohmann::json dumped = cfg.to_json();
  ExperimentConfig reparsed = parse_config_json(dumped);
  CHECK(reparsed.to_json() == dumped);
  CHECK(reparsed.numerics.seed == 42);
  CHECK(reparsed.controls.dt == doctest::Approx(0.5));
}

TEST_CASE("inline tables survive the dump round trip") {
  const char* text = R"({
    "algebra": {
      "dim": 2,
      "structure": [[1,2,2,1.0],[2,1,2,-1.0]],
      "rep_basis": [[1,0, 0,0], [0,1, 0,0]],
      "basis_names": ["X","Y"],
      "exp_global": true
    }
  })";
  ExperimentConfig cfg = parse_config_text(text);
  nlohmann::json dumped = cfg.to_json();
  ExperimentConfig reparsed = parse_config_json(dumped);
  CHECK(reparsed.to_json() == dumped);
  CHECK(reparsed.table->basis_names()[1] == "Y");
}

TEST_CASE("misaligned integrator step is rejected") {
  const char* text = R"({
    "algebra": "rn:1",
    "controls": {"dirs": [[1]], "range_lo": [-1], "range_hi": [1], "dt": 0.25},
    "numerics": {"step": 0.0003}
  })";
  CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("divide"), Error);
}
