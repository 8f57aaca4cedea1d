#include <doctest.h>

#include <cmath>

#include "vring/config_io.hpp"
#include "vring/errors.hpp"

using namespace vring;
using nlohmann::json;

TEST_CASE("defaults and normalised snapshot") {
  const RunConfig rc = parse_config(json{{"epsilon", 0.05}});
  CHECK(rc.problem.epsilon == 0.05);
  CHECK(rc.problem.n_r == 192);
  CHECK(rc.generator.family() == ProfileFamily::power_law);
  CHECK(rc.snapshot["Lambda"] == 40.0);
  CHECK(rc.snapshot["profile"]["family"] == "power_law");
  // The snapshot parses back to the same snapshot.
  CHECK(parse_config(rc.snapshot).snapshot == rc.snapshot);
}

TEST_CASE("every offending key is reported") {
  const json doc = {{"epsilon", 1.5},
                    {"grid", {{"n_r", "many"}}},
                    {"tol", {{"zeta", 1e-8}, {"bogus", 1}}},
                    {"profile", {{"family", "turkington"}, {"alpha", -1.0}}}};
  try {
    parse_config(doc);
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(0, 1)") != std::string::npos);
    CHECK(msg.find("grid.n_r") != std::string::npos);
    CHECK(msg.find("tol.bogus") != std::string::npos);
    CHECK(msg.find("profile") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(json{{"epsilons", {0.1, 2.0}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json::object()), ConfigError);
}

TEST_CASE("sweep csv round trip") {
  SweepPoint p;
  p.epsilon = 0.025;
  p.mu = 7.3;
  p.E = 17.5;
  p.R_center = 1.5;
  p.simply_connected = true;
  p.status = "not_converged";
  const std::string text = sweep_csv({p, p});
  CHECK(text.rfind(kSweepHeader, 0) == 0);
  const auto back = parse_sweep_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].epsilon == 0.025);
  CHECK(back[0].mu == 7.3);
  CHECK(back[0].simply_connected);
  CHECK(back[1].status == "not_converged");
  CHECK_THROWS_AS(parse_sweep_csv("a,b\n1,2\n"), ConfigError);
}

TEST_CASE("number formatting is shortest round trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-10) == "1e-10");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
}
