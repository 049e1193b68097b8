// Copyright 2026 The dpopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <string>

#include "../support/config_text.hpp"
#include "dpopt/config.hpp"
#include "dpopt/errors.hpp"

using namespace dpopt;
using dpopt::testing::read_text;
using dpopt::testing::set_key;
using dpopt::testing::source_path;

namespace {

std::string message_of(const std::string& text) {
  try {
    experiment_from(KeyValueConfig::parse(text, "t.cfg"));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("key-value parsing with sections and comments") {
  const auto c = KeyValueConfig::parse(
      "# header\n"
      "top = 1\n"
      "[run]\n"
      "iterations = 250   # trailing\n"
      "\n"
      "[schedules]\n"
      "lambda.form = decaying\n",
      "x.cfg");
  CHECK(c.get_int("top") == 1);
  CHECK(c.get_int("run.iterations") == 250);
  CHECK(c.get_string("schedules.lambda.form") == "decaying");
  CHECK(c.get_double("missing", 2.5) == 2.5);
  CHECK_FALSE(c.has("iterations"));
  CHECK_NOTHROW(c.check_all_used());
}

TEST_CASE("parse errors carry line context") {
  auto what = [](const std::string& text) {
    try {
      KeyValueConfig::parse(text, "x.cfg");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(what("a = 1\na = 2\n").find("x.cfg:2") != std::string::npos);
  CHECK(what("a = 1\na = 2\n").find("duplicate") != std::string::npos);
  CHECK(what("[run\n").find("x.cfg:1") != std::string::npos);
  CHECK(what("x\n").find("key = value") != std::string::npos);
}

TEST_CASE("typed getters reject malformed values") {
  const auto c = KeyValueConfig::parse("a = 1.5x\nb = 2.5\nc = maybe\n");
  CHECK_THROWS_AS(c.get_double("a"), ConfigError);
  CHECK_THROWS_AS(c.get_int("b"), ConfigError);
  CHECK_THROWS_AS(c.get_bool("c", true), ConfigError);
  CHECK_THROWS_AS(c.get_string("nope"), ConfigError);
}

TEST_CASE("unknown keys are reported with their line") {
  const auto c = KeyValueConfig::parse("a = 1\nbogus = 2\n", "u.cfg");
  c.get_int("a");
  try {
    c.check_all_used();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string w = e.what();
    CHECK(w.find("bogus") != std::string::npos);
    CHECK(w.find("u.cfg:2") != std::string::npos);
  }
}

TEST_CASE("edge lists use sender->receiver") {
  const DirectedGraph g = parse_edges("0->1, 3->2,1->0", 4);
  REQUIRE(g.edges.size() == 3);
  CHECK(g.edges[0] == std::pair<int, int>{1, 0});
  CHECK(g.edges[1] == std::pair<int, int>{2, 3});
  CHECK(parse_edges("", 3).edges.empty());
  CHECK_THROWS_AS(parse_edges("0-1", 3), ConfigError);
  CHECK_THROWS_AS(parse_edges("a->1", 3), ConfigError);
  CHECK_THROWS_AS(parse_edges("0->5", 3), ConfigError);
  CHECK_THROWS_AS(parse_edges("1->1", 3), ConfigError);
}

TEST_CASE("schedule blocks") {
  const auto c = KeyValueConfig::parse(
      "g.form = decaying\ng.a = 1\ng.b = 0.1\ng.p = 0.9\n"
      "h.form = geometric\nh.a = 2\nh.r = 0.5\n"
      "bad.form = decaying\nbad.a = -1\nbad.b = 0.1\nbad.p = 1\n");
  const auto g = parse_schedule(c, "g");
  REQUIRE(g);
  CHECK((*g)(10) == doctest::Approx(1.0 / (1.0 + 0.1 * std::pow(10.0, 0.9))));
  CHECK((*parse_schedule(c, "h"))(2) == doctest::Approx(0.5));
  CHECK_FALSE(parse_schedule(c, "absent"));
  CHECK_THROWS_AS(parse_schedule(c, "bad"), ConfigError);
}

TEST_CASE("shipped configs load") {
  const ExperimentConfig a = load_experiment(source_path("configs/alg1_estimation.cfg"));
  CHECK(a.variant == Variant::kAlg1);
  CHECK(a.m == 5);
  CHECK(a.graph.edges.size() == 8);
  CHECK(a.runs == 100);
  CHECK(a.iterations == 10000);
  CHECK(a.noise_seed == 7);
  REQUIRE(a.lambda);
  CHECK((*a.lambda)(0) == doctest::Approx(0.02));
  REQUIRE(a.gradient_bound);
  CHECK(*a.gradient_bound == 1.0);
  CHECK_FALSE(a.pdop_nu_a);

  const ExperimentConfig b = load_experiment(source_path("configs/alg2_estimation.cfg"));
  CHECK(b.variant == Variant::kAlg2);
  REQUIRE(b.gamma2);
  CHECK(b.gamma2->power() == doctest::Approx(-0.7));
  for (const char* name : {"alg1_bad_gamma.cfg", "alg1_constant_nu.cfg", "alg2_bad_gamma2.cfg",
                           "pdop_alg1.cfg"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_experiment(source_path(std::string("configs/") + name)));
  }
  CHECK_THROWS_AS(load_experiment("/nonexistent/x.cfg"), IoError);
}

TEST_CASE("experiment-level validation messages") {
  const std::string base = read_text(source_path("configs/alg1_estimation.cfg"));
  CHECK(message_of(set_key(base, "run", "typo_key", "3")).find("run.typo_key") !=
        std::string::npos);
  CHECK(message_of(set_key(base, "algorithm", "variant", "sgd")).find("algorithm.variant") !=
        std::string::npos);
  CHECK(message_of(set_key(base, "run", "monte_carlo", "0")).find("run.monte_carlo") !=
        std::string::npos);
  CHECK(message_of(set_key(base, "privacy", "envelope", "flat")).find("privacy.envelope") !=
        std::string::npos);
  CHECK(message_of(set_key(base, "schedules", "gamma.p", "-2")).find("schedules.gamma") !=
        std::string::npos);

  const auto harvest = experiment_from(KeyValueConfig::parse(set_key(base, "privacy", "C", "harvest")));
  CHECK_FALSE(harvest.gradient_bound);
  const auto fixed = experiment_from(KeyValueConfig::parse(set_key(base, "pdop", "nu_a", "3.5")));
  REQUIRE(fixed.pdop_nu_a);
  CHECK(*fixed.pdop_nu_a == 3.5);
}
