#include <doctest.h>

#include <sstream>

#include "subcluster/errors.hpp"
#include "subcluster/eval.hpp"

using namespace subcluster;

namespace {

EvalConfig small_eval() {
  EvalConfig c;
  c.gen = {200, 4, 6, 0.0, 1};
  c.seeds = {3, 1, 2};
  c.pre.k_hat = 4;
  c.pre.phi = 0.3;
  c.pre.eps = 1e-3;
  c.pre.t_min = 20;
  c.pre.degree = 0;
  c.pre.votes = 49;
  c.pre.max_leaves = 30;
  return c;
}

std::string csv(const EvalReport& r, bool timings = false) {
  std::ostringstream os;
  write_eval_csv(os, r, timings);
  return os.str();
}

}  // namespace

TEST_CASE("disconnected pipeline over three seeds") {
  const auto c = small_eval();
  const auto r = run_eval(c);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].seed == 1);
  CHECK(r.rows[2].seed == 3);
  for (const auto& row : r.rows) {
    CHECK(row.status == "ok");
    CHECK(row.eps_measured == 0.0);
    CHECK(row.queried == 200);
    // Only clusters without a representative contribute errors, all as bottom.
    CHECK(row.errors == row.unclassified);
    CHECK(row.errors % 50 == 0);
    CHECK(row.errors == 50 * (4 - row.representatives));
  }
  CHECK(r.digest == config_digest(c.gen, c.pre));
  const std::string text = csv(r);
  CHECK(text.rfind("# artifact_version=1\n# config_digest=", 0) == 0);
  CHECK(text.find("preprocess_seconds") == std::string::npos);
  CHECK(csv(r, true).find("preprocess_seconds") != std::string::npos);
}

TEST_CASE("evaluation output is reproducible") {
  auto c = small_eval();
  c.seeds = {4};
  c.queries = 60;
  const std::string a = csv(run_eval(c));
  CHECK(a == csv(run_eval(c)));
  c.threads = 2;
  CHECK(a == csv(run_eval(c)));
  c.pre.votes = 25;
  CHECK(a != csv(run_eval(c)));
}

TEST_CASE("failed preprocessing is a row, other errors name the stage") {
  auto c = small_eval();
  c.seeds = {1};
  c.pre.vote_fraction = 0.99;
  c.pre.dot_fraction = 0.99;
  c.pre.walks_scale = 0.05;
  const auto r = run_eval(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].status == "preprocess-failed");
  CHECK(r.rows[0].unclassified == 200);
  CHECK(r.rows[0].errors == 200);

  auto bad = small_eval();
  bad.gen.d = 2;
  try {
    run_eval(bad);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("stage generate") != std::string::npos);
  }
}

TEST_CASE("config description is canonical") {
  const auto c = small_eval();
  const std::string d = describe_config(c.gen, c.pre);
  CHECK(d.find("votes=49") != std::string::npos);
  auto other = c.pre;
  other.seed = 77;  // replaced per run, so not part of the digest
  CHECK(config_digest(c.gen, other) == config_digest(c.gen, c.pre));
  other.delta_exp = 0.7;
  CHECK(config_digest(c.gen, other) != config_digest(c.gen, c.pre));
}

TEST_CASE("scaling probe") {
  ScalingConfig s;
  s.gen = {4096, 4, 10, 0.0, 1};
  s.pre.phi = 0.5;
  s.pre.eps = 1e-3;
  s.build = false;
  const auto r = run_scaling_probe(s);
  CHECK(r.query_walks_decreasing);
  CHECK(r.product_spread <= 2.0);
  std::size_t prev = 0;
  for (const auto& row : r.rows) {
    if (row.sweep != "k") continue;
    if (prev) CHECK(row.query_walks < prev);
    prev = row.query_walks;
  }
  std::ostringstream os;
  write_scaling_csv(os, r);
  CHECK(os.str().find("query_walks_decreasing_in_k=yes") != std::string::npos);

  ScalingConfig built;
  built.gen = {200, 2, 6, 0.0, 1};
  built.ks = {2, 4};
  built.delta_exps = {0.5};
  built.pre.phi = 0.3;
  built.pre.eps = 1e-3;
  built.pre.t_min = 20;
  built.pre.degree = 0;
  built.pre.max_leaves = 30;
  const auto b = run_scaling_probe(built);
  for (const auto& row : b.rows) CHECK(row.artifact_bytes > 0);
}
