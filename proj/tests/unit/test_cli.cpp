#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nwlab.hpp"

using namespace nwlab;

TEST_CASE("number parsing") {
  CHECK(std::isinf(parse_real("inf", "p")));
  CHECK(parse_real("1/32", "t") == 1.0 / 32);
  CHECK(parse_real(" 2.5 ", "p") == 2.5);
  CHECK_THROWS_AS(parse_real("two", "p"), UsageError);
  CHECK_THROWS_AS(parse_real("2x", "p"), UsageError);
  const auto list = parse_real_list("1, 1/2,0.25", "t-list");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 0.5);
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("config file entries yield to explicit flags") {
  const auto entries = parse_config_text("# sweep\nmodel = sphere2\nr=2\n\nseed=9\nq=inf\n");
  CHECK(entries.size() == 4);
  RunConfig c;
  c.r = 3.0;
  apply_config_entries(c, entries, {"r"});
  CHECK(c.model == nwidths::ManifoldKind::Sphere2);
  CHECK(*c.r == 3.0);
  CHECK(c.seed == 9);
  CHECK(std::isinf(*c.q));
  CHECK_THROWS_AS(apply_config_entries(c, {{"colour", "red"}}, {}), UsageError);
  CHECK_THROWS_AS(parse_config_text("novalue\n"), UsageError);
  CHECK_THROWS_AS(apply_config_entries(c, {{"model", "klein"}}, {}), UsageError);
}

TEST_CASE("validation names the violated precondition") {
  RunConfig c;
  c.experiment = Experiment::ApproxRate;
  c.r = 0.2;
  c.q = INFINITY;
  CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("basic exponent"), UsageError);
  RunConfig n;
  n.experiment = Experiment::Nikolskii;
  n.p = 4.0;
  n.q = 2.0;
  CHECK_THROWS_WITH_AS(validate(n), doctest::Contains("p <= q"), UsageError);
  RunConfig k;
  k.experiment = Experiment::KernelDecay;
  k.t_list = {2.0};
  CHECK_THROWS_AS(validate(k), UsageError);
  RunConfig s;
  s.experiment = Experiment::PolySpan;
  CHECK_THROWS_AS(run(s), UsageError);
  CHECK_THROWS_AS(parse_experiment("widths"), UsageError);
}

TEST_CASE("weyl experiment matches closed forms") {
  RunConfig c;
  c.experiment = Experiment::Weyl;
  c.model = nwidths::ManifoldKind::Sphere2;
  const auto r = run(c);
  CHECK(r.passed());
  CHECK(r.rows.size() == 8);
  for (const auto& row : r.rows) {
    const double omega = std::get<double>(row[0]);
    int k = 0;
    while ((k + 1.0) * (k + 2.0) <= omega) ++k;
    CHECK(std::get<double>(row[1]) == (k + 1.0) * (k + 1.0));
  }
  c.model = nwidths::ManifoldKind::Circle;
  for (const auto& row : run(c).rows) {
    CHECK(std::get<double>(row[1]) == 2.0 * std::floor(std::sqrt(std::get<double>(row[0]))) + 1.0);
  }
}

TEST_CASE("partition and approx-rate experiments pass") {
  RunConfig p;
  p.experiment = Experiment::Partition;
  const auto pr = run(p);
  CHECK(pr.passed());
  CHECK(pr.flag("max_deviation")->value <= 1e-12);
  RunConfig a;
  a.experiment = Experiment::ApproxRate;
  const auto ar = run(a);
  CHECK(ar.passed());
  CHECK(std::abs(*ar.fit("slope") + 1.0) <= 0.1);
  CHECK(ar.anchor == "width-upper-bound");
  a.tol = 1e-6;
  CHECK_FALSE(run(a).passed());
}

TEST_CASE("csv output") {
  Report empty;
  empty.columns = {"omega", "count"};
  std::ostringstream os;
  emit_csv(empty, os);
  CHECK(os.str() == "omega,count\r\n");

  Report quoted;
  quoted.columns = {"name", "value"};
  quoted.rows.push_back({std::string("a,\"b\""), 1.5});
  std::ostringstream qs;
  emit_csv(quoted, qs);
  CHECK(qs.str() == "name,value\r\n\"a,\"\"b\"\"\",1.5\r\n");
  std::istringstream qi(qs.str());
  const auto qt = read_csv(qi);
  REQUIRE(qt.rows.size() == 1);
  CHECK(qt.rows[0][0] == "a,\"b\"");

  RunConfig c;
  c.experiment = Experiment::Weyl;
  c.omega_max = 4.0 * 4.0;
  const auto r = run(c);
  std::stringstream ss;
  emit_csv(r, ss);
  const auto table = read_csv(ss);
  CHECK(table.header == r.columns);
  REQUIRE(table.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    for (std::size_t k = 0; k < r.columns.size(); ++k) {
      CHECK(std::strtod(table.rows[i][k].c_str(), nullptr) == std::get<double>(r.rows[i][k]));
    }
  }
  CHECK_FALSE(table.metadata.empty());
  CHECK(table.metadata.front() == "experiment=weyl");
}

TEST_CASE("json output is complete and deterministic") {
  RunConfig c;
  c.experiment = Experiment::ApproxRate;
  c.seed = 42;
  const auto a = to_json_string(run(c));
  const auto b = to_json_string(run(c));
  CHECK(a == b);
  const auto j = nlohmann::json::parse(a);
  for (const char* key : {"config", "rows", "fits", "flags", "anchor"}) CHECK(j.contains(key));
  CHECK_FALSE(j.contains("duration_seconds"));
  CHECK(nlohmann::json::parse(to_json_string(run(c), true)).contains("duration_seconds"));
  CHECK(j["rows"].size() == 6);
  CHECK(j["config"]["seed"] == "42");
  RunConfig n;
  n.experiment = Experiment::Nikolskii;
  n.model = nwidths::ManifoldKind::Sphere2;
  const auto nj = nlohmann::json::parse(to_json_string(run(n)));
  CHECK(nj["config"]["q"] == "inf");
  CHECK(nj["passed"] == true);
}

TEST_CASE("emit reports unwritable paths") {
  Report r;
  r.columns = {"x"};
  CHECK_THROWS_AS(emit(r, Format::Json, "/nonexistent-dir/out.json"), std::runtime_error);
}
