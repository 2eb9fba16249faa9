#include <filesystem>
#include <functional>
#include <string>

#include "doctest.h"
#include "helpers.hpp"

#include "beliefvs/error.hpp"
#include "beliefvs/serialize.hpp"

using namespace beliefvs;
using namespace testing;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("models survive dump and reload byte for byte") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Pomdp m = make_random(seed, 3, 2, 3);
    const std::string text = dump(model_to_json(m));
    const Pomdp back = compile_model(parse_json(text));
    CHECK(back.transition == m.transition);
    CHECK(back.observation == m.observation);
    CHECK(back.reward == m.reward);
    CHECK(back.discount == m.discount);
    CHECK(dump(model_to_json(back)) == text);
  }
  const Pomdp toy = compile_model(toy_model_json());
  CHECK(dump(model_to_json(compile_model(model_to_json(toy)))) == dump(model_to_json(toy)));
}

TEST_CASE("policies round-trip with their plan annotations") {
  const Pomdp m = make_random(3, 3, 2, 2);
  const auto stages = solve(m, 3);
  const std::string text = dump(policy_to_json(m, stages));
  const Policy p = parse_policy(parse_json(text));
  REQUIRE(p.stages.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    REQUIRE(p.stages[k].size() == stages[k].size());
    CHECK(p.stages[k].stage == k + 1);
    for (std::size_t i = 0; i < stages[k].size(); ++i) {
      CHECK(p.stages[k][i].values == stages[k][i].values);
      CHECK(p.stages[k][i].action == stages[k][i].action);
      CHECK(p.stages[k][i].strategy == stages[k][i].strategy);
    }
  }
  CHECK(dump(policy_to_json(p.model, p.stages)) == text);
}

TEST_CASE("policy diagnostics point at the bad field") {
  const Pomdp m = make_random(4, 2, 2, 2);
  const json good = policy_to_json(m, solve(m, 2));
  json doc = good;
  doc["stages"][1]["vectors"][0]["strategy"][0] = 99;
  CHECK(error_of([&] { parse_policy(doc); }).find("stages[1].vectors[0].strategy[0]") != std::string::npos);
  doc = good;
  doc["stages"][0]["vectors"][0]["values"].erase(0);
  CHECK(error_of([&] { parse_policy(doc); }).find("stages[0].vectors[0].values") != std::string::npos);
  doc = good;
  doc["stages"][0]["vectors"][0]["action"] = "jump";
  CHECK(error_of([&] { parse_policy(doc); }).find("unknown action 'jump'") != std::string::npos);
  doc = good;
  doc["horizon"] = 3;
  CHECK(error_of([&] { parse_policy(doc); }).find("stages") != std::string::npos);
  doc = good;
  doc["stages"][1]["stage"] = 5;
  CHECK(error_of([&] { parse_policy(doc); }).find("stages[1].stage") != std::string::npos);
  doc = good;
  doc.erase("model");
  CHECK(error_of([&] { parse_policy(doc); }).find("model") != std::string::npos);
}

TEST_CASE("schemes use variable names") {
  const std::vector<std::string> vars = {"A", "B", "C"};
  const ProjectionScheme s(3, {0b101, 0b010});
  const json doc = scheme_to_json(s, vars);
  CHECK(doc.dump() == R"([["A","C"],["B"]])");
  CHECK(parse_scheme(doc, vars) == s);
  CHECK(error_of([&] { parse_scheme(json::parse(R"([["A","D"],["B","C"]])"), vars); })
            .find("unknown variable 'D'") != std::string::npos);
  CHECK(error_of([&] { parse_scheme(json::parse(R"([["A","B"],["B","C"]])"), vars); })
            .find("overlap") != std::string::npos);
  CHECK(error_of([&] { parse_scheme(json::parse(R"([["A","B"]])"), vars); })
            .find("cover") != std::string::npos);
  CHECK(error_of([&] { parse_scheme(json::parse(R"({"A": 1})"), vars); }).find("scheme") !=
        std::string::npos);
}

TEST_CASE("search results round-trip") {
  const Pomdp m = make_random(85, 2, 2, 2);
  const auto stages = solve(m, 3);
  for (auto method : {SearchMethod::BVs, SearchMethod::VsSum}) {
    SearchConfig config;
    config.method = method;
    const SearchResult r = run_search(m, stages, config);
    const std::string text = dump(search_result_to_json(r, m.variables));
    const SearchResult back = parse_search_result(parse_json(text), m.variables);
    CHECK(back.method == r.method);
    CHECK(back.scope == r.scope);
    CHECK(back.seconds == r.seconds);
    CHECK(back.traces.size() == r.traces.size());
    CHECK(dump(search_result_to_json(back, m.variables)) == text);
  }
  json bad = search_result_to_json(run_search(m, stages, {}), m.variables);
  bad["method"] = "greedy";
  CHECK(error_of([&] { parse_search_result(bad, m.variables); }).find("unknown search method") !=
        std::string::npos);
}

TEST_CASE("assignments keep their per-region layout") {
  const std::vector<std::string> vars = {"X", "Y", "Z"};
  std::map<std::size_t, std::vector<ProjectionScheme>> map;
  map[1] = {lattice_root(3)};
  map[2] = {lattice_root(3), ProjectionScheme(3, {0b011, 0b100})};
  const SchemeAssignment a(map);
  const json doc = assignment_to_json(a, vars);
  const SchemeAssignment back = parse_assignment(doc, vars);
  CHECK(back.per_region() == a.per_region());
  json both = doc;
  both["scheme"] = scheme_to_json(lattice_root(3), vars);
  CHECK(error_of([&] { parse_assignment(both, vars); }).find("exactly one") != std::string::npos);
}

TEST_CASE("reports serialize deterministically") {
  const Pomdp m = make_random(5, 3, 2, 2);
  const auto stages = solve(m, 2);
  const SchemeAssignment s(ProjectionScheme::singletons(3));
  BoundsOptions options;
  const BoundsReport bounds = compute_bounds(m, stages, s, options);
  const json bdoc = bounds_report_to_json(bounds, m.variables);
  CHECK(bdoc["per_stage"].size() == 2);
  CHECK(dump(parse_json(dump(bdoc))) == dump(bdoc));

  EvalConfig config;
  config.num_beliefs = 20;
  EvalReport r = average_error(m, stages, s, config, "scheme", 0.25);
  const json edoc = eval_report_to_json(r);
  CHECK(dump(parse_json(dump(edoc))) == dump(edoc));
  const std::string csv = eval_csv({r});
  CHECK(csv.rfind("method,mode,average_loss,B,E,seconds\nscheme,successive,", 0) == 0);
  r.bound_e.reset();
  CHECK(eval_csv({r}).find(",,0.25\n") != std::string::npos);
}

TEST_CASE("file helpers report unreadable and malformed files") {
  const auto dir = std::filesystem::temp_directory_path() / "beliefvs_serialize_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "bad.json";
  write_text_file(path, "{\n  \"a\": 1,\n  \"b\": \n}\n");
  const std::string msg = error_of([&] { read_json_file(path); });
  CHECK(msg.find("bad.json") != std::string::npos);
  CHECK(msg.find("line 4") != std::string::npos);
  CHECK(error_of([&] { read_json_file(dir / "missing.json"); }).find("cannot open") !=
        std::string::npos);
  std::filesystem::remove_all(dir);
}
