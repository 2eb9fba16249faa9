#include "beliefvs/serialize.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include "beliefvs/error.hpp"

namespace beliefvs {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

const json& require(const json& doc, const char* key, const std::string& where) {
  if (!doc.is_object()) fail(where.empty() ? "document" : where, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) fail(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

std::size_t read_index(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    fail(where, "expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

double read_double(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

std::string read_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

const json& read_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
  return v;
}

json matrix(const Table& t) {
  json rows = json::array();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    auto row = t.row(r);
    rows.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

json block_names(VarMask block, const std::vector<std::string>& variables) {
  json names = json::array();
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (block & var_bit(i)) names.push_back(variables[i]);
  }
  return names;
}

VarMask parse_block(const json& doc, const std::vector<std::string>& variables,
                    const std::string& where) {
  VarMask block = 0;
  read_array(doc, where);
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const std::string item = where + "[" + std::to_string(k) + "]";
    const std::string name = read_string(doc[k], item);
    std::size_t i = 0;
    while (i < variables.size() && variables[i] != name) ++i;
    if (i == variables.size()) fail(item, "unknown variable '" + name + "'");
    if (block & var_bit(i)) fail(item, "variable '" + name + "' repeated");
    block |= var_bit(i);
  }
  return block;
}

ProjectionScheme parse_scheme_at(const json& doc, const std::vector<std::string>& variables,
                                 const std::string& where) {
  read_array(doc, where);
  std::vector<VarMask> blocks;
  for (std::size_t b = 0; b < doc.size(); ++b) {
    blocks.push_back(parse_block(doc[b], variables, where + "[" + std::to_string(b) + "]"));
  }
  try {
    return ProjectionScheme(variables.size(), std::move(blocks));
  } catch (const InputError& e) {
    fail(where, e.what());
  }
}

SchemeAssignment parse_assignment_at(const json& doc, const std::vector<std::string>& variables,
                                     const std::string& where) {
  if (!doc.is_object()) fail(where, "expected an object");
  const bool global = doc.contains("scheme");
  if (global == doc.contains("regions")) fail(where, "expected exactly one of 'scheme' or 'regions'");
  if (global) return SchemeAssignment(parse_scheme_at(doc["scheme"], variables, where + ".scheme"));
  std::map<std::size_t, std::vector<ProjectionScheme>> map;
  const json& regions = read_array(doc["regions"], where + ".regions");
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const std::string at = where + ".regions[" + std::to_string(r) + "]";
    const std::size_t stage = read_index(require(regions[r], "stage", at), at + ".stage");
    if (map.count(stage)) fail(at + ".stage", "stage " + std::to_string(stage) + " repeated");
    const json& schemes = read_array(require(regions[r], "schemes", at), at + ".schemes");
    std::vector<ProjectionScheme>& out = map[stage];
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      out.push_back(parse_scheme_at(schemes[i], variables, at + ".schemes[" + std::to_string(i) + "]"));
    }
  }
  return SchemeAssignment(std::move(map));
}

std::string csv_number(double v) { return json(v).dump(); }

}  // namespace

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_json(text.str(), path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw InputError(path.string() + ": write failed");
}

json model_to_json(const Pomdp& model) {
  json doc;
  doc["variables"] = model.variables;
  doc["actions"] = model.actions;
  doc["observations"] = model.observations;
  json transitions = json::object();
  json observation = json::object();
  for (std::size_t a = 0; a < model.num_actions(); ++a) {
    transitions[model.actions[a]] = {{"flat", matrix(model.transition[a])}};
    observation[model.actions[a]] = matrix(model.observation[a]);
  }
  doc["transitions"] = std::move(transitions);
  doc["observation"] = std::move(observation);
  doc["reward"] = model.reward;
  doc["discount"] = model.discount;
  return doc;
}

json policy_to_json(const Pomdp& model, const std::vector<AlphaSet>& stages) {
  json doc;
  doc["model"] = model_to_json(model);
  doc["horizon"] = stages.size();
  json out = json::array();
  for (const AlphaSet& set : stages) {
    json vectors = json::array();
    for (const AlphaVector& v : set.vectors) {
      vectors.push_back({{"values", v.values},
                         {"action", model.actions.at(v.action)},
                         {"strategy", v.strategy}});
    }
    out.push_back({{"stage", set.stage}, {"vectors", std::move(vectors)}});
  }
  doc["stages"] = std::move(out);
  return doc;
}

Policy parse_policy(const json& doc) {
  Policy policy;
  policy.model = compile_model(require(doc, "model", ""));
  const Pomdp& model = policy.model;
  const std::size_t horizon = read_index(require(doc, "horizon", ""), "horizon");
  const json& stages = read_array(require(doc, "stages", ""), "stages");
  if (horizon == 0) fail("horizon", "must be at least 1");
  if (stages.size() != horizon) fail("stages", "expected " + std::to_string(horizon) + " entries");
  std::size_t prev_size = 1;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const std::string at = "stages[" + std::to_string(k) + "]";
    AlphaSet set;
    set.stage = read_index(require(stages[k], "stage", at), at + ".stage");
    if (set.stage != k + 1) fail(at + ".stage", "expected " + std::to_string(k + 1));
    const json& vectors = read_array(require(stages[k], "vectors", at), at + ".vectors");
    if (vectors.empty()) fail(at + ".vectors", "empty");
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      const std::string vat = at + ".vectors[" + std::to_string(i) + "]";
      AlphaVector v;
      v.stage = set.stage;
      const json& values = read_array(require(vectors[i], "values", vat), vat + ".values");
      if (values.size() != model.num_states()) {
        fail(vat + ".values", "expected " + std::to_string(model.num_states()) + " entries");
      }
      for (std::size_t s = 0; s < values.size(); ++s) {
        v.values.push_back(read_double(values[s], vat + ".values[" + std::to_string(s) + "]"));
      }
      const std::string action = read_string(require(vectors[i], "action", vat), vat + ".action");
      while (v.action < model.num_actions() && model.actions[v.action] != action) ++v.action;
      if (v.action == model.num_actions()) fail(vat + ".action", "unknown action '" + action + "'");
      const json& strategy = read_array(require(vectors[i], "strategy", vat), vat + ".strategy");
      if (strategy.size() != model.num_observations()) {
        fail(vat + ".strategy", "expected one entry per observation");
      }
      for (std::size_t z = 0; z < strategy.size(); ++z) {
        const std::string zat = vat + ".strategy[" + std::to_string(z) + "]";
        const std::size_t j = read_index(strategy[z], zat);
        if (j >= prev_size) fail(zat, "index out of range");
        v.strategy.push_back(j);
      }
      set.vectors.push_back(std::move(v));
    }
    prev_size = set.size();
    policy.stages.push_back(std::move(set));
  }
  return policy;
}

json scheme_to_json(const ProjectionScheme& scheme, const std::vector<std::string>& variables) {
  json doc = json::array();
  for (VarMask block : scheme.blocks()) doc.push_back(block_names(block, variables));
  return doc;
}

ProjectionScheme parse_scheme(const json& doc, const std::vector<std::string>& variables) {
  return parse_scheme_at(doc, variables, "scheme");
}

json assignment_to_json(const SchemeAssignment& schemes, const std::vector<std::string>& variables) {
  if (schemes.is_global()) return {{"scheme", scheme_to_json(schemes.global(), variables)}};
  json regions = json::array();
  for (const auto& [stage, list] : schemes.per_region()) {
    json out = json::array();
    for (const ProjectionScheme& s : list) out.push_back(scheme_to_json(s, variables));
    regions.push_back({{"stage", stage}, {"schemes", std::move(out)}});
  }
  return {{"regions", std::move(regions)}};
}

SchemeAssignment parse_assignment(const json& doc, const std::vector<std::string>& variables) {
  return parse_assignment_at(doc, variables, "schemes");
}

json search_result_to_json(const SearchResult& result, const std::vector<std::string>& variables) {
  json doc;
  doc["method"] = to_string(result.method);
  doc["scope"] = to_string(result.scope);
  doc["seconds"] = result.seconds;
  doc["schemes"] = assignment_to_json(result.schemes, variables);
  json traces = json::array();
  for (const SearchTrace& t : result.traces) {
    json trace;
    if (t.stage) trace["stage"] = *t.stage;
    if (t.region) trace["region"] = *t.region;
    json steps = json::array();
    for (const TraceStep& step : t.steps) {
      steps.push_back({{"merged", block_names(step.merged, variables)}, {"score", step.score}});
    }
    trace["steps"] = std::move(steps);
    traces.push_back(std::move(trace));
  }
  doc["traces"] = std::move(traces);
  return doc;
}

SearchResult parse_search_result(const json& doc, const std::vector<std::string>& variables) {
  SearchResult result;
  const std::string method = read_string(require(doc, "method", ""), "method");
  const auto m = parse_search_method(method);
  if (!m) fail("method", "unknown search method '" + method + "'");
  result.method = *m;
  const std::string scope = read_string(require(doc, "scope", ""), "scope");
  const auto sc = parse_stage_scope(scope);
  if (!sc) fail("scope", "unknown scope '" + scope + "'");
  result.scope = *sc;
  result.seconds = read_double(require(doc, "seconds", ""), "seconds");
  result.schemes = parse_assignment_at(require(doc, "schemes", ""), variables, "schemes");
  const json& traces = read_array(require(doc, "traces", ""), "traces");
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const std::string at = "traces[" + std::to_string(t) + "]";
    SearchTrace trace;
    if (!traces[t].is_object()) fail(at, "expected an object");
    if (traces[t].contains("stage")) trace.stage = read_index(traces[t]["stage"], at + ".stage");
    if (traces[t].contains("region")) trace.region = read_index(traces[t]["region"], at + ".region");
    const json& steps = read_array(require(traces[t], "steps", at), at + ".steps");
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const std::string sat = at + ".steps[" + std::to_string(k) + "]";
      TraceStep step;
      step.merged = parse_block(require(steps[k], "merged", sat), variables, sat + ".merged");
      step.score = read_double(require(steps[k], "score", sat), sat + ".score");
      trace.steps.push_back(step);
    }
    result.traces.push_back(std::move(trace));
  }
  return result;
}

json bounds_report_to_json(const BoundsReport& report, const std::vector<std::string>& variables) {
  json doc;
  doc["schemes"] = assignment_to_json(report.scheme, variables);
  doc["method"] = to_string(report.method);
  json stages = json::array();
  for (const StageBounds& sb : report.per_stage) {
    json stage;
    stage["stage"] = sb.stage;
    stage["B"] = sb.b;
    stage["E"] = sb.e ? json(*sb.e) : json(nullptr);
    stage["switch_sets"] = sb.switch_sets;
    stage["alt_set_sizes"] = sb.alt_set_sizes;
    stages.push_back(std::move(stage));
  }
  doc["per_stage"] = std::move(stages);
  return doc;
}

json eval_report_to_json(const EvalReport& report) {
  json doc;
  doc["method"] = report.method;
  doc["mode"] = to_string(report.mode);
  doc["num_beliefs"] = report.num_beliefs;
  doc["seed"] = report.seed;
  doc["horizon"] = report.horizon;
  doc["instance"] = {{"variables", report.num_variables},
                     {"actions", report.num_actions},
                     {"observations", report.num_observations}};
  doc["bound_tests"] = to_string(report.bound_tests);
  doc["average_loss"] = report.average_loss;
  doc["max_loss"] = report.max_loss;
  doc["B"] = report.bound_b;
  doc["E"] = report.bound_e ? json(*report.bound_e) : json(nullptr);
  doc["seconds"] = report.seconds;
  doc["eval_seconds"] = report.eval_seconds;
  return doc;
}

std::string eval_csv(const std::vector<EvalReport>& reports) {
  std::string out = "method,mode,average_loss,B,E,seconds\n";
  for (const EvalReport& r : reports) {
    out += r.method + "," + to_string(r.mode) + "," + csv_number(r.average_loss) + "," +
           csv_number(r.bound_b) + "," + (r.bound_e ? csv_number(*r.bound_e) : "") + "," +
           csv_number(r.seconds) + "\n";
  }
  return out;
}

}  // namespace beliefvs
