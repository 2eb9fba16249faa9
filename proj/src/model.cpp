#include "beliefvs/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "beliefvs/error.hpp"

namespace beliefvs {

namespace {

using nlohmann::json;

constexpr double kStochasticTolerance = 1e-9;
constexpr double kSpecTolerance = 1e-6;
// Dense tables beyond this many entries are refused (~2 GiB of doubles).
constexpr double kMaxTableEntries = 268435456.0;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

const json& require(const json& doc, const std::string& key, const std::string& where) {
  if (!doc.is_object()) fail(where, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) fail(where.empty() ? key : where + "." + key, "missing key");
  return *it;
}

std::vector<std::string> read_names(const json& doc, const std::string& key) {
  const json& arr = require(doc, key, "");
  if (!arr.is_array() || arr.empty()) fail(key, "expected a non-empty array of names");
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) {
      fail(key + "[" + std::to_string(i) + "]", "expected a string");
    }
    auto name = arr[i].get<std::string>();
    if (!seen.insert(name).second) fail(key, "duplicate name '" + name + "'");
    names.push_back(std::move(name));
  }
  return names;
}

double read_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "non-finite value");
  return x;
}

// Checks a probability row and renormalizes when it is off by more than
// rounding noise but within `tolerance`.
void check_row(std::span<double> row, double tolerance, const std::string& where) {
  double sum = 0.0;
  for (double p : row) {
    if (p < 0.0 || p > 1.0) fail(where, "probability outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    fail(where, "row sums to " + std::to_string(sum) + ", expected 1");
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& p : row) p /= sum;
  }
}

Table read_matrix(const json& v, std::size_t rows, std::size_t cols, const std::string& where) {
  Table table(rows, cols);
  if (!v.is_array()) fail(where, "expected an array");
  if (v.size() == rows * cols && (v.empty() || v[0].is_number())) {
    // flat row-major list
    for (std::size_t i = 0; i < rows * cols; ++i) {
      table(i / cols, i % cols) = read_number(v[i], where + "[" + std::to_string(i) + "]");
    }
    return table;
  }
  if (v.size() != rows) {
    fail(where, "expected " + std::to_string(rows) + " rows, got " + std::to_string(v.size()));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!v[r].is_array() || v[r].size() != cols) {
      fail(row_where, "expected a row of length " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      table(r, c) = read_number(v[r][c], row_where + "[" + std::to_string(c) + "]");
    }
  }
  return table;
}

struct Cpt {
  std::vector<std::size_t> parents;
  std::vector<double> p_true;  // indexed by parent instantiation bits
};

Table compile_cpts(const json& doc, const std::vector<std::string>& variables,
                   const std::string& where) {
  if (!doc.is_object()) fail(where, "expected an object keyed by variable name");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < variables.size(); ++i) index[variables[i]] = i;

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!index.count(it.key())) fail(where + "." + it.key(), "undeclared variable");
  }

  const std::size_t n = variables.size();
  std::vector<Cpt> cpts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string var_where = where + "." + variables[i];
    auto it = doc.find(variables[i]);
    if (it == doc.end()) fail(var_where, "missing CPT");
    const json& parents = require(*it, "parents", var_where);
    if (!parents.is_array()) fail(var_where + ".parents", "expected an array");
    std::set<std::size_t> seen;
    for (const auto& p : parents) {
      if (!p.is_string()) fail(var_where + ".parents", "expected variable names");
      auto found = index.find(p.get<std::string>());
      if (found == index.end()) {
        fail(var_where + ".parents", "undeclared parent '" + p.get<std::string>() + "'");
      }
      if (!seen.insert(found->second).second) {
        fail(var_where + ".parents", "duplicate parent '" + p.get<std::string>() + "'");
      }
      cpts[i].parents.push_back(found->second);
    }
    const std::size_t num_rows = std::size_t{1} << cpts[i].parents.size();
    Table rows = read_matrix(require(*it, "rows", var_where), num_rows, 2, var_where + ".rows");
    for (std::size_t r = 0; r < num_rows; ++r) {
      check_row(rows.row(r), kSpecTolerance, var_where + ".rows[" + std::to_string(r) + "]");
      cpts[i].p_true.push_back(rows(r, 1));
    }
  }

  const std::size_t states = std::size_t{1} << n;
  Table table(states, states);
  for (std::size_t s = 0; s < states; ++s) {
    std::vector<double> p_true(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t config = 0;
      for (std::size_t k = 0; k < cpts[i].parents.size(); ++k) {
        if ((s >> cpts[i].parents[k]) & 1U) config |= std::size_t{1} << k;
      }
      p_true[i] = cpts[i].p_true[config];
    }
    for (std::size_t next = 0; next < states; ++next) {
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        p *= ((next >> i) & 1U) ? p_true[i] : 1.0 - p_true[i];
      }
      table(s, next) = p;
    }
  }
  return table;
}

void validate_stochastic(const Table& table, const std::string& where) {
  for (std::size_t r = 0; r < table.rows(); ++r) {
    double sum = 0.0;
    for (double p : table.row(r)) {
      if (!(p >= 0.0 && p <= 1.0)) fail(where, "probability outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance) {
      fail(where + "[" + std::to_string(r) + "]", "row does not sum to 1");
    }
  }
}

}  // namespace

void Pomdp::validate() const {
  const std::size_t n = num_variables();
  if (n == 0 || n > kMaxVariables) fail("variables", "expected 1.." + std::to_string(kMaxVariables));
  if (actions.empty()) fail("actions", "empty");
  if (observations.empty()) fail("observations", "empty");
  const std::size_t states = num_states();
  if (transition.size() != actions.size() || observation.size() != actions.size()) {
    fail("model", "one transition and one observation table per action required");
  }
  for (std::size_t a = 0; a < actions.size(); ++a) {
    if (transition[a].rows() != states || transition[a].cols() != states) {
      fail("transitions." + actions[a], "wrong shape");
    }
    if (observation[a].rows() != states || observation[a].cols() != observations.size()) {
      fail("observation." + actions[a], "wrong shape");
    }
    validate_stochastic(transition[a], "transitions." + actions[a]);
    validate_stochastic(observation[a], "observation." + actions[a]);
  }
  if (reward.size() != states) fail("reward", "expected one entry per state");
  for (double r : reward) {
    if (!std::isfinite(r)) fail("reward", "non-finite value");
  }
  if (!(discount > 0.0 && discount <= 1.0)) fail("discount", "expected a value in (0,1]");
}

BeliefState::BeliefState(Vec probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InputError("belief: empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw InputError("belief: negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError("belief: entries do not sum to 1");
}

BeliefState BeliefState::point_mass(std::size_t dim, std::size_t state) {
  Vec probs(dim, 0.0);
  probs.at(state) = 1.0;
  return BeliefState(std::move(probs));
}

BeliefState BeliefState::uniform(std::size_t dim) {
  return BeliefState(Vec(dim, 1.0 / static_cast<double>(dim)));
}

Pomdp compile_model(const json& doc) {
  if (!doc.is_object()) throw InputError("model: expected a JSON object");
  Pomdp model;
  model.variables = read_names(doc, "variables");
  if (model.variables.size() > kMaxVariables) {
    fail("variables", "at most " + std::to_string(kMaxVariables) + " variables supported");
  }
  model.actions = read_names(doc, "actions");
  model.observations = read_names(doc, "observations");

  const std::size_t states = model.num_states();
  const double entries = static_cast<double>(states) * static_cast<double>(states) *
                         static_cast<double>(model.num_actions());
  if (entries > kMaxTableEntries) {
    throw GuardError("model: dense transition tables would need " +
                     std::to_string(entries) + " entries");
  }

  const json& transitions = require(doc, "transitions", "");
  const json& observation = require(doc, "observation", "");
  for (const auto& action : model.actions) {
    const std::string t_where = "transitions." + action;
    const json& t = require(transitions, action, "transitions");
    const bool has_flat = t.is_object() && t.contains("flat");
    const bool has_cpts = t.is_object() && t.contains("cpts");
    if (has_flat == has_cpts) fail(t_where, "expected exactly one of 'flat' or 'cpts'");
    if (has_flat) {
      Table table = read_matrix(t["flat"], states, states, t_where + ".flat");
      for (std::size_t r = 0; r < states; ++r) {
        check_row(table.row(r), kSpecTolerance, t_where + ".flat[" + std::to_string(r) + "]");
      }
      model.transition.push_back(std::move(table));
    } else {
      model.transition.push_back(compile_cpts(t["cpts"], model.variables, t_where + ".cpts"));
    }

    const std::string o_where = "observation." + action;
    Table obs = read_matrix(require(observation, action, "observation"), states,
                            model.num_observations(), o_where);
    for (std::size_t r = 0; r < states; ++r) {
      check_row(obs.row(r), kSpecTolerance, o_where + "[" + std::to_string(r) + "]");
    }
    model.observation.push_back(std::move(obs));
  }
  for (auto it = transitions.begin(); it != transitions.end(); ++it) {
    if (std::find(model.actions.begin(), model.actions.end(), it.key()) == model.actions.end()) {
      fail("transitions." + it.key(), "undeclared action");
    }
  }

  const json& reward = require(doc, "reward", "");
  if (!reward.is_array() || reward.size() != states) {
    fail("reward", "expected an array of length " + std::to_string(states));
  }
  for (std::size_t s = 0; s < states; ++s) {
    model.reward.push_back(read_number(reward[s], "reward[" + std::to_string(s) + "]"));
  }
  model.discount = read_number(require(doc, "discount", ""), "discount");
  model.validate();
  return model;
}

Vec predict(const Pomdp& model, std::span<const double> belief, std::size_t action) {
  const Table& t = model.transition.at(action);
  Vec out(model.num_states(), 0.0);
  for (std::size_t s = 0; s < t.rows(); ++s) {
    const double p = belief[s];
    if (p == 0.0) continue;
    auto row = t.row(s);
    for (std::size_t next = 0; next < row.size(); ++next) out[next] += p * row[next];
  }
  return out;
}

double observation_probability(const Pomdp& model, std::span<const double> predicted,
                               std::size_t action, std::size_t obs) {
  const Table& o = model.observation.at(action);
  double sum = 0.0;
  for (std::size_t s = 0; s < predicted.size(); ++s) sum += predicted[s] * o(s, obs);
  return sum;
}

BeliefState belief_update(const Pomdp& model, const BeliefState& b, std::size_t action,
                          std::size_t obs) {
  if (action >= model.num_actions()) throw InputError("belief_update: unknown action");
  if (obs >= model.num_observations()) throw InputError("belief_update: unknown observation");
  if (b.size() != model.num_states()) throw InputError("belief_update: dimension mismatch");
  Vec next = predict(model, b.probs(), action);
  const Table& o = model.observation[action];
  double norm = 0.0;
  for (std::size_t s = 0; s < next.size(); ++s) {
    next[s] *= o(s, obs);
    norm += next[s];
  }
  if (norm < kZeroProbability) {
    throw ZeroProbabilityObservation("observation '" + model.observations[obs] +
                                     "' is impossible after action '" +
                                     model.actions[action] + "'");
  }
  for (double& p : next) p /= norm;
  return BeliefState(std::move(next));
}

ValueChoice value_of(std::span<const double> belief, const AlphaSet& set) {
  if (set.empty()) throw InputError("value_of: empty alpha set");
  ValueChoice best;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vec& values = set.vectors[i].values;
    if (values.size() != belief.size()) throw InputError("value_of: dimension mismatch");
    const double v = dot(belief, values);
    if (i == 0 || v > best.value) best = {v, i};
  }
  return best;
}

}  // namespace beliefvs
