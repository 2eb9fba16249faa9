#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "beliefvs/alpha.hpp"
#include "beliefvs/bounds.hpp"
#include "beliefvs/eval.hpp"
#include "beliefvs/model.hpp"
#include "beliefvs/projection.hpp"
#include "beliefvs/search.hpp"

namespace beliefvs {

using nlohmann::json;

// Canonical text form: two-space indent, trailing newline. Doubles print in
// shortest round-trip form so parse/dump cycles are byte-stable.
std::string dump(const json& doc);

// Throws InputError naming the file and the parser's line/column.
json read_json_file(const std::filesystem::path& path);
json parse_json(const std::string& text, const std::string& source = "<string>");
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Dense "flat" tables; compile_model reads the result back unchanged.
json model_to_json(const Pomdp& model);

struct Policy {
  Pomdp model;
  std::vector<AlphaSet> stages;  // stages[k-1] is stage k
};

json policy_to_json(const Pomdp& model, const std::vector<AlphaSet>& stages);
Policy parse_policy(const json& doc);

// A scheme is a list of blocks, each a list of variable names.
json scheme_to_json(const ProjectionScheme& scheme, const std::vector<std::string>& variables);
ProjectionScheme parse_scheme(const json& doc, const std::vector<std::string>& variables);

json assignment_to_json(const SchemeAssignment& schemes, const std::vector<std::string>& variables);
SchemeAssignment parse_assignment(const json& doc, const std::vector<std::string>& variables);

json search_result_to_json(const SearchResult& result, const std::vector<std::string>& variables);
SearchResult parse_search_result(const json& doc, const std::vector<std::string>& variables);

json bounds_report_to_json(const BoundsReport& report, const std::vector<std::string>& variables);

json eval_report_to_json(const EvalReport& report);
// Header method,mode,average_loss,B,E,seconds; E is empty when unavailable.
std::string eval_csv(const std::vector<EvalReport>& reports);

}  // namespace beliefvs
