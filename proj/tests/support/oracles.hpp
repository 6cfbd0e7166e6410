#pragma once

// Naive re-implementations used as independent oracles. They work on the
// id-free ModelDecl tree and share no code with the library's resolver,
// validator or views.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "procplan/diagnostic.hpp"
#include "procplan/model.hpp"
#include "procplan/views.hpp"

namespace procplan::testing {

// A finding keyed by document location: "T" (timeline), "M<i>" (milestone
// i), "S<i>" (scope i) or "S<i>R<j>" (responsibility j of scope i).
using Finding = std::pair<std::string, std::string>;  // (code, location key)

// Resolution followed, when it succeeds, by every semantic rule.
std::set<Finding> naive_check(const ModelDecl& model);

// Same keys, computed from diagnostics the library reported for `model`.
std::set<Finding> findings_of(const ProcessModel& model, const std::vector<Diagnostic>& diags);

// Count of registry nodes by walking the declaration tree.
std::size_t count_nodes(const ModelDecl& model);

struct OracleEntry {
  std::string milestone;
  std::optional<ResponsibilityKind> access;
  friend bool operator==(const OracleEntry&, const OracleEntry&) = default;
};

// Entries ordered by (position, document index).
std::vector<OracleEntry> naive_scope_plan(const ModelDecl& model, const std::string& layer,
                                          const std::string& scope);
std::vector<OracleEntry> naive_layer_involvement(const ModelDecl& model, const std::string& layer);
// Input artifacts as (milestone, artifact) pairs, ordered like the view.
std::vector<std::pair<std::string, std::string>> naive_milestone_inputs(
    const ModelDecl& model, const std::string& milestone);

std::vector<OracleEntry> entries_of(const ViewModel& view);

}  // namespace procplan::testing
