#include "procplan/views.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace procplan {

namespace {

ViewError unknown_subject(std::string message) {
  return ViewError{std::string(kUnknownViewSubject), std::move(message)};
}

std::vector<ArtifactSummary> results_of(const ProcessModel& model, const Milestone& milestone) {
  std::vector<ArtifactSummary> out;
  for (const auto& result : model.results(milestone)) {
    out.push_back({milestone.name, result.name, result.description});
  }
  return out;
}

ViewEntry make_entry(const ProcessModel& model, const Milestone& milestone,
                     std::optional<ResponsibilityKind> access = {}) {
  return ViewEntry{milestone.id,          milestone.name, milestone.position,
                   milestone.span,        milestone.description, access,
                   results_of(model, milestone)};
}

// Sorts entries by timeline position, ties broken by document order.
void order_entries(const ProcessModel& model, std::vector<ViewEntry>& entries) {
  std::unordered_map<NodeId, std::size_t> doc_index;
  auto ids = model.milestone_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) doc_index.emplace(ids[i], i);
  std::stable_sort(entries.begin(), entries.end(), [&](const ViewEntry& a, const ViewEntry& b) {
    return std::pair(a.position, doc_index.at(a.milestone)) <
           std::pair(b.position, doc_index.at(b.milestone));
  });
}

const std::string* param(const std::map<std::string, std::string>& params,
                         const std::string& key) {
  auto it = params.find(key);
  return it == params.end() ? nullptr : &it->second;
}

}  // namespace

std::string_view to_string(ViewKind kind) {
  switch (kind) {
    case ViewKind::kScopePlan: return "scope-plan";
    case ViewKind::kMilestoneList: return "milestone-list";
    case ViewKind::kMilestoneIO: return "milestone-io";
    case ViewKind::kLayerInvolvement: return "layer-involvement";
  }
  return "milestone-list";
}

std::optional<ViewKind> view_kind_from_string(std::string_view text) {
  for (ViewKind kind : {ViewKind::kScopePlan, ViewKind::kMilestoneList, ViewKind::kMilestoneIO,
                        ViewKind::kLayerInvolvement}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

Expected<ViewModel, ViewError> scope_plan(const ResolvedModel& resolved, std::string_view layer,
                                          std::string_view scope_name) {
  const ProcessModel& model = resolved.model;
  const Scope* scope = find_scope(model, layer, scope_name);
  if (!scope) {
    return Unexpected{unknown_subject("no scope '" + std::string(scope_name) + "' in layer '" +
                                      std::string(layer) + "'")};
  }
  ViewModel view;
  view.kind = ViewKind::kScopePlan;
  view.subject = {{"layer", std::string(layer)}, {"scope", std::string(scope_name)}};
  for (const auto& resp : model.responsibilities(*scope)) {
    const auto& milestone = model.get<Milestone>(resolved.edges.at(resp.id));
    view.entries.push_back(make_entry(model, milestone, resp.kind));
  }
  order_entries(model, view.entries);
  return view;
}

ViewModel milestone_list(const ResolvedModel& resolved) {
  const ProcessModel& model = resolved.model;
  ViewModel view;
  view.kind = ViewKind::kMilestoneList;
  for (const auto& milestone : model.milestones()) {
    view.entries.push_back(make_entry(model, milestone));
  }
  order_entries(model, view.entries);
  return view;
}

Expected<ViewModel, ViewError> milestone_io(const ResolvedModel& resolved,
                                            std::string_view milestone_name) {
  const ProcessModel& model = resolved.model;
  auto matches = milestones_by_name(model, milestone_name);
  if (matches.size() != 1) {
    return Unexpected{unknown_subject("no unique milestone '" + std::string(milestone_name) + "'")};
  }
  const Milestone& subject = *matches.front();

  std::unordered_map<NodeId, NodeId> owning_scope;  // responsibility -> scope
  for (const auto& scope : model.scopes()) {
    for (NodeId resp : scope.responsibilities) owning_scope.emplace(resp, scope.id);
  }
  auto scopes_referencing = [&](NodeId milestone) {
    std::unordered_set<NodeId> scopes;
    for (NodeId resp : resolved.referrers(milestone)) scopes.insert(owning_scope.at(resp));
    return scopes;
  };

  ViewModel view;
  view.kind = ViewKind::kMilestoneIO;
  view.subject = {{"milestone", subject.name}};
  view.outputs = results_of(model, subject);

  std::unordered_set<NodeId> subject_scopes = scopes_referencing(subject.id);
  for (const auto& other : model.milestones()) {
    if (other.id == subject.id || other.position >= subject.position) continue;
    auto other_scopes = scopes_referencing(other.id);
    bool shares = std::any_of(other_scopes.begin(), other_scopes.end(),
                              [&](NodeId s) { return subject_scopes.contains(s); });
    if (shares) view.entries.push_back(make_entry(model, other));
  }
  view.entries.push_back(make_entry(model, subject));
  order_entries(model, view.entries);
  for (const auto& entry : view.entries) {
    if (entry.milestone == subject.id) continue;
    view.inputs.insert(view.inputs.end(), entry.results.begin(), entry.results.end());
  }
  return view;
}

Expected<ViewModel, ViewError> layer_involvement(const ResolvedModel& resolved,
                                                 std::string_view layer) {
  const ProcessModel& model = resolved.model;
  if (!find_layer(model, layer)) {
    return Unexpected{unknown_subject("no layer '" + std::string(layer) + "'")};
  }
  std::unordered_map<NodeId, ResponsibilityKind> access;
  for (const auto& scope : model.scopes()) {
    if (scope.layer_name != layer) continue;
    for (const auto& resp : model.responsibilities(scope)) {
      NodeId milestone = resolved.edges.at(resp.id);
      auto [it, inserted] = access.emplace(milestone, resp.kind);
      if (!inserted && strength(resp.kind) > strength(it->second)) it->second = resp.kind;
    }
  }
  ViewModel view;
  view.kind = ViewKind::kLayerInvolvement;
  view.subject = {{"layer", std::string(layer)}};
  for (const auto& milestone : model.milestones()) {
    auto it = access.find(milestone.id);
    if (it != access.end()) view.entries.push_back(make_entry(model, milestone, it->second));
  }
  order_entries(model, view.entries);
  return view;
}

Expected<ViewModel, ViewError> compute_view(const ResolvedModel& resolved, ViewKind kind,
                                            const std::map<std::string, std::string>& params) {
  auto require = [&](const std::string& key) -> const std::string* { return param(params, key); };
  switch (kind) {
    case ViewKind::kMilestoneList:
      return milestone_list(resolved);
    case ViewKind::kScopePlan: {
      const auto* layer = require("layer");
      const auto* scope = require("scope");
      if (!layer || !scope) return Unexpected{unknown_subject("scope-plan needs layer and scope")};
      return scope_plan(resolved, *layer, *scope);
    }
    case ViewKind::kMilestoneIO: {
      const auto* milestone = require("milestone");
      if (!milestone) return Unexpected{unknown_subject("milestone-io needs a milestone")};
      return milestone_io(resolved, *milestone);
    }
    case ViewKind::kLayerInvolvement: {
      const auto* layer = require("layer");
      if (!layer) return Unexpected{unknown_subject("layer-involvement needs a layer")};
      return layer_involvement(resolved, *layer);
    }
  }
  return milestone_list(resolved);
}

}  // namespace procplan
