#include "procplan/resolve.hpp"

#include <string>
#include <unordered_map>

namespace procplan {

std::span<const NodeId> ResolvedModel::referrers(NodeId milestone) const {
  auto it = reverse_edges.find(milestone);
  if (it == reverse_edges.end()) return {};
  return it->second;
}

ResolveResult resolve(ProcessModel model) {
  ResolveResult result;
  std::unordered_map<std::string_view, NodeId> by_name;

  for (const auto& milestone : model.milestones()) {
    auto [it, inserted] = by_name.emplace(milestone.name, milestone.id);
    if (!inserted) {
      Diagnostic d = make_error(codes::kDupMilestone,
                                "milestone '" + milestone.name + "' is declared more than once");
      d.node = milestone.id;
      d.loc = model.origin(milestone.id);
      result.diagnostics.push_back(std::move(d));
    }
  }

  ResolvedModel resolved;
  for (const auto& scope : model.scopes()) {
    for (const auto& resp : model.responsibilities(scope)) {
      auto it = by_name.find(resp.as_milestone);
      if (it == by_name.end()) {
        Diagnostic d = make_error(codes::kDanglingRef, "scope '" + scope.name +
                                                           "' references unknown milestone '" +
                                                           resp.as_milestone + "'");
        d.node = resp.id;
        d.loc = model.origin(resp.id);
        result.diagnostics.push_back(std::move(d));
        continue;
      }
      resolved.edges.emplace(resp.id, it->second);
      resolved.reverse_edges[it->second].push_back(resp.id);
    }
  }

  if (result.diagnostics.empty()) {
    resolved.model = std::move(model);
    result.resolved = std::move(resolved);
  }
  return result;
}

}  // namespace procplan
