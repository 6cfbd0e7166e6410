#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "procplan/diagnostic.hpp"
#include "procplan/model.hpp"

namespace procplan {

// A model whose responsibility -> milestone references are bound to nodes.
struct ResolvedModel {
  ProcessModel model;
  std::unordered_map<NodeId, NodeId> edges;                       // responsibility -> milestone
  std::unordered_map<NodeId, std::vector<NodeId>> reverse_edges;  // milestone -> responsibilities

  // Responsibilities referencing `milestone`, in document order.
  std::span<const NodeId> referrers(NodeId milestone) const;
};

struct ResolveResult {
  std::optional<ResolvedModel> resolved;
  std::vector<Diagnostic> diagnostics;
};

// Binds every responsibility to the unique milestone of that name. Fails with
// DUP_MILESTONE when a name is declared twice and DANGLING_REF when a
// reference names no milestone.
ResolveResult resolve(ProcessModel model);

}  // namespace procplan
