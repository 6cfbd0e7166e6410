#pragma once

// Layout-free projections of a resolved model, one per organizational view.
// Views are computed on demand from the model and never cached, so every
// view reflects the current state of every milestone.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "procplan/expected.hpp"
#include "procplan/resolve.hpp"

namespace procplan {

enum class ViewKind { kScopePlan, kMilestoneList, kMilestoneIO, kLayerInvolvement };

// scope-plan, milestone-list, milestone-io, layer-involvement
std::string_view to_string(ViewKind kind);
std::optional<ViewKind> view_kind_from_string(std::string_view text);

struct ArtifactSummary {
  std::string milestone;
  std::string name;
  std::string description;
  friend bool operator==(const ArtifactSummary&, const ArtifactSummary&) = default;
};

struct ViewEntry {
  NodeId milestone;
  std::string name;
  Position position = 0;
  std::optional<Span> span;
  std::string description;
  std::optional<ResponsibilityKind> access;  // scope-plan and layer-involvement only
  std::vector<ArtifactSummary> results;
  friend bool operator==(const ViewEntry&, const ViewEntry&) = default;
};

struct ViewModel {
  ViewKind kind = ViewKind::kMilestoneList;
  // Keys among "layer", "scope", "milestone".
  std::map<std::string, std::string> subject;
  // Ordered by position, ties by document order.
  std::vector<ViewEntry> entries;
  // milestone-io only.
  std::vector<ArtifactSummary> inputs;
  std::vector<ArtifactSummary> outputs;
  friend bool operator==(const ViewModel&, const ViewModel&) = default;
};

struct ViewError {
  std::string code;  // UNKNOWN_VIEW_SUBJECT
  std::string message;
};

inline constexpr std::string_view kUnknownViewSubject = "UNKNOWN_VIEW_SUBJECT";

using ViewResult = Expected<ViewModel, ViewError>;

Expected<ViewModel, ViewError> scope_plan(const ResolvedModel& resolved, std::string_view layer,
                                          std::string_view scope);
ViewModel milestone_list(const ResolvedModel& resolved);
// Outputs are the milestone's own results. Inputs are the results of every
// milestone with a strictly smaller position that is referenced by at least
// one scope also referencing the subject.
Expected<ViewModel, ViewError> milestone_io(const ResolvedModel& resolved,
                                            std::string_view milestone);
// One entry per milestone referenced by any scope of the layer, carrying the
// strongest access among those scopes.
Expected<ViewModel, ViewError> layer_involvement(const ResolvedModel& resolved,
                                                 std::string_view layer);

// Dispatch by kind; `params` supplies layer / scope / milestone as needed.
Expected<ViewModel, ViewError> compute_view(const ResolvedModel& resolved, ViewKind kind,
                                            const std::map<std::string, std::string>& params);

nlohmann::json to_json(const ViewModel& view);

}  // namespace procplan
