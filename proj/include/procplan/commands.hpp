#pragma once

// Reversible edit commands and undo/redo history.
//
// Commands address nodes by name: milestones by name, layers by name, scopes
// by (layer, scope name), results by (milestone, artifact name) and
// responsibilities by (layer, scope, milestone). When a name is declared more
// than once the first match in document order is used. NodeIds are not part
// of the command vocabulary, so undo restores the document text but may hand
// out fresh ids for re-created nodes.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "procplan/expected.hpp"
#include "procplan/model.hpp"

namespace procplan {

enum class TargetKind { kLayer, kMilestone, kResult, kScope };

// Target of SetDescription. Only the fields relevant to `kind` are read.
struct NodeRef {
  TargetKind kind = TargetKind::kMilestone;
  std::string layer;
  std::string scope;
  std::string milestone;
  std::string artifact;
  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

namespace cmd {

struct AddLayer {
  LayerDecl layer;
  std::optional<std::size_t> index;
  friend bool operator==(const AddLayer&, const AddLayer&) = default;
};

// Refused while any scope belongs to the layer.
struct RemoveLayer {
  std::string name;
  friend bool operator==(const RemoveLayer&, const RemoveLayer&) = default;
};

struct AddMilestone {
  MilestoneDecl milestone;
  std::optional<std::size_t> index;
  friend bool operator==(const AddMilestone&, const AddMilestone&) = default;
};

// Without cascade the command is refused while responsibilities reference
// the milestone; with cascade those responsibilities are removed too.
struct RemoveMilestone {
  std::string name;
  bool cascade = false;
  friend bool operator==(const RemoveMilestone&, const RemoveMilestone&) = default;
};

struct MoveMilestone {
  std::string name;
  Position position = 0;
  friend bool operator==(const MoveMilestone&, const MoveMilestone&) = default;
};

struct SetDescription {
  NodeRef target;
  std::string description;
  friend bool operator==(const SetDescription&, const SetDescription&) = default;
};

struct SetSpan {
  std::string milestone;
  std::optional<Span> span;
  friend bool operator==(const SetSpan&, const SetSpan&) = default;
};

struct AddResult {
  std::string milestone;
  ResultDecl result;
  std::optional<std::size_t> index;
  friend bool operator==(const AddResult&, const AddResult&) = default;
};

struct RemoveResult {
  std::string milestone;
  std::string name;
  friend bool operator==(const RemoveResult&, const RemoveResult&) = default;
};

struct AddScope {
  ScopeDecl scope;
  std::optional<std::size_t> index;
  friend bool operator==(const AddScope&, const AddScope&) = default;
};

struct RemoveScope {
  std::string layer;
  std::string name;
  friend bool operator==(const RemoveScope&, const RemoveScope&) = default;
};

// `scope_index`, when set, pins the scope by its position in the document
// (used by generated inverses so duplicate scope names restore exactly).
struct AddResponsibility {
  std::string layer;
  std::string scope;
  ResponsibilityDecl responsibility;
  std::optional<std::size_t> index;
  std::optional<std::size_t> scope_index;
  friend bool operator==(const AddResponsibility&, const AddResponsibility&) = default;
};

struct RemoveResponsibility {
  std::string layer;
  std::string scope;
  std::string milestone;
  std::optional<std::size_t> scope_index;
  friend bool operator==(const RemoveResponsibility&, const RemoveResponsibility&) = default;
};

struct SetResponsibilityKind {
  std::string layer;
  std::string scope;
  std::string milestone;
  ResponsibilityKind kind = ResponsibilityKind::kResponsible;
  friend bool operator==(const SetResponsibilityKind&, const SetResponsibilityKind&) = default;
};

// Also rewrites every responsibility that references the old name.
struct RenameMilestone {
  std::string from;
  std::string to;
  friend bool operator==(const RenameMilestone&, const RenameMilestone&) = default;
};

}  // namespace cmd

using Command =
    std::variant<cmd::AddLayer, cmd::RemoveLayer, cmd::AddMilestone, cmd::RemoveMilestone,
                 cmd::MoveMilestone, cmd::SetDescription, cmd::SetSpan, cmd::AddResult,
                 cmd::RemoveResult, cmd::AddScope, cmd::RemoveScope, cmd::AddResponsibility,
                 cmd::RemoveResponsibility, cmd::SetResponsibilityKind, cmd::RenameMilestone>;

std::string_view command_name(const Command& command);

namespace cmd_codes {
inline constexpr std::string_view kTargetMissing = "CMD_TARGET_MISSING";
inline constexpr std::string_view kConflict = "CMD_CONFLICT";
inline constexpr std::string_view kInvalidArg = "CMD_INVALID_ARG";
inline constexpr std::string_view kNothingToUndo = "CMD_NOTHING_TO_UNDO";
inline constexpr std::string_view kNothingToRedo = "CMD_NOTHING_TO_REDO";
inline constexpr std::string_view kBatchFailed = "CMD_BATCH_FAILED";
}  // namespace cmd_codes

struct CommandError {
  std::string code;
  std::string message;
  // CMD_BATCH_FAILED only: position of the failing command and its own code.
  std::optional<std::size_t> index;
  std::string cause;
};

struct HistoryEntry {
  std::vector<Command> forward;
  std::vector<Command> inverse;
};

class History {
 public:
  std::span<const HistoryEntry> undo_stack() const { return undo_; }
  std::span<const HistoryEntry> redo_stack() const { return redo_; }
  std::uint64_t revision() const { return revision_; }

 private:
  friend std::optional<CommandError> apply(ProcessModel&, History&, const Command&);
  friend std::optional<CommandError> apply_batch(ProcessModel&, History&,
                                                 std::span<const Command>);
  friend std::optional<CommandError> undo(ProcessModel&, History&);
  friend std::optional<CommandError> redo(ProcessModel&, History&);

  std::vector<HistoryEntry> undo_;
  std::vector<HistoryEntry> redo_;
  std::uint64_t revision_ = 0;
};

// All of these leave model and history untouched when they fail.
[[nodiscard]] std::optional<CommandError> apply(ProcessModel& model, History& history,
                                                const Command& command);
// Atomic; a successful non-empty batch occupies one undo slot. An empty batch
// is a no-op.
[[nodiscard]] std::optional<CommandError> apply_batch(ProcessModel& model, History& history,
                                                      std::span<const Command> commands);
[[nodiscard]] std::optional<CommandError> undo(ProcessModel& model, History& history);
[[nodiscard]] std::optional<CommandError> redo(ProcessModel& model, History& history);

// Applies one command without touching any history and returns the commands
// that revert it. Exposed for tooling and tests.
Expected<std::vector<Command>, CommandError> execute(ProcessModel& model, const Command& command);

nlohmann::json to_json(const Command& command);
Expected<Command, CommandError> command_from_json(const nlohmann::json& json);

}  // namespace procplan
