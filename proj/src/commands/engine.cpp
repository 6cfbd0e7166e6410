#include <algorithm>

#include "procplan/commands.hpp"
#include "procplan/syntax.hpp"

namespace procplan {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using Inverse = Expected<std::vector<Command>, CommandError>;

CommandError error(std::string_view code, std::string message) {
  return CommandError{std::string(code), std::move(message), std::nullopt, {}};
}

Unexpected<CommandError> fail(std::string_view code, std::string message) {
  return Unexpected{error(code, std::move(message))};
}

struct Located {
  NodeId id;
  std::size_t index = 0;
};

// Executes one command. In strict mode every precondition of the command
// vocabulary is enforced; generated inverses run non-strict and only require
// their targets to exist, so undo also works on documents that already
// contained errors. Nothing is mutated until all checks have passed.
class Executor {
 public:
  Executor(ProcessModel& model, bool strict) : model_(model), strict_(strict) {}

  Inverse run(const Command& command) {
    return std::visit([this](const auto& c) { return exec(c); }, command);
  }

 private:
  std::optional<Located> milestone(std::string_view name) const {
    auto ids = model_.milestone_ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (model_.get<Milestone>(ids[i]).name == name) return Located{ids[i], i};
    }
    return std::nullopt;
  }

  std::optional<Located> layer(std::string_view name) const {
    auto ids = model_.layer_ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (model_.get<Layer>(ids[i]).name == name) return Located{ids[i], i};
    }
    return std::nullopt;
  }

  std::optional<Located> scope(std::string_view layer_name, std::string_view name,
                               std::optional<std::size_t> pinned = {}) const {
    auto ids = model_.scope_ids();
    auto matches = [&](std::size_t i) {
      const auto& s = model_.get<Scope>(ids[i]);
      return s.layer_name == layer_name && s.name == name;
    };
    if (pinned) {
      if (*pinned < ids.size() && matches(*pinned)) return Located{ids[*pinned], *pinned};
      return std::nullopt;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (matches(i)) return Located{ids[i], i};
    }
    return std::nullopt;
  }

  std::optional<Located> responsibility(const Scope& s, std::string_view milestone_name) const {
    for (std::size_t i = 0; i < s.responsibilities.size(); ++i) {
      if (model_.get<Responsibility>(s.responsibilities[i]).as_milestone == milestone_name) {
        return Located{s.responsibilities[i], i};
      }
    }
    return std::nullopt;
  }

  std::optional<Located> result(const Milestone& m, std::string_view name) const {
    for (std::size_t i = 0; i < m.results.size(); ++i) {
      if (model_.get<ResultArtifact>(m.results[i]).name == name) return Located{m.results[i], i};
    }
    return std::nullopt;
  }

  bool referenced(std::string_view milestone_name) const {
    for (const auto& s : model_.scopes()) {
      for (const auto& r : model_.responsibilities(s)) {
        if (r.as_milestone == milestone_name) return true;
      }
    }
    return false;
  }

  static std::optional<CommandError> check_name(std::string_view name, std::string_view what) {
    if (is_identifier(name)) return std::nullopt;
    return error(cmd_codes::kInvalidArg,
                 std::string(what) + " name '" + std::string(name) + "' is not an identifier");
  }

  static std::optional<CommandError> check_text(std::string_view text) {
    if (is_printable_string(text)) return std::nullopt;
    return error(cmd_codes::kInvalidArg, "text must be valid UTF-8 without line breaks");
  }

  static std::optional<CommandError> check_position(Position p) {
    if (p >= 0) return std::nullopt;
    return error(cmd_codes::kInvalidArg, "position " + std::to_string(p) + " is negative");
  }

  static std::optional<CommandError> check_span(const std::optional<Span>& span) {
    if (!span) return std::nullopt;
    if (auto e = check_position(span->start)) return e;
    return check_position(span->end);
  }

  std::optional<CommandError> check_milestone_decl(const MilestoneDecl& decl) const {
    if (auto e = check_name(decl.name, "milestone")) return e;
    if (auto e = check_position(decl.position)) return e;
    if (auto e = check_span(decl.span)) return e;
    if (auto e = check_text(decl.description)) return e;
    for (std::size_t i = 0; i < decl.results.size(); ++i) {
      if (auto e = check_name(decl.results[i].name, "artifact")) return e;
      if (auto e = check_text(decl.results[i].description)) return e;
      for (std::size_t j = 0; j < i; ++j) {
        if (decl.results[j].name == decl.results[i].name) {
          return error(cmd_codes::kConflict, "artifact '" + decl.results[i].name +
                                                 "' appears twice in milestone '" + decl.name +
                                                 "'");
        }
      }
    }
    return std::nullopt;
  }

  static Unexpected<CommandError> missing(std::string what) {
    return fail(cmd_codes::kTargetMissing, std::move(what) + " does not exist");
  }

  static std::string scope_label(std::string_view layer_name, std::string_view name) {
    return "scope '" + std::string(layer_name) + "/" + std::string(name) + "'";
  }

  // --- layers ---------------------------------------------------------------

  Inverse exec(const cmd::AddLayer& c) {
    if (strict_) {
      if (auto e = check_name(c.layer.name, "layer")) return Unexpected{*e};
      if (auto e = check_text(c.layer.description)) return Unexpected{*e};
      if (layer(c.layer.name)) {
        return fail(cmd_codes::kConflict, "layer '" + c.layer.name + "' already exists");
      }
    }
    model_.insert_layer(c.layer, c.index);
    return std::vector<Command>{cmd::RemoveLayer{c.layer.name}};
  }

  Inverse exec(const cmd::RemoveLayer& c) {
    auto found = layer(c.name);
    if (!found) return missing("layer '" + c.name + "'");
    if (strict_) {
      for (const auto& s : model_.scopes()) {
        if (s.layer_name == c.name) {
          return fail(cmd_codes::kConflict,
                      "layer '" + c.name + "' still has scope '" + s.name + "'");
        }
      }
    }
    const auto& l = model_.get<Layer>(found->id);
    std::vector<Command> inverse{cmd::AddLayer{{l.name, l.description}, found->index}};
    model_.erase_layer(found->id);
    return inverse;
  }

  // --- milestones -----------------------------------------------------------

  Inverse exec(const cmd::AddMilestone& c) {
    if (strict_) {
      if (auto e = check_milestone_decl(c.milestone)) return Unexpected{*e};
      if (milestone(c.milestone.name)) {
        return fail(cmd_codes::kConflict, "milestone '" + c.milestone.name + "' already exists");
      }
    }
    model_.insert_milestone(c.milestone, c.index);
    return std::vector<Command>{cmd::RemoveMilestone{c.milestone.name, false}};
  }

  Inverse exec(const cmd::RemoveMilestone& c) {
    auto found = milestone(c.name);
    if (!found) return missing("milestone '" + c.name + "'");
    if (strict_ && !c.cascade && referenced(c.name)) {
      return fail(cmd_codes::kConflict,
                  "milestone '" + c.name + "' is still referenced by responsibilities");
    }

    const auto& m = model_.get<Milestone>(found->id);
    std::vector<Command> inverse{cmd::AddMilestone{to_decl(model_, m), found->index}};

    // Collect referencing responsibilities in document order before erasing.
    struct Doomed {
      NodeId scope;
      NodeId resp;
    };
    std::vector<Doomed> doomed;
    if (c.cascade) {
      auto scope_ids = model_.scope_ids();
      for (std::size_t si = 0; si < scope_ids.size(); ++si) {
        const auto& s = model_.get<Scope>(scope_ids[si]);
        for (std::size_t ri = 0; ri < s.responsibilities.size(); ++ri) {
          const auto& r = model_.get<Responsibility>(s.responsibilities[ri]);
          if (r.as_milestone != c.name) continue;
          inverse.push_back(cmd::AddResponsibility{s.layer_name, s.name, {r.kind, r.as_milestone},
                                                   ri, si});
          doomed.push_back({s.id, r.id});
        }
      }
    }
    for (const auto& d : doomed) model_.erase_responsibility(d.scope, d.resp);
    model_.erase_milestone(found->id);
    return inverse;
  }

  Inverse exec(const cmd::MoveMilestone& c) {
    auto found = milestone(c.name);
    if (!found) return missing("milestone '" + c.name + "'");
    if (strict_) {
      if (auto e = check_position(c.position)) return Unexpected{*e};
    }
    auto& m = model_.get_mut<Milestone>(found->id);
    std::vector<Command> inverse{cmd::MoveMilestone{c.name, m.position}};
    m.position = c.position;
    return inverse;
  }

  Inverse exec(const cmd::SetSpan& c) {
    auto found = milestone(c.milestone);
    if (!found) return missing("milestone '" + c.milestone + "'");
    if (strict_) {
      if (auto e = check_span(c.span)) return Unexpected{*e};
    }
    auto& m = model_.get_mut<Milestone>(found->id);
    std::vector<Command> inverse{cmd::SetSpan{c.milestone, m.span}};
    m.span = c.span;
    return inverse;
  }

  Inverse exec(const cmd::RenameMilestone& c) {
    auto found = milestone(c.from);
    if (!found) return missing("milestone '" + c.from + "'");
    if (strict_ && c.from != c.to) {
      if (auto e = check_name(c.to, "milestone")) return Unexpected{*e};
      if (milestone(c.to)) {
        return fail(cmd_codes::kConflict, "milestone '" + c.to + "' already exists");
      }
      if (referenced(c.to)) {
        return fail(cmd_codes::kConflict,
                    "responsibilities already reference '" + c.to + "' and would be captured");
      }
    }
    model_.get_mut<Milestone>(found->id).name = c.to;
    for (NodeId scope_id : model_.scope_ids()) {
      for (NodeId resp_id : model_.get<Scope>(scope_id).responsibilities) {
        auto& r = model_.get_mut<Responsibility>(resp_id);
        if (r.as_milestone == c.from) r.as_milestone = c.to;
      }
    }
    return std::vector<Command>{cmd::RenameMilestone{c.to, c.from}};
  }

  // --- results --------------------------------------------------------------

  Inverse exec(const cmd::AddResult& c) {
    auto found = milestone(c.milestone);
    if (!found) return missing("milestone '" + c.milestone + "'");
    if (strict_) {
      if (auto e = check_name(c.result.name, "artifact")) return Unexpected{*e};
      if (auto e = check_text(c.result.description)) return Unexpected{*e};
      if (result(model_.get<Milestone>(found->id), c.result.name)) {
        return fail(cmd_codes::kConflict, "milestone '" + c.milestone +
                                              "' already has artifact '" + c.result.name + "'");
      }
    }
    model_.insert_result(found->id, c.result, c.index);
    return std::vector<Command>{cmd::RemoveResult{c.milestone, c.result.name}};
  }

  Inverse exec(const cmd::RemoveResult& c) {
    auto found = milestone(c.milestone);
    if (!found) return missing("milestone '" + c.milestone + "'");
    auto res = result(model_.get<Milestone>(found->id), c.name);
    if (!res) return missing("artifact '" + c.name + "' of milestone '" + c.milestone + "'");
    const auto& artifact = model_.get<ResultArtifact>(res->id);
    std::vector<Command> inverse{
        cmd::AddResult{c.milestone, {artifact.name, artifact.description}, res->index}};
    model_.erase_result(found->id, res->id);
    return inverse;
  }

  // --- scopes and responsibilities -----------------------------------------

  Inverse exec(const cmd::AddScope& c) {
    const ScopeDecl& decl = c.scope;
    if (strict_) {
      if (auto e = check_name(decl.name, "scope")) return Unexpected{*e};
      if (auto e = check_name(decl.layer_name, "layer")) return Unexpected{*e};
      if (auto e = check_text(decl.description)) return Unexpected{*e};
      if (!layer(decl.layer_name)) return missing("layer '" + decl.layer_name + "'");
      if (scope(decl.layer_name, decl.name)) {
        return fail(cmd_codes::kConflict,
                    scope_label(decl.layer_name, decl.name) + " already exists");
      }
      for (std::size_t i = 0; i < decl.responsibilities.size(); ++i) {
        const auto& target = decl.responsibilities[i].as_milestone;
        if (!milestone(target)) return missing("milestone '" + target + "'");
        for (std::size_t j = 0; j < i; ++j) {
          if (decl.responsibilities[j].as_milestone == target) {
            return fail(cmd_codes::kConflict,
                        "scope lists milestone '" + target + "' more than once");
          }
        }
      }
    }
    model_.insert_scope(decl, c.index);
    return std::vector<Command>{cmd::RemoveScope{decl.layer_name, decl.name}};
  }

  Inverse exec(const cmd::RemoveScope& c) {
    auto found = scope(c.layer, c.name);
    if (!found) return missing(scope_label(c.layer, c.name));
    const auto& s = model_.get<Scope>(found->id);
    std::vector<Command> inverse{cmd::AddScope{to_decl(model_, s), found->index}};
    model_.erase_scope(found->id);
    return inverse;
  }

  Inverse exec(const cmd::AddResponsibility& c) {
    auto found = scope(c.layer, c.scope, c.scope_index);
    if (!found) return missing(scope_label(c.layer, c.scope));
    const auto& target = c.responsibility.as_milestone;
    if (strict_) {
      if (!milestone(target)) return missing("milestone '" + target + "'");
      if (responsibility(model_.get<Scope>(found->id), target)) {
        return fail(cmd_codes::kConflict, scope_label(c.layer, c.scope) +
                                              " already has a responsibility for '" + target +
                                              "'");
      }
    }
    model_.insert_responsibility(found->id, c.responsibility, c.index);
    return std::vector<Command>{
        cmd::RemoveResponsibility{c.layer, c.scope, target, found->index}};
  }

  Inverse exec(const cmd::RemoveResponsibility& c) {
    auto found = scope(c.layer, c.scope, c.scope_index);
    if (!found) return missing(scope_label(c.layer, c.scope));
    auto resp = responsibility(model_.get<Scope>(found->id), c.milestone);
    if (!resp) {
      return missing("responsibility of " + scope_label(c.layer, c.scope) + " for '" +
                     c.milestone + "'");
    }
    const auto& r = model_.get<Responsibility>(resp->id);
    std::vector<Command> inverse{cmd::AddResponsibility{
        c.layer, c.scope, {r.kind, r.as_milestone}, resp->index, found->index}};
    model_.erase_responsibility(found->id, resp->id);
    return inverse;
  }

  Inverse exec(const cmd::SetResponsibilityKind& c) {
    auto found = scope(c.layer, c.scope);
    if (!found) return missing(scope_label(c.layer, c.scope));
    auto resp = responsibility(model_.get<Scope>(found->id), c.milestone);
    if (!resp) {
      return missing("responsibility of " + scope_label(c.layer, c.scope) + " for '" +
                     c.milestone + "'");
    }
    auto& r = model_.get_mut<Responsibility>(resp->id);
    std::vector<Command> inverse{cmd::SetResponsibilityKind{c.layer, c.scope, c.milestone, r.kind}};
    r.kind = c.kind;
    return inverse;
  }

  // --- descriptions ---------------------------------------------------------

  Inverse exec(const cmd::SetDescription& c) {
    if (strict_) {
      if (auto e = check_text(c.description)) return Unexpected{*e};
    }
    std::string* slot = nullptr;
    const NodeRef& t = c.target;
    switch (t.kind) {
      case TargetKind::kLayer: {
        auto found = layer(t.layer);
        if (!found) return missing("layer '" + t.layer + "'");
        slot = &model_.get_mut<Layer>(found->id).description;
        break;
      }
      case TargetKind::kMilestone: {
        auto found = milestone(t.milestone);
        if (!found) return missing("milestone '" + t.milestone + "'");
        slot = &model_.get_mut<Milestone>(found->id).description;
        break;
      }
      case TargetKind::kResult: {
        auto found = milestone(t.milestone);
        if (!found) return missing("milestone '" + t.milestone + "'");
        auto res = result(model_.get<Milestone>(found->id), t.artifact);
        if (!res) return missing("artifact '" + t.artifact + "' of milestone '" + t.milestone + "'");
        slot = &model_.get_mut<ResultArtifact>(res->id).description;
        break;
      }
      case TargetKind::kScope: {
        auto found = scope(t.layer, t.scope);
        if (!found) return missing(scope_label(t.layer, t.scope));
        slot = &model_.get_mut<Scope>(found->id).description;
        break;
      }
    }
    std::vector<Command> inverse{cmd::SetDescription{t, *slot}};
    *slot = c.description;
    return inverse;
  }

  ProcessModel& model_;
  bool strict_;
};

// Runs `commands` in order; on failure the model is restored from a snapshot.
Expected<std::vector<Command>, CommandError> run_all(ProcessModel& model,
                                                     std::span<const Command> commands,
                                                     bool strict, bool batch_errors) {
  std::optional<ProcessModel> snapshot;
  if (commands.size() > 1) snapshot = model;
  std::vector<Command> inverse;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    Inverse step = Executor(model, strict).run(commands[i]);
    if (!step) {
      if (snapshot) model = std::move(*snapshot);
      CommandError err = step.error();
      if (batch_errors) {
        err = CommandError{std::string(cmd_codes::kBatchFailed),
                           "command " + std::to_string(i) + " (" +
                               std::string(command_name(commands[i])) + ") failed: " + err.message,
                           i, err.code};
      }
      return Unexpected{std::move(err)};
    }
    // Inverses run last-to-first.
    auto& cmds = step.value();
    inverse.insert(inverse.begin(), cmds.begin(), cmds.end());
  }
  return inverse;
}

}  // namespace

std::string_view command_name(const Command& command) {
  return std::visit(
      Overloaded{
          [](const cmd::AddLayer&) { return "AddLayer"; },
          [](const cmd::RemoveLayer&) { return "RemoveLayer"; },
          [](const cmd::AddMilestone&) { return "AddMilestone"; },
          [](const cmd::RemoveMilestone&) { return "RemoveMilestone"; },
          [](const cmd::MoveMilestone&) { return "MoveMilestone"; },
          [](const cmd::SetDescription&) { return "SetDescription"; },
          [](const cmd::SetSpan&) { return "SetSpan"; },
          [](const cmd::AddResult&) { return "AddResult"; },
          [](const cmd::RemoveResult&) { return "RemoveResult"; },
          [](const cmd::AddScope&) { return "AddScope"; },
          [](const cmd::RemoveScope&) { return "RemoveScope"; },
          [](const cmd::AddResponsibility&) { return "AddResponsibility"; },
          [](const cmd::RemoveResponsibility&) { return "RemoveResponsibility"; },
          [](const cmd::SetResponsibilityKind&) { return "SetResponsibilityKind"; },
          [](const cmd::RenameMilestone&) { return "RenameMilestone"; },
      },
      command);
}

Expected<std::vector<Command>, CommandError> execute(ProcessModel& model, const Command& command) {
  return Executor(model, true).run(command);
}

std::optional<CommandError> apply(ProcessModel& model, History& history, const Command& command) {
  auto inverse = run_all(model, std::span(&command, 1), true, false);
  if (!inverse) return inverse.error();
  history.undo_.push_back({{command}, std::move(inverse.value())});
  history.redo_.clear();
  ++history.revision_;
  return std::nullopt;
}

std::optional<CommandError> apply_batch(ProcessModel& model, History& history,
                                        std::span<const Command> commands) {
  if (commands.empty()) return std::nullopt;
  auto inverse = run_all(model, commands, true, true);
  if (!inverse) return inverse.error();
  history.undo_.push_back(
      {std::vector<Command>(commands.begin(), commands.end()), std::move(inverse.value())});
  history.redo_.clear();
  ++history.revision_;
  return std::nullopt;
}

std::optional<CommandError> undo(ProcessModel& model, History& history) {
  if (history.undo_.empty()) {
    return error(cmd_codes::kNothingToUndo, "there is nothing to undo");
  }
  HistoryEntry entry = history.undo_.back();
  auto result = run_all(model, entry.inverse, false, false);
  if (!result) return result.error();
  history.undo_.pop_back();
  history.redo_.push_back(std::move(entry));
  ++history.revision_;
  return std::nullopt;
}

std::optional<CommandError> redo(ProcessModel& model, History& history) {
  if (history.redo_.empty()) {
    return error(cmd_codes::kNothingToRedo, "there is nothing to redo");
  }
  HistoryEntry entry = history.redo_.back();
  auto inverse = run_all(model, entry.forward, true, false);
  if (!inverse) return inverse.error();
  entry.inverse = std::move(inverse.value());
  history.redo_.pop_back();
  history.undo_.push_back(std::move(entry));
  ++history.revision_;
  return std::nullopt;
}

}  // namespace procplan
