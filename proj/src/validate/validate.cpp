#include "procplan/validate.hpp"

#include <set>
#include <string>
#include <unordered_set>
#include <utility>

#include "procplan/syntax.hpp"

namespace procplan {

namespace {

class Validator {
 public:
  explicit Validator(const ResolvedModel& resolved)
      : resolved_(resolved), model_(resolved.model) {}

  std::vector<Diagnostic> run() {
    check_timeline();
    for (const auto& milestone : model_.milestones()) check_milestone(milestone);
    std::set<std::pair<std::string_view, std::string_view>> seen_scopes;
    for (const auto& scope : model_.scopes()) check_scope(scope, seen_scopes);
    return std::move(out_);
  }

 private:
  void report(Severity severity, std::string_view code, NodeId node, std::string message) {
    Diagnostic d{severity, std::string(code), model_.origin(node), node, std::move(message)};
    out_.push_back(std::move(d));
  }

  void check_timeline() {
    const TimelineSpec& timeline = model_.header().timeline;
    if (const auto* weeks = std::get_if<WeeksTimeline>(&timeline)) {
      timeline_ok_ = weeks->length_weeks >= 1;
    } else {
      timeline_ok_ = timeline_bound(timeline) > 0;
    }
    if (!timeline_ok_) {
      Diagnostic d = make_error(codes::kTimelineRange,
                                std::holds_alternative<WeeksTimeline>(timeline)
                                    ? "weeks timeline must be at least one week long"
                                    : "calendar timeline must end after it starts");
      d.loc = model_.timeline_origin();
      out_.push_back(std::move(d));
    }
  }

  void check_milestone(const Milestone& milestone) {
    if (milestone.span && milestone.span->start >= milestone.span->end) {
      report(Severity::kError, codes::kTimeOrder, milestone.id,
             "milestone '" + milestone.name + "' starts at " +
                 std::to_string(milestone.span->start) + " but ends at " +
                 std::to_string(milestone.span->end));
    }

    if (timeline_ok_) {
      Position bound = timeline_bound(model_.header().timeline);
      std::vector<Position> values{milestone.position};
      if (milestone.span) {
        values.push_back(milestone.span->start);
        values.push_back(milestone.span->end);
      }
      std::string offending;
      for (Position p : values) {
        if (p < 0 || p > bound) {
          if (!offending.empty()) offending += ", ";
          offending += std::to_string(p);
        }
      }
      if (!offending.empty()) {
        report(Severity::kError, codes::kPosBounds, milestone.id,
               "milestone '" + milestone.name + "' lies outside the timeline [0, " +
                   std::to_string(bound) + "]: " + offending);
      }
    }

    bool has_responsible = false;
    for (NodeId resp : resolved_.referrers(milestone.id)) {
      if (model_.get<Responsibility>(resp).kind == ResponsibilityKind::kResponsible) {
        has_responsible = true;
        break;
      }
    }
    if (!has_responsible) {
      report(Severity::kWarning, codes::kNoResponsible, milestone.id,
             "no scope is responsible for milestone '" + milestone.name + "'");
    }
  }

  void check_scope(const Scope& scope,
                   std::set<std::pair<std::string_view, std::string_view>>& seen) {
    if (!find_layer(model_, scope.layer_name)) {
      report(Severity::kError, codes::kUnknownLayer, scope.id,
             "scope '" + scope.name + "' belongs to undeclared layer '" + scope.layer_name + "'");
    }
    if (!seen.emplace(scope.layer_name, scope.name).second) {
      report(Severity::kError, codes::kDupScope, scope.id,
             "scope '" + scope.name + "' is declared more than once in layer '" +
                 scope.layer_name + "'");
    }
    std::unordered_set<std::string_view> referenced;
    for (const auto& resp : model_.responsibilities(scope)) {
      if (!referenced.insert(resp.as_milestone).second) {
        report(Severity::kError, codes::kDupResp, resp.id,
               "scope '" + scope.name + "' has more than one responsibility for milestone '" +
                   resp.as_milestone + "'");
      }
    }
  }

  const ResolvedModel& resolved_;
  const ProcessModel& model_;
  bool timeline_ok_ = true;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const ResolvedModel& resolved) {
  return Validator(resolved).run();
}

std::vector<Diagnostic> validate_text(std::string_view text) {
  ParseResult parsed = parse(text);
  if (!parsed.model) return std::move(parsed.diagnostics);
  ResolveResult resolved = resolve(std::move(*parsed.model));
  if (!resolved.resolved) return std::move(resolved.diagnostics);
  return validate(*resolved.resolved);
}

}  // namespace procplan
