#include <stdexcept>

#include "procplan/commands.hpp"

namespace procplan {

namespace {

using nlohmann::json;

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Thrown by the field readers below; converted to CMD_INVALID_ARG.
struct BadField : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw BadField(std::string("missing field '") + key + "'");
  return *it;
}

std::string str(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw BadField(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string str_or(const json& j, const char* key, std::string fallback) {
  return j.contains(key) ? str(j, key) : fallback;
}

Position integer(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) throw BadField(std::string("field '") + key + "' must be an integer");
  return v.get<Position>();
}

std::optional<std::size_t> opt_index(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw BadField(std::string("field '") + key + "' must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

std::optional<Span> opt_span(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_object()) throw BadField(std::string("field '") + key + "' must be an object");
  return Span{integer(*it, "start"), integer(*it, "end")};
}

ResponsibilityKind kind_of(const json& j, const char* key) {
  std::string text = str(j, key);
  if (auto kind = kind_from_wire_name(text)) return *kind;
  if (auto kind = kind_from_keyword(text)) return *kind;
  throw BadField("unknown responsibility kind '" + text + "'");
}

const json& array_or_empty(const json& j, const char* key) {
  static const json kEmpty = json::array();
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return kEmpty;
  if (!it->is_array()) throw BadField(std::string("field '") + key + "' must be an array");
  return *it;
}

json span_json(const std::optional<Span>& span) {
  if (!span) return nullptr;
  return {{"start", span->start}, {"end", span->end}};
}

void put_index(json& j, const char* key, const std::optional<std::size_t>& index) {
  if (index) j[key] = *index;
}

std::string_view target_kind_name(TargetKind kind) {
  switch (kind) {
    case TargetKind::kLayer: return "layer";
    case TargetKind::kMilestone: return "milestone";
    case TargetKind::kResult: return "result";
    case TargetKind::kScope: return "scope";
  }
  return "milestone";
}

json target_json(const NodeRef& t) {
  json j = {{"kind", target_kind_name(t.kind)}};
  switch (t.kind) {
    case TargetKind::kLayer: j["layer"] = t.layer; break;
    case TargetKind::kMilestone: j["milestone"] = t.milestone; break;
    case TargetKind::kResult:
      j["milestone"] = t.milestone;
      j["artifact"] = t.artifact;
      break;
    case TargetKind::kScope:
      j["layer"] = t.layer;
      j["scope"] = t.scope;
      break;
  }
  return j;
}

NodeRef target_from(const json& j) {
  if (!j.is_object()) throw BadField("field 'target' must be an object");
  std::string kind = str(j, "kind");
  NodeRef t;
  if (kind == "layer") {
    t.kind = TargetKind::kLayer;
    t.layer = str(j, "layer");
  } else if (kind == "milestone") {
    t.kind = TargetKind::kMilestone;
    t.milestone = str(j, "milestone");
  } else if (kind == "result") {
    t.kind = TargetKind::kResult;
    t.milestone = str(j, "milestone");
    t.artifact = str(j, "artifact");
  } else if (kind == "scope") {
    t.kind = TargetKind::kScope;
    t.layer = str(j, "layer");
    t.scope = str(j, "scope");
  } else {
    throw BadField("unknown target kind '" + kind + "'");
  }
  return t;
}

Command parse_command(const json& j) {
  if (!j.is_object()) throw BadField("command must be a JSON object");
  std::string name = str(j, "cmd");
  if (name == "AddLayer") {
    return cmd::AddLayer{{str(j, "name"), str_or(j, "description", "")}, opt_index(j, "index")};
  }
  if (name == "RemoveLayer") return cmd::RemoveLayer{str(j, "name")};
  if (name == "AddMilestone") {
    MilestoneDecl decl{str(j, "name"), integer(j, "position"), opt_span(j, "span"), {},
                       str_or(j, "description", "")};
    for (const auto& r : array_or_empty(j, "results")) {
      decl.results.push_back({str(r, "name"), str_or(r, "description", "")});
    }
    return cmd::AddMilestone{std::move(decl), opt_index(j, "index")};
  }
  if (name == "RemoveMilestone") {
    bool cascade = false;
    if (j.contains("cascade")) {
      if (!j["cascade"].is_boolean()) throw BadField("field 'cascade' must be a boolean");
      cascade = j["cascade"].get<bool>();
    }
    return cmd::RemoveMilestone{str(j, "name"), cascade};
  }
  if (name == "MoveMilestone") return cmd::MoveMilestone{str(j, "name"), integer(j, "position")};
  if (name == "SetDescription") {
    return cmd::SetDescription{target_from(field(j, "target")), str(j, "description")};
  }
  if (name == "SetSpan") return cmd::SetSpan{str(j, "milestone"), opt_span(j, "span")};
  if (name == "AddResult") {
    return cmd::AddResult{str(j, "milestone"), {str(j, "name"), str_or(j, "description", "")},
                          opt_index(j, "index")};
  }
  if (name == "RemoveResult") return cmd::RemoveResult{str(j, "milestone"), str(j, "name")};
  if (name == "AddScope") {
    ScopeDecl decl{str(j, "name"), str(j, "layer"), str_or(j, "description", ""), {}};
    for (const auto& r : array_or_empty(j, "responsibilities")) {
      decl.responsibilities.push_back({kind_of(r, "kind"), str(r, "milestone")});
    }
    return cmd::AddScope{std::move(decl), opt_index(j, "index")};
  }
  if (name == "RemoveScope") return cmd::RemoveScope{str(j, "layer"), str(j, "name")};
  if (name == "AddResponsibility") {
    return cmd::AddResponsibility{str(j, "layer"),
                                  str(j, "scope"),
                                  {kind_of(j, "kind"), str(j, "milestone")},
                                  opt_index(j, "index"),
                                  opt_index(j, "scope_index")};
  }
  if (name == "RemoveResponsibility") {
    return cmd::RemoveResponsibility{str(j, "layer"), str(j, "scope"), str(j, "milestone"),
                                     opt_index(j, "scope_index")};
  }
  if (name == "SetResponsibilityKind") {
    return cmd::SetResponsibilityKind{str(j, "layer"), str(j, "scope"), str(j, "milestone"),
                                      kind_of(j, "kind")};
  }
  if (name == "RenameMilestone") return cmd::RenameMilestone{str(j, "from"), str(j, "to")};
  throw BadField("unknown command '" + name + "'");
}

}  // namespace

json to_json(const Command& command) {
  json j = std::visit(
      Overloaded{
          [](const cmd::AddLayer& c) {
            json out = {{"name", c.layer.name}, {"description", c.layer.description}};
            put_index(out, "index", c.index);
            return out;
          },
          [](const cmd::RemoveLayer& c) { return json{{"name", c.name}}; },
          [](const cmd::AddMilestone& c) {
            json results = json::array();
            for (const auto& r : c.milestone.results) {
              results.push_back({{"name", r.name}, {"description", r.description}});
            }
            json out = {{"name", c.milestone.name},
                        {"position", c.milestone.position},
                        {"span", span_json(c.milestone.span)},
                        {"description", c.milestone.description},
                        {"results", std::move(results)}};
            put_index(out, "index", c.index);
            return out;
          },
          [](const cmd::RemoveMilestone& c) {
            return json{{"name", c.name}, {"cascade", c.cascade}};
          },
          [](const cmd::MoveMilestone& c) {
            return json{{"name", c.name}, {"position", c.position}};
          },
          [](const cmd::SetDescription& c) {
            return json{{"target", target_json(c.target)}, {"description", c.description}};
          },
          [](const cmd::SetSpan& c) {
            return json{{"milestone", c.milestone}, {"span", span_json(c.span)}};
          },
          [](const cmd::AddResult& c) {
            json out = {{"milestone", c.milestone},
                        {"name", c.result.name},
                        {"description", c.result.description}};
            put_index(out, "index", c.index);
            return out;
          },
          [](const cmd::RemoveResult& c) {
            return json{{"milestone", c.milestone}, {"name", c.name}};
          },
          [](const cmd::AddScope& c) {
            json resps = json::array();
            for (const auto& r : c.scope.responsibilities) {
              resps.push_back({{"kind", wire_name(r.kind)}, {"milestone", r.as_milestone}});
            }
            json out = {{"layer", c.scope.layer_name},
                        {"name", c.scope.name},
                        {"description", c.scope.description},
                        {"responsibilities", std::move(resps)}};
            put_index(out, "index", c.index);
            return out;
          },
          [](const cmd::RemoveScope& c) { return json{{"layer", c.layer}, {"name", c.name}}; },
          [](const cmd::AddResponsibility& c) {
            json out = {{"layer", c.layer},
                        {"scope", c.scope},
                        {"milestone", c.responsibility.as_milestone},
                        {"kind", wire_name(c.responsibility.kind)}};
            put_index(out, "index", c.index);
            put_index(out, "scope_index", c.scope_index);
            return out;
          },
          [](const cmd::RemoveResponsibility& c) {
            json out = {{"layer", c.layer}, {"scope", c.scope}, {"milestone", c.milestone}};
            put_index(out, "scope_index", c.scope_index);
            return out;
          },
          [](const cmd::SetResponsibilityKind& c) {
            return json{{"layer", c.layer},
                        {"scope", c.scope},
                        {"milestone", c.milestone},
                        {"kind", wire_name(c.kind)}};
          },
          [](const cmd::RenameMilestone& c) { return json{{"from", c.from}, {"to", c.to}}; },
      },
      command);
  j["cmd"] = command_name(command);
  return j;
}

Expected<Command, CommandError> command_from_json(const json& j) {
  try {
    return parse_command(j);
  } catch (const BadField& e) {
    return Unexpected{CommandError{std::string(cmd_codes::kInvalidArg), e.what(), {}, {}}};
  } catch (const json::exception& e) {
    return Unexpected{CommandError{std::string(cmd_codes::kInvalidArg), e.what(), {}, {}}};
  }
}

}  // namespace procplan
