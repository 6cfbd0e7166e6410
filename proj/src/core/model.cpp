#include "procplan/model.hpp"

#include <algorithm>
#include <cassert>

namespace procplan {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void insert_at(std::vector<NodeId>& ids, NodeId id, std::optional<std::size_t> index) {
  std::size_t at = std::min(index.value_or(ids.size()), ids.size());
  ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(at), id);
}

void remove_id(std::vector<NodeId>& ids, NodeId id) {
  auto it = std::find(ids.begin(), ids.end(), id);
  assert(it != ids.end());
  ids.erase(it);
}

}  // namespace

Position timeline_bound(const TimelineSpec& timeline) {
  return std::visit(
      Overloaded{
          [](const WeeksTimeline& weeks) -> Position { return weeks.length_weeks; },
          [](const CalendarTimeline& cal) -> Position {
            using std::chrono::sys_days;
            return (sys_days{cal.end_date} - sys_days{cal.start_date}).count();
          },
      },
      timeline);
}

std::string_view keyword(ResponsibilityKind kind) {
  switch (kind) {
    case ResponsibilityKind::kResponsible: return "resp";
    case ResponsibilityKind::kContributing: return "cont";
    case ResponsibilityKind::kNoticing: return "noti";
  }
  return "resp";
}

std::string_view wire_name(ResponsibilityKind kind) {
  switch (kind) {
    case ResponsibilityKind::kResponsible: return "responsible";
    case ResponsibilityKind::kContributing: return "contributing";
    case ResponsibilityKind::kNoticing: return "noticing";
  }
  return "responsible";
}

std::optional<ResponsibilityKind> kind_from_keyword(std::string_view text) {
  if (text == "resp") return ResponsibilityKind::kResponsible;
  if (text == "cont") return ResponsibilityKind::kContributing;
  if (text == "noti") return ResponsibilityKind::kNoticing;
  return std::nullopt;
}

std::optional<ResponsibilityKind> kind_from_wire_name(std::string_view text) {
  if (text == "responsible") return ResponsibilityKind::kResponsible;
  if (text == "contributing") return ResponsibilityKind::kContributing;
  if (text == "noticing") return ResponsibilityKind::kNoticing;
  return std::nullopt;
}

int strength(ResponsibilityKind kind) {
  switch (kind) {
    case ResponsibilityKind::kResponsible: return 3;
    case ResponsibilityKind::kContributing: return 2;
    case ResponsibilityKind::kNoticing: return 1;
  }
  return 0;
}

NodeId node_id(const Node& node) {
  return std::visit([](const auto& n) { return n.id; }, node);
}

const Node* ProcessModel::lookup(NodeId id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

NodeId ProcessModel::insert_layer(const LayerDecl& decl, std::optional<std::size_t> index) {
  NodeId id = allocate();
  nodes_.emplace(id, Layer{id, decl.name, decl.description});
  insert_at(layer_ids_, id, index);
  return id;
}

NodeId ProcessModel::insert_milestone(const MilestoneDecl& decl,
                                      std::optional<std::size_t> index) {
  NodeId id = allocate();
  Milestone milestone{id, decl.name, decl.position, decl.span, {}, decl.description};
  nodes_.emplace(id, std::move(milestone));
  insert_at(milestone_ids_, id, index);
  for (const auto& result : decl.results) insert_result(id, result);
  return id;
}

NodeId ProcessModel::insert_result(NodeId milestone, const ResultDecl& decl,
                                   std::optional<std::size_t> index) {
  NodeId id = allocate();
  nodes_.emplace(id, ResultArtifact{id, decl.name, decl.description});
  insert_at(get_mut<Milestone>(milestone).results, id, index);
  return id;
}

NodeId ProcessModel::insert_scope(const ScopeDecl& decl, std::optional<std::size_t> index) {
  NodeId id = allocate();
  nodes_.emplace(id, Scope{id, decl.name, decl.layer_name, decl.description, {}});
  insert_at(scope_ids_, id, index);
  for (const auto& resp : decl.responsibilities) insert_responsibility(id, resp);
  return id;
}

NodeId ProcessModel::insert_responsibility(NodeId scope, const ResponsibilityDecl& decl,
                                           std::optional<std::size_t> index) {
  NodeId id = allocate();
  nodes_.emplace(id, Responsibility{id, decl.kind, decl.as_milestone});
  insert_at(get_mut<Scope>(scope).responsibilities, id, index);
  return id;
}

void ProcessModel::erase_layer(NodeId id) {
  remove_id(layer_ids_, id);
  nodes_.erase(id);
  origins_.erase(id);
}

void ProcessModel::erase_milestone(NodeId id) {
  for (NodeId result : get<Milestone>(id).results) {
    nodes_.erase(result);
    origins_.erase(result);
  }
  remove_id(milestone_ids_, id);
  nodes_.erase(id);
  origins_.erase(id);
}

void ProcessModel::erase_result(NodeId milestone, NodeId id) {
  remove_id(get_mut<Milestone>(milestone).results, id);
  nodes_.erase(id);
  origins_.erase(id);
}

void ProcessModel::erase_scope(NodeId id) {
  for (NodeId resp : get<Scope>(id).responsibilities) {
    nodes_.erase(resp);
    origins_.erase(resp);
  }
  remove_id(scope_ids_, id);
  nodes_.erase(id);
  origins_.erase(id);
}

void ProcessModel::erase_responsibility(NodeId scope, NodeId id) {
  remove_id(get_mut<Scope>(scope).responsibilities, id);
  nodes_.erase(id);
  origins_.erase(id);
}

std::optional<SourceLoc> ProcessModel::origin(NodeId id) const {
  auto it = origins_.find(id);
  if (it == origins_.end()) return std::nullopt;
  return it->second;
}

ProcessModel build_model(ProcessHeader header, const std::vector<LayerDecl>& layers,
                         const std::vector<MilestoneDecl>& milestones,
                         const std::vector<ScopeDecl>& scopes) {
  ProcessModel model(std::move(header));
  for (const auto& layer : layers) model.insert_layer(layer);
  for (const auto& milestone : milestones) model.insert_milestone(milestone);
  for (const auto& scope : scopes) model.insert_scope(scope);
  return model;
}

ProcessModel build_model(const ModelDecl& decl) {
  return build_model(decl.header, decl.layers, decl.milestones, decl.scopes);
}

LayerDecl to_decl(const ProcessModel&, const Layer& layer) {
  return {layer.name, layer.description};
}

MilestoneDecl to_decl(const ProcessModel& model, const Milestone& milestone) {
  MilestoneDecl decl{milestone.name, milestone.position, milestone.span, {},
                     milestone.description};
  for (const auto& result : model.results(milestone)) {
    decl.results.push_back({result.name, result.description});
  }
  return decl;
}

ScopeDecl to_decl(const ProcessModel& model, const Scope& scope) {
  ScopeDecl decl{scope.name, scope.layer_name, scope.description, {}};
  for (const auto& resp : model.responsibilities(scope)) {
    decl.responsibilities.push_back({resp.kind, resp.as_milestone});
  }
  return decl;
}

ModelDecl to_decl(const ProcessModel& model) {
  ModelDecl decl{model.header(), {}, {}, {}};
  for (const auto& layer : model.layers()) decl.layers.push_back(to_decl(model, layer));
  for (const auto& m : model.milestones()) decl.milestones.push_back(to_decl(model, m));
  for (const auto& scope : model.scopes()) decl.scopes.push_back(to_decl(model, scope));
  return decl;
}

bool structurally_equal(const ProcessModel& a, const ProcessModel& b) {
  return to_decl(a) == to_decl(b);
}

std::vector<const Milestone*> milestones_by_name(const ProcessModel& model,
                                                 std::string_view name) {
  std::vector<const Milestone*> found;
  for (const auto& milestone : model.milestones()) {
    if (milestone.name == name) found.push_back(&milestone);
  }
  return found;
}

const Layer* find_layer(const ProcessModel& model, std::string_view name) {
  for (const auto& layer : model.layers()) {
    if (layer.name == name) return &layer;
  }
  return nullptr;
}

const Scope* find_scope(const ProcessModel& model, std::string_view layer,
                        std::string_view name) {
  for (const auto& scope : model.scopes()) {
    if (scope.layer_name == layer && scope.name == name) return &scope;
  }
  return nullptr;
}

}  // namespace procplan
