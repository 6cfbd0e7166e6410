#pragma once

// Abstract syntax graph of one process description.
//
// All nodes live in a single registry keyed by NodeId. The ordered lists of
// the document (layers, milestones, scopes, and the children of milestones
// and scopes) hold ids only, so every node is stored exactly once and can be
// found without walking the tree. No node carries presentation data.

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace procplan {

class NodeId {
 public:
  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint64_t value) : value_(value) {}

  constexpr std::uint64_t value() const { return value_; }
  constexpr bool valid() const { return value_ != 0; }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;

 private:
  std::uint64_t value_ = 0;
};

}  // namespace procplan

template <>
struct std::hash<procplan::NodeId> {
  std::size_t operator()(procplan::NodeId id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value());
  }
};

namespace procplan {

// Week index (weeks timeline) or day offset from the start date (calendar).
using Position = std::int64_t;

struct Span {
  Position start = 0;
  Position end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct WeeksTimeline {
  std::int64_t length_weeks = 1;
  friend bool operator==(const WeeksTimeline&, const WeeksTimeline&) = default;
};

struct CalendarTimeline {
  std::chrono::year_month_day start_date;
  std::chrono::year_month_day end_date;
  friend bool operator==(const CalendarTimeline&, const CalendarTimeline&) = default;
};

using TimelineSpec = std::variant<WeeksTimeline, CalendarTimeline>;

// Largest admissible position on the timeline (the lower bound is always 0).
Position timeline_bound(const TimelineSpec& timeline);

struct ProcessHeader {
  std::string name;
  std::string version;
  TimelineSpec timeline = WeeksTimeline{};
  friend bool operator==(const ProcessHeader&, const ProcessHeader&) = default;
};

enum class ResponsibilityKind { kResponsible, kContributing, kNoticing };

// DSL keyword: resp / cont / noti.
std::string_view keyword(ResponsibilityKind kind);
// Wire name: responsible / contributing / noticing.
std::string_view wire_name(ResponsibilityKind kind);
std::optional<ResponsibilityKind> kind_from_keyword(std::string_view text);
std::optional<ResponsibilityKind> kind_from_wire_name(std::string_view text);
// Higher value means stronger access.
int strength(ResponsibilityKind kind);

struct Layer {
  NodeId id;
  std::string name;
  std::string description;
};

struct ResultArtifact {
  NodeId id;
  std::string name;
  std::string description;
};

struct Milestone {
  NodeId id;
  std::string name;
  Position position = 0;
  std::optional<Span> span;
  std::vector<NodeId> results;
  std::string description;
};

struct Responsibility {
  NodeId id;
  ResponsibilityKind kind = ResponsibilityKind::kResponsible;
  std::string as_milestone;
};

struct Scope {
  NodeId id;
  std::string name;
  std::string layer_name;
  std::string description;
  std::vector<NodeId> responsibilities;
};

using Node = std::variant<Layer, Milestone, ResultArtifact, Scope, Responsibility>;

NodeId node_id(const Node& node);

// Id-free value trees. These are the input of build_model, the output of
// to_decl, and the basis of structural equality.
struct ResultDecl {
  std::string name;
  std::string description;
  friend bool operator==(const ResultDecl&, const ResultDecl&) = default;
};

struct LayerDecl {
  std::string name;
  std::string description;
  friend bool operator==(const LayerDecl&, const LayerDecl&) = default;
};

struct MilestoneDecl {
  std::string name;
  Position position = 0;
  std::optional<Span> span;
  std::vector<ResultDecl> results;
  std::string description;
  friend bool operator==(const MilestoneDecl&, const MilestoneDecl&) = default;
};

struct ResponsibilityDecl {
  ResponsibilityKind kind = ResponsibilityKind::kResponsible;
  std::string as_milestone;
  friend bool operator==(const ResponsibilityDecl&, const ResponsibilityDecl&) = default;
};

struct ScopeDecl {
  std::string name;
  std::string layer_name;
  std::string description;
  std::vector<ResponsibilityDecl> responsibilities;
  friend bool operator==(const ScopeDecl&, const ScopeDecl&) = default;
};

struct ModelDecl {
  ProcessHeader header;
  std::vector<LayerDecl> layers;
  std::vector<MilestoneDecl> milestones;
  std::vector<ScopeDecl> scopes;
  friend bool operator==(const ModelDecl&, const ModelDecl&) = default;
};

struct SourceLoc {
  int line = 0;
  int column = 0;
  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

class ProcessModel {
  // Declared first so the range accessors below can deduce their type.
  template <typename T>
  auto as_nodes(const std::vector<NodeId>& ids) const {
    return ids | std::views::transform(
                     [this](NodeId id) -> const T& { return std::get<T>(nodes_.at(id)); });
  }

 public:
  ProcessModel() = default;
  explicit ProcessModel(ProcessHeader header) : header_(std::move(header)) {}

  const ProcessHeader& header() const { return header_; }
  ProcessHeader& header() { return header_; }

  std::span<const NodeId> layer_ids() const { return layer_ids_; }
  std::span<const NodeId> milestone_ids() const { return milestone_ids_; }
  std::span<const NodeId> scope_ids() const { return scope_ids_; }

  auto layers() const { return as_nodes<Layer>(layer_ids_); }
  auto milestones() const { return as_nodes<Milestone>(milestone_ids_); }
  auto scopes() const { return as_nodes<Scope>(scope_ids_); }
  auto results(const Milestone& m) const { return as_nodes<ResultArtifact>(m.results); }
  auto responsibilities(const Scope& s) const {
    return as_nodes<Responsibility>(s.responsibilities);
  }

  // nullptr when the id is not (or no longer) in the registry.
  const Node* lookup(NodeId id) const;

  template <typename T>
  const T* find(NodeId id) const {
    const Node* node = lookup(id);
    return node ? std::get_if<T>(node) : nullptr;
  }

  // Precondition: id is registered and holds a T.
  template <typename T>
  const T& get(NodeId id) const {
    return std::get<T>(nodes_.at(id));
  }
  template <typename T>
  T& get_mut(NodeId id) {
    return std::get<T>(nodes_.at(id));
  }

  std::size_t registry_size() const { return nodes_.size(); }

  // Structural insertion and removal. `index` is clamped to the list size;
  // std::nullopt appends. Removal drops the node and all of its children
  // from the registry. Ids are never handed out twice.
  NodeId insert_layer(const LayerDecl& decl, std::optional<std::size_t> index = {});
  NodeId insert_milestone(const MilestoneDecl& decl, std::optional<std::size_t> index = {});
  NodeId insert_result(NodeId milestone, const ResultDecl& decl,
                       std::optional<std::size_t> index = {});
  NodeId insert_scope(const ScopeDecl& decl, std::optional<std::size_t> index = {});
  NodeId insert_responsibility(NodeId scope, const ResponsibilityDecl& decl,
                               std::optional<std::size_t> index = {});

  void erase_layer(NodeId id);
  void erase_milestone(NodeId id);
  void erase_result(NodeId milestone, NodeId id);
  void erase_scope(NodeId id);
  void erase_responsibility(NodeId scope, NodeId id);

  // Source positions recorded by the parser; absent for edited nodes.
  std::optional<SourceLoc> origin(NodeId id) const;
  void set_origin(NodeId id, SourceLoc loc) { origins_[id] = loc; }
  std::optional<SourceLoc> timeline_origin() const { return timeline_origin_; }
  void set_timeline_origin(SourceLoc loc) { timeline_origin_ = loc; }

 private:
  NodeId allocate() { return NodeId{next_id_++}; }

  ProcessHeader header_;
  std::vector<NodeId> layer_ids_;
  std::vector<NodeId> milestone_ids_;
  std::vector<NodeId> scope_ids_;
  std::unordered_map<NodeId, Node> nodes_;
  std::unordered_map<NodeId, SourceLoc> origins_;
  std::optional<SourceLoc> timeline_origin_;
  std::uint64_t next_id_ = 1;
};

ProcessModel build_model(ProcessHeader header, const std::vector<LayerDecl>& layers,
                         const std::vector<MilestoneDecl>& milestones,
                         const std::vector<ScopeDecl>& scopes);
ProcessModel build_model(const ModelDecl& decl);

ModelDecl to_decl(const ProcessModel& model);
LayerDecl to_decl(const ProcessModel& model, const Layer& layer);
MilestoneDecl to_decl(const ProcessModel& model, const Milestone& milestone);
ScopeDecl to_decl(const ProcessModel& model, const Scope& scope);

// Equal content and order, ignoring NodeIds and source positions.
bool structurally_equal(const ProcessModel& a, const ProcessModel& b);

// All milestones named `name`, in document order.
std::vector<const Milestone*> milestones_by_name(const ProcessModel& model,
                                                 std::string_view name);

const Layer* find_layer(const ProcessModel& model, std::string_view name);
const Scope* find_scope(const ProcessModel& model, std::string_view layer,
                        std::string_view name);

}  // namespace procplan
