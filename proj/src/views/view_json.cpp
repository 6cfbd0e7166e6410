#include "procplan/views.hpp"

namespace procplan {

namespace {

nlohmann::json artifacts_json(const std::vector<ArtifactSummary>& artifacts, bool with_owner) {
  auto out = nlohmann::json::array();
  for (const auto& artifact : artifacts) {
    nlohmann::json item = {{"name", artifact.name}, {"description", artifact.description}};
    if (with_owner) item["milestone"] = artifact.milestone;
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const ViewModel& view) {
  nlohmann::json out;
  out["view_kind"] = to_string(view.kind);
  out["subject"] = view.subject;
  auto entries = nlohmann::json::array();
  for (const auto& entry : view.entries) {
    nlohmann::json item = {
        {"id", entry.milestone.value()},
        {"name", entry.name},
        {"position", entry.position},
        {"description", entry.description},
        {"results", artifacts_json(entry.results, false)},
    };
    if (entry.span) item["span"] = {{"start", entry.span->start}, {"end", entry.span->end}};
    if (entry.access) item["access"] = wire_name(*entry.access);
    entries.push_back(std::move(item));
  }
  out["entries"] = std::move(entries);
  if (view.kind == ViewKind::kMilestoneIO) {
    out["inputs"] = artifacts_json(view.inputs, true);
    out["outputs"] = artifacts_json(view.outputs, true);
  }
  return out;
}

}  // namespace procplan
