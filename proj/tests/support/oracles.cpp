#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <tuple>
#include <unordered_map>

namespace procplan::testing {

namespace {

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kDays[m - 1];
}

// Days since 0000-01-01, by counting.
long long ordinal(const std::chrono::year_month_day& d) {
  int y = static_cast<int>(d.year());
  int m = static_cast<int>(static_cast<unsigned>(d.month()));
  int day = static_cast<int>(static_cast<unsigned>(d.day()));
  long long total = 0;
  for (int year = 0; year < y; ++year) total += leap(year) ? 366 : 365;
  for (int month = 1; month < m; ++month) total += days_in_month(y, month);
  return total + day - 1;
}

long long naive_bound(const TimelineSpec& timeline) {
  if (const auto* w = std::get_if<WeeksTimeline>(&timeline)) return w->length_weeks;
  const auto& c = std::get<CalendarTimeline>(timeline);
  return ordinal(c.end_date) - ordinal(c.start_date);
}

int rank(ResponsibilityKind kind) {
  switch (kind) {
    case ResponsibilityKind::kNoticing: return 0;
    case ResponsibilityKind::kContributing: return 1;
    case ResponsibilityKind::kResponsible: return 2;
  }
  return -1;
}

std::string m_key(std::size_t i) { return "M" + std::to_string(i); }
std::string s_key(std::size_t i) { return "S" + std::to_string(i); }
std::string r_key(std::size_t i, std::size_t j) { return s_key(i) + "R" + std::to_string(j); }

std::optional<std::size_t> milestone_index(const ModelDecl& model, const std::string& name) {
  for (std::size_t i = 0; i < model.milestones.size(); ++i) {
    if (model.milestones[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<OracleEntry> sorted(std::vector<std::tuple<Position, std::size_t, OracleEntry>> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::vector<OracleEntry> out;
  for (auto& row : rows) out.push_back(std::get<2>(row));
  return out;
}

}  // namespace

std::set<Finding> naive_check(const ModelDecl& model) {
  std::set<Finding> out;
  const auto& ms = model.milestones;
  const auto& ss = model.scopes;

  for (std::size_t j = 0; j < ms.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (ms[i].name == ms[j].name) {
        out.insert({"DUP_MILESTONE", m_key(j)});
        break;
      }
    }
  }
  for (std::size_t i = 0; i < ss.size(); ++i) {
    for (std::size_t j = 0; j < ss[i].responsibilities.size(); ++j) {
      if (!milestone_index(model, ss[i].responsibilities[j].as_milestone)) {
        out.insert({"DANGLING_REF", r_key(i, j)});
      }
    }
  }
  if (!out.empty()) return out;

  long long bound = naive_bound(model.header.timeline);
  bool timeline_ok = bound >= 1;
  if (!timeline_ok) out.insert({"TIMELINE_RANGE", "T"});

  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto& m = ms[i];
    if (m.span && !(m.span->start < m.span->end)) out.insert({"TIME_ORDER", m_key(i)});
    if (timeline_ok) {
      auto outside = [&](Position p) { return p < 0 || p > bound; };
      bool bad = outside(m.position) || (m.span && (outside(m.span->start) || outside(m.span->end)));
      if (bad) out.insert({"POS_BOUNDS", m_key(i)});
    }
    bool responsible = false;
    for (const auto& s : ss) {
      for (const auto& r : s.responsibilities) {
        if (r.as_milestone == m.name && r.kind == ResponsibilityKind::kResponsible) {
          responsible = true;
        }
      }
    }
    if (!responsible) out.insert({"NO_RESPONSIBLE", m_key(i)});
  }

  for (std::size_t i = 0; i < ss.size(); ++i) {
    bool layer_known = false;
    for (const auto& l : model.layers) layer_known |= l.name == ss[i].layer_name;
    if (!layer_known) out.insert({"UNKNOWN_LAYER", s_key(i)});
    for (std::size_t k = 0; k < i; ++k) {
      if (ss[k].name == ss[i].name && ss[k].layer_name == ss[i].layer_name) {
        out.insert({"DUP_SCOPE", s_key(i)});
      }
    }
    const auto& rs = ss[i].responsibilities;
    for (std::size_t j = 0; j < rs.size(); ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        if (rs[k].as_milestone == rs[j].as_milestone) out.insert({"DUP_RESP", r_key(i, j)});
      }
    }
  }
  return out;
}

std::set<Finding> findings_of(const ProcessModel& model, const std::vector<Diagnostic>& diags) {
  std::unordered_map<NodeId, std::string> keys;
  auto ms = model.milestone_ids();
  for (std::size_t i = 0; i < ms.size(); ++i) keys[ms[i]] = m_key(i);
  auto ss = model.scope_ids();
  for (std::size_t i = 0; i < ss.size(); ++i) {
    keys[ss[i]] = s_key(i);
    const auto& rs = model.get<Scope>(ss[i]).responsibilities;
    for (std::size_t j = 0; j < rs.size(); ++j) keys[rs[j]] = r_key(i, j);
  }
  std::set<Finding> out;
  for (const auto& d : diags) {
    std::string key = d.node ? keys.at(*d.node) : "T";
    out.insert({d.code, key});
  }
  return out;
}

std::size_t count_nodes(const ModelDecl& model) {
  std::size_t n = model.layers.size();
  for (const auto& m : model.milestones) n += 1 + m.results.size();
  for (const auto& s : model.scopes) n += 1 + s.responsibilities.size();
  return n;
}

std::vector<OracleEntry> naive_scope_plan(const ModelDecl& model, const std::string& layer,
                                          const std::string& scope) {
  std::vector<std::tuple<Position, std::size_t, OracleEntry>> rows;
  for (const auto& s : model.scopes) {
    if (s.layer_name != layer || s.name != scope) continue;
    for (const auto& r : s.responsibilities) {
      std::size_t idx = *milestone_index(model, r.as_milestone);
      rows.emplace_back(model.milestones[idx].position, idx, OracleEntry{r.as_milestone, r.kind});
    }
    break;
  }
  return sorted(std::move(rows));
}

std::vector<OracleEntry> naive_layer_involvement(const ModelDecl& model,
                                                 const std::string& layer) {
  std::vector<std::tuple<Position, std::size_t, OracleEntry>> rows;
  for (std::size_t i = 0; i < model.milestones.size(); ++i) {
    std::optional<ResponsibilityKind> best;
    for (const auto& s : model.scopes) {
      if (s.layer_name != layer) continue;
      for (const auto& r : s.responsibilities) {
        if (r.as_milestone != model.milestones[i].name) continue;
        if (!best || rank(r.kind) > rank(*best)) best = r.kind;
      }
    }
    if (best) rows.emplace_back(model.milestones[i].position, i, OracleEntry{model.milestones[i].name, best});
  }
  return sorted(std::move(rows));
}

std::vector<std::pair<std::string, std::string>> naive_milestone_inputs(
    const ModelDecl& model, const std::string& milestone) {
  std::size_t subject = *milestone_index(model, milestone);
  const auto& sm = model.milestones[subject];
  auto refers = [&](const ScopeDecl& s, const std::string& name) {
    for (const auto& r : s.responsibilities) {
      if (r.as_milestone == name) return true;
    }
    return false;
  };
  std::vector<std::tuple<Position, std::size_t, std::size_t>> sources;
  for (std::size_t j = 0; j < model.milestones.size(); ++j) {
    const auto& other = model.milestones[j];
    if (j == subject || !(other.position < sm.position)) continue;
    for (const auto& s : model.scopes) {
      if (refers(s, other.name) && refers(s, sm.name)) {
        sources.emplace_back(other.position, j, j);
        break;
      }
    }
  }
  std::sort(sources.begin(), sources.end());
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [pos, idx, j] : sources) {
    for (const auto& r : model.milestones[j].results) out.emplace_back(model.milestones[j].name, r.name);
  }
  return out;
}

std::vector<OracleEntry> entries_of(const ViewModel& view) {
  std::vector<OracleEntry> out;
  for (const auto& e : view.entries) out.push_back({e.name, e.access});
  return out;
}

}  // namespace procplan::testing
