#include "floodsp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace floodsp {

using nlohmann::json;

void DepthThresholds::check() const {
  if (heights.empty()) throw std::invalid_argument("depth thresholds: empty");
  for (size_t i = 0; i < heights.size(); ++i) {
    if (!(heights[i] > 0.0)) throw std::invalid_argument("depth thresholds: must be positive");
    if (i > 0 && !(heights[i] > heights[i - 1])) throw std::invalid_argument("depth thresholds: must be strictly increasing");
  }
}

int depth_to_level(double depth, const DepthThresholds& thresholds) {
  if (depth < 0.0 || std::isnan(depth)) throw std::invalid_argument("depth_to_level: negative depth");
  if (depth == 0.0) return 0;
  const auto& h = thresholds.heights;
  const auto it = std::lower_bound(h.begin(), h.end(), depth);
  return static_cast<int>(it - h.begin()) + 1;
}

std::vector<int> level_to_indicators(int level, int level_count) {
  if (level < 0) throw std::invalid_argument("level_to_indicators: negative level");
  std::vector<int> row(static_cast<size_t>(level_count), 0);
  for (int r = 0; r < std::min(level, level_count); ++r) row[static_cast<size_t>(r)] = 1;
  return row;
}

int FloodScenarioSet::worst_level(int substation) const {
  int worst = 0;
  for (const auto& s : scenarios) worst = std::max(worst, s.levels[static_cast<size_t>(substation)]);
  return worst;
}

void check_scenarios(const FloodScenarioSet& set, const GridNetwork& network) {
  if (set.level_count < 1) throw std::invalid_argument("scenarios: level_count must be >= 1");
  if (set.unattainable_level < 1 || set.unattainable_level > set.level_count)
    throw std::invalid_argument("scenarios: unattainable_level must lie in [1, level_count]");
  if (set.scenarios.empty()) throw std::invalid_argument("scenarios: empty set");
  double total = 0.0;
  for (const auto& s : set.scenarios) {
    if (!(s.probability > 0.0) || s.probability > 1.0)
      throw std::invalid_argument("scenario " + s.id + ": probability outside (0, 1]");
    if (static_cast<int>(s.levels.size()) != network.num_substations())
      throw std::invalid_argument("scenario " + s.id + ": level vector does not cover every substation");
    for (int level : s.levels) {
      if (level < 0 || level > set.level_count)
        throw std::invalid_argument("scenario " + s.id + ": level outside [0, level_count]");
    }
    total += s.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("scenarios: probabilities sum to " + std::to_string(total) + ", not 1");
}

FloodScenarioSet scenarios_from_json(const json& doc, const GridNetwork& network, bool normalize) {
  for (const auto& [key, value] : doc.items()) {
    if (key != "level_count" && key != "unattainable_level" && key != "scenarios")
      throw std::invalid_argument("scenarios: unknown key '" + key + "'");
  }
  FloodScenarioSet set;
  set.level_count = doc.at("level_count").get<int>();
  set.unattainable_level = doc.value("unattainable_level", set.level_count);
  std::set<std::string> ids;
  for (const auto& js : doc.at("scenarios")) {
    for (const auto& [key, value] : js.items()) {
      if (key != "id" && key != "probability" && key != "levels" && key != "indicators")
        throw std::invalid_argument("scenario: unknown key '" + key + "'");
    }
    FloodScenario s;
    s.id = js.at("id").is_string() ? js["id"].get<std::string>() : std::to_string(js["id"].get<long long>());
    if (!ids.insert(s.id).second) throw std::invalid_argument("scenarios: duplicate id " + s.id);
    s.probability = js.at("probability").get<double>();
    s.levels.assign(static_cast<size_t>(network.num_substations()), 0);
    if (js.contains("levels") && js.contains("indicators"))
      throw std::invalid_argument("scenario " + s.id + ": give levels or indicators, not both");
    if (js.contains("levels")) {
      for (const auto& [sub, level] : js["levels"].items()) {
        const auto k = network.find_substation(sub);
        if (!k) throw std::invalid_argument("scenario " + s.id + ": unknown substation '" + sub + "'");
        s.levels[static_cast<size_t>(*k)] = level.get<int>();
      }
    }
    if (js.contains("indicators")) {
      for (const auto& [sub, row] : js["indicators"].items()) {
        const auto k = network.find_substation(sub);
        if (!k) throw std::invalid_argument("scenario " + s.id + ": unknown substation '" + sub + "'");
        int level = 0;
        bool dry_seen = false;
        for (const auto& v : row) {
          const int xi = v.get<int>();
          if (xi != 0 && xi != 1) throw std::invalid_argument("scenario " + s.id + ": indicators must be 0 or 1");
          if (xi == 1 && dry_seen) throw std::invalid_argument("scenario " + s.id + ": non-cumulative indicators at " + sub);
          if (xi == 1) ++level;
          else dry_seen = true;
        }
        s.levels[static_cast<size_t>(*k)] = level;
      }
    }
    set.scenarios.push_back(std::move(s));
  }
  if (normalize) {
    double total = 0.0;
    for (const auto& s : set.scenarios) total += s.probability;
    if (!(total > 0.0)) throw std::invalid_argument("scenarios: cannot normalize nonpositive total probability");
    for (auto& s : set.scenarios) s.probability /= total;
  }
  check_scenarios(set, network);
  return set;
}

json scenarios_to_json(const FloodScenarioSet& set, const GridNetwork& network) {
  json out{{"level_count", set.level_count}, {"unattainable_level", set.unattainable_level}};
  json list = json::array();
  for (const auto& s : set.scenarios) {
    json levels = json::object();
    for (int k = 0; k < network.num_substations(); ++k) {
      const int level = s.levels[static_cast<size_t>(k)];
      if (level > 0) levels[network.substations()[static_cast<size_t>(k)].id] = level;
    }
    list.push_back({{"id", s.id}, {"probability", s.probability}, {"levels", std::move(levels)}});
  }
  out["scenarios"] = std::move(list);
  return out;
}

FloodScenarioSet load_scenarios(const std::filesystem::path& path, const GridNetwork& network, bool normalize) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("scenario file " + path.string() + ": " + e.what());
  }
  return scenarios_from_json(doc, network, normalize);
}

}  // namespace floodsp
