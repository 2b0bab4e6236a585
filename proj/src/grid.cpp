#include "floodsp/grid.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <stdexcept>

namespace floodsp {

using nlohmann::json;

std::string_view to_string(VoltageClass v) {
  switch (v) {
    case VoltageClass::kV115_161: return "115/161";
    case VoltageClass::kV230: return "230";
    case VoltageClass::kV500: return "500";
  }
  return "?";
}

VoltageClass parse_voltage_class(std::string_view text) {
  if (text == "115/161" || text == "115" || text == "161") return VoltageClass::kV115_161;
  if (text == "230") return VoltageClass::kV230;
  if (text == "500") return VoltageClass::kV500;
  throw std::invalid_argument("unknown voltage class '" + std::string(text) + "'");
}

GridNetwork::GridNetwork(std::vector<Bus> buses, std::vector<Branch> branches, std::vector<Substation> substations,
                         AngleLimits limits, double base_mva)
    : buses_(std::move(buses)),
      branches_(std::move(branches)),
      substations_(std::move(substations)),
      limits_(limits),
      base_mva_(base_mva) {
  for (int i = 0; i < num_buses(); ++i) bus_ids_.try_emplace(buses_[static_cast<size_t>(i)].id, i);
  for (int i = 0; i < num_branches(); ++i) branch_ids_.try_emplace(branches_[static_cast<size_t>(i)].id, i);
  for (int k = 0; k < num_substations(); ++k) {
    substation_ids_.try_emplace(substations_[static_cast<size_t>(k)].id, k);
    for (int b : substations_[static_cast<size_t>(k)].buses) {
      if (b >= 0 && b < num_buses() && buses_[static_cast<size_t>(b)].substation < 0) buses_[static_cast<size_t>(b)].substation = k;
    }
  }
  incident_.resize(buses_.size());
  for (int e = 0; e < num_branches(); ++e) {
    const auto& br = branches_[static_cast<size_t>(e)];
    if (br.from >= 0 && br.from < num_buses()) incident_[static_cast<size_t>(br.from)].push_back(e);
    if (br.to >= 0 && br.to < num_buses() && br.to != br.from) incident_[static_cast<size_t>(br.to)].push_back(e);
  }
}

namespace {

int lookup(const std::unordered_map<std::string, int>& ids, std::string_view id, const char* what) {
  const auto it = ids.find(std::string(id));
  if (it == ids.end()) throw std::out_of_range(std::string("unknown ") + what + " id '" + std::string(id) + "'");
  return it->second;
}

}  // namespace

int GridNetwork::bus_index(std::string_view id) const { return lookup(bus_ids_, id, "bus"); }
int GridNetwork::branch_index(std::string_view id) const { return lookup(branch_ids_, id, "branch"); }
int GridNetwork::substation_index(std::string_view id) const { return lookup(substation_ids_, id, "substation"); }

std::optional<int> GridNetwork::find_substation(std::string_view id) const {
  const auto it = substation_ids_.find(std::string(id));
  if (it == substation_ids_.end()) return std::nullopt;
  return it->second;
}

int GridNetwork::reference_bus() const {
  for (int i = 0; i < num_buses(); ++i) {
    if (buses_[static_cast<size_t>(i)].is_reference) return i;
  }
  return -1;
}

std::span<const int> GridNetwork::incident(int bus) const { return incident_.at(static_cast<size_t>(bus)); }

double GridNetwork::total_load() const {
  double s = 0.0;
  for (const auto& b : buses_) s += b.p_load;
  return s;
}

double GridNetwork::total_generation_capacity() const {
  double s = 0.0;
  for (const auto& b : buses_) s += b.p_gen_max;
  return s;
}

std::vector<Violation> validate(const GridNetwork& network) {
  std::vector<Violation> out;
  auto flag = [&](std::string entity, std::string message) { out.push_back({std::move(entity), std::move(message)}); };
  const int n = network.num_buses();

  std::set<std::string> seen;
  int refs = 0;
  for (const auto& b : network.buses()) {
    if (!seen.insert(b.id).second) flag("bus " + b.id, "duplicate bus id");
    if (!std::isfinite(b.p_load) || b.p_load < 0.0) flag("bus " + b.id, "negative or non-finite load");
    if (!std::isfinite(b.p_gen_min) || !std::isfinite(b.p_gen_max)) flag("bus " + b.id, "non-finite generation bound");
    if (b.p_gen_min > b.p_gen_max) flag("bus " + b.id, "p_gen_min exceeds p_gen_max");
    if (b.p_gen_max < 0.0) flag("bus " + b.id, "negative p_gen_max");
    if (b.is_reference) ++refs;
  }
  if (refs == 0) flag("network", "no reference bus");
  if (refs > 1) flag("network", "multiple reference buses");

  seen.clear();
  for (const auto& br : network.branches()) {
    const std::string who = "branch " + br.id;
    if (!seen.insert(br.id).second) flag(who, "duplicate branch id");
    if (br.from < 0 || br.from >= n || br.to < 0 || br.to >= n) flag(who, "unknown endpoint bus");
    else if (br.from == br.to) flag(who, "from_bus equals to_bus");
    if (!(br.flow_limit > 0.0) || !std::isfinite(br.flow_limit)) flag(who, "nonpositive flow limit");
    if (br.susceptance == 0.0 || !std::isfinite(br.susceptance)) flag(who, "zero susceptance");
  }

  seen.clear();
  std::vector<int> membership(static_cast<size_t>(n), 0);
  for (const auto& s : network.substations()) {
    const std::string who = "substation " + s.id;
    if (!seen.insert(s.id).second) flag(who, "duplicate substation id");
    if (s.buses.empty()) flag(who, "empty bus list");
    for (int b : s.buses) {
      if (b < 0 || b >= n) flag(who, "unknown bus");
      else ++membership[static_cast<size_t>(b)];
    }
    if (s.location && (std::abs(s.location->lat) > 90.0 || std::abs(s.location->lon) > 180.0))
      flag(who, "coordinates out of range");
  }
  for (int i = 0; i < n; ++i) {
    const auto& id = network.buses()[static_cast<size_t>(i)].id;
    if (membership[static_cast<size_t>(i)] == 0) flag("bus " + id, "not in any substation");
    if (membership[static_cast<size_t>(i)] > 1) flag("bus " + id, "in multiple substations");
  }

  const auto& lim = network.angle_limits();
  if (!(lim.abs_max > 0.0)) flag("angle_limits", "nonpositive angle_abs_max");
  if (!(lim.diff_max > 0.0)) flag("angle_limits", "nonpositive angle_diff_max");
  if (lim.diff_max > 2.0 * lim.abs_max) flag("angle_limits", "angle_diff_max exceeds 2*angle_abs_max");
  return out;
}

std::vector<std::string> incident_branches(const GridNetwork& network, std::string_view bus_id) {
  const int bus = network.bus_index(bus_id);
  std::vector<std::string> out;
  for (int e : network.incident(bus)) out.push_back(network.branches()[static_cast<size_t>(e)].id);
  return out;
}

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
}

std::string id_of(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw std::invalid_argument("ids must be strings or integers");
}

}  // namespace

GridNetwork network_from_json(const json& doc) {
  check_keys(doc, {"buses", "branches", "substations", "angle_limits", "base_mva"}, "network");
  for (const char* key : {"buses", "branches", "substations"}) {
    if (!doc.contains(key) || !doc[key].is_array()) throw std::invalid_argument(std::string("network: missing array '") + key + "'");
  }

  std::vector<Bus> buses;
  std::unordered_map<std::string, int> bus_ids;
  for (const auto& jb : doc["buses"]) {
    check_keys(jb, {"id", "p_load", "p_gen_min", "p_gen_max", "is_reference"}, "bus");
    Bus b;
    b.id = id_of(jb.at("id"));
    b.p_load = jb.value("p_load", 0.0);
    b.p_gen_min = jb.value("p_gen_min", 0.0);
    b.p_gen_max = jb.value("p_gen_max", 0.0);
    b.is_reference = jb.value("is_reference", false);
    bus_ids.try_emplace(b.id, static_cast<int>(buses.size()));
    buses.push_back(std::move(b));
  }
  auto bus_ref = [&](const json& v, const std::string& where) {
    const auto id = id_of(v);
    const auto it = bus_ids.find(id);
    if (it == bus_ids.end()) throw std::invalid_argument(where + ": unknown bus '" + id + "'");
    return it->second;
  };

  std::vector<Branch> branches;
  for (const auto& je : doc["branches"]) {
    check_keys(je, {"id", "from", "to", "susceptance", "flow_limit"}, "branch");
    Branch br;
    br.id = id_of(je.at("id"));
    br.from = bus_ref(je.at("from"), "branch " + br.id);
    br.to = bus_ref(je.at("to"), "branch " + br.id);
    br.susceptance = je.at("susceptance").get<double>();
    br.flow_limit = je.at("flow_limit").get<double>();
    if (br.susceptance == 0.0) throw std::invalid_argument("branch " + br.id + ": zero susceptance");
    branches.push_back(std::move(br));
  }

  std::vector<Substation> subs;
  for (const auto& js : doc["substations"]) {
    check_keys(js, {"id", "buses", "voltage_class", "lon", "lat"}, "substation");
    Substation s;
    s.id = id_of(js.at("id"));
    for (const auto& b : js.at("buses")) s.buses.push_back(bus_ref(b, "substation " + s.id));
    s.voltage = parse_voltage_class(js.value("voltage_class", std::string("115/161")));
    if (js.contains("lon") != js.contains("lat")) throw std::invalid_argument("substation " + s.id + ": lon and lat must appear together");
    if (js.contains("lon")) s.location = GeoPoint{js["lon"].get<double>(), js["lat"].get<double>()};
    subs.push_back(std::move(s));
  }

  AngleLimits limits;
  if (doc.contains("angle_limits")) {
    const auto& ja = doc["angle_limits"];
    check_keys(ja, {"abs_max", "diff_max"}, "angle_limits");
    limits.abs_max = ja.value("abs_max", limits.abs_max);
    limits.diff_max = ja.value("diff_max", limits.diff_max);
  }
  return GridNetwork(std::move(buses), std::move(branches), std::move(subs), limits, doc.value("base_mva", 100.0));
}

json network_to_json(const GridNetwork& network) {
  json doc;
  doc["base_mva"] = network.base_mva();
  doc["angle_limits"] = {{"abs_max", network.angle_limits().abs_max}, {"diff_max", network.angle_limits().diff_max}};
  json buses = json::array();
  for (const auto& b : network.buses()) {
    buses.push_back({{"id", b.id}, {"p_load", b.p_load}, {"p_gen_min", b.p_gen_min}, {"p_gen_max", b.p_gen_max},
                     {"is_reference", b.is_reference}});
  }
  json branches = json::array();
  for (const auto& br : network.branches()) {
    branches.push_back({{"id", br.id},
                        {"from", network.buses()[static_cast<size_t>(br.from)].id},
                        {"to", network.buses()[static_cast<size_t>(br.to)].id},
                        {"susceptance", br.susceptance},
                        {"flow_limit", br.flow_limit}});
  }
  json subs = json::array();
  for (const auto& s : network.substations()) {
    json js{{"id", s.id}, {"voltage_class", std::string(to_string(s.voltage))}};
    json ids = json::array();
    for (int b : s.buses) ids.push_back(network.buses()[static_cast<size_t>(b)].id);
    js["buses"] = std::move(ids);
    if (s.location) {
      js["lon"] = s.location->lon;
      js["lat"] = s.location->lat;
    }
    subs.push_back(std::move(js));
  }
  doc["buses"] = std::move(buses);
  doc["branches"] = std::move(branches);
  doc["substations"] = std::move(subs);
  return doc;
}

GridNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("network file " + path.string() + ": " + e.what());
  }
  return network_from_json(doc);
}

}  // namespace floodsp
