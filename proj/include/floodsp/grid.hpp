#pragma once

#include <filesystem>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace floodsp {

/// Highest-voltage component class of a substation; sets the barrier
/// perimeter (segments per level increment).
enum class VoltageClass { kV115_161, kV230, kV500 };

std::string_view to_string(VoltageClass v);
VoltageClass parse_voltage_class(std::string_view text);

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
};

/// Quantities are per-unit. Generation bounds are the per-bus aggregate.
struct Bus {
  std::string id;
  int substation = -1;
  double p_load = 0.0;
  double p_gen_min = 0.0;
  double p_gen_max = 0.0;
  bool is_reference = false;
};

/// Ordered pair (from, to); flow is positive from -> to and obeys
/// flow = -susceptance * (theta_from - theta_to) while operational.
struct Branch {
  std::string id;
  int from = -1;
  int to = -1;
  double susceptance = 0.0;
  double flow_limit = 0.0;
};

struct Substation {
  std::string id;
  std::vector<int> buses;
  VoltageClass voltage = VoltageClass::kV115_161;
  std::optional<GeoPoint> location;
};

struct AngleLimits {
  double abs_max = std::numbers::pi / 2.0;
  double diff_max = std::numbers::pi / 6.0;
};

struct Violation {
  std::string entity;
  std::string message;
};

/// Immutable network. Bus::substation is derived from the substations' bus
/// lists at construction; structural problems are reported by validate()
/// rather than thrown, so malformed inputs can still be inspected.
class GridNetwork {
 public:
  GridNetwork() = default;
  GridNetwork(std::vector<Bus> buses, std::vector<Branch> branches, std::vector<Substation> substations,
              AngleLimits limits = {}, double base_mva = 100.0);

  [[nodiscard]] const std::vector<Bus>& buses() const { return buses_; }
  [[nodiscard]] const std::vector<Branch>& branches() const { return branches_; }
  [[nodiscard]] const std::vector<Substation>& substations() const { return substations_; }
  [[nodiscard]] const AngleLimits& angle_limits() const { return limits_; }
  [[nodiscard]] double base_mva() const { return base_mva_; }

  [[nodiscard]] int num_buses() const { return static_cast<int>(buses_.size()); }
  [[nodiscard]] int num_branches() const { return static_cast<int>(branches_.size()); }
  [[nodiscard]] int num_substations() const { return static_cast<int>(substations_.size()); }

  /// Index lookups; throw std::out_of_range on unknown ids.
  [[nodiscard]] int bus_index(std::string_view id) const;
  [[nodiscard]] int branch_index(std::string_view id) const;
  [[nodiscard]] int substation_index(std::string_view id) const;
  [[nodiscard]] std::optional<int> find_substation(std::string_view id) const;

  /// First reference bus, or -1.
  [[nodiscard]] int reference_bus() const;
  /// Branch indices incident to bus `bus` (ascending).
  [[nodiscard]] std::span<const int> incident(int bus) const;

  [[nodiscard]] double total_load() const;
  [[nodiscard]] double total_generation_capacity() const;

 private:
  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  std::vector<Substation> substations_;
  AngleLimits limits_;
  double base_mva_ = 100.0;
  std::unordered_map<std::string, int> bus_ids_;
  std::unordered_map<std::string, int> branch_ids_;
  std::unordered_map<std::string, int> substation_ids_;
  std::vector<std::vector<int>> incident_;
};

/// Every broken invariant, one entry each; empty when the network is sound.
std::vector<Violation> validate(const GridNetwork& network);

/// Branches with from_bus == bus or to_bus == bus, by id. Throws on unknown bus.
std::vector<std::string> incident_branches(const GridNetwork& network, std::string_view bus_id);

/// Network document I/O. Unknown keys and zero susceptances are rejected.
GridNetwork network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const GridNetwork& network);
GridNetwork load_network(const std::filesystem::path& path);

}  // namespace floodsp
