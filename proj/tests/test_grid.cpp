#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "floodsp/fixtures.hpp"
#include "floodsp/grid.hpp"

using namespace floodsp;
using nlohmann::json;

namespace {

bool has_message(const std::vector<Violation>& v, const std::string& text) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.message == text; });
}

json two_bus_doc() {
  return json::parse(R"({
    "buses": [{"id": "A", "p_gen_max": 2.0, "is_reference": true}, {"id": "B", "p_load": 1.0}],
    "branches": [{"id": "AB", "from": "A", "to": "B", "susceptance": -10.0, "flow_limit": 1.5}],
    "substations": [{"id": "SA", "buses": ["A"], "voltage_class": "500"},
                    {"id": "SB", "buses": ["B"], "lon": -95.0, "lat": 29.5}]
  })");
}

}  // namespace

TEST_CASE("fixtures validate cleanly") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    CHECK(validate(make_fixture(name).network).empty());
  }
}

TEST_CASE("bus substation membership is derived from substation lists") {
  const auto net = make_fixture("tiny3").network;
  CHECK(net.buses()[0].substation == 0);
  CHECK(net.buses()[1].substation == 0);
  CHECK(net.buses()[2].substation == 1);
  CHECK(net.reference_bus() == 0);
  CHECK(net.total_load() == doctest::Approx(2.0));
  CHECK(net.total_generation_capacity() == doctest::Approx(3.0));
}

TEST_CASE("incident branches by bus id") {
  const auto net = make_fixture("tiny3").network;
  CHECK(incident_branches(net, "2") == std::vector<std::string>{"L1", "L2"});
  CHECK(incident_branches(net, "1") == std::vector<std::string>{"L1", "L3"});
  CHECK_THROWS_AS(incident_branches(net, "nope"), std::out_of_range);
}

TEST_CASE("validation reports each broken invariant") {
  std::vector<Bus> buses{{"a", -1, -1.0, 2.0, 1.0, false}, {"a", -1, 0.0, 0.0, -1.0, false}, {"c", -1, 0.0, 0.0, 0.0, false}};
  std::vector<Branch> branches{{"e", 0, 0, -1.0, 1.0}, {"f", 0, 7, 0.0, 0.0}};
  std::vector<Substation> subs{{"s", {0, 1}, VoltageClass::kV230, GeoPoint{0.0, 95.0}}, {"s", {1}, VoltageClass::kV230, {}},
                               {"t", {}, VoltageClass::kV230, {}}};
  const GridNetwork net(buses, branches, subs, AngleLimits{0.1, 0.5});
  const auto v = validate(net);
  CHECK(has_message(v, "duplicate bus id"));
  CHECK(has_message(v, "negative or non-finite load"));
  CHECK(has_message(v, "p_gen_min exceeds p_gen_max"));
  CHECK(has_message(v, "negative p_gen_max"));
  CHECK(has_message(v, "no reference bus"));
  CHECK(has_message(v, "from_bus equals to_bus"));
  CHECK(has_message(v, "unknown endpoint bus"));
  CHECK(has_message(v, "nonpositive flow limit"));
  CHECK(has_message(v, "zero susceptance"));
  CHECK(has_message(v, "duplicate substation id"));
  CHECK(has_message(v, "empty bus list"));
  CHECK(has_message(v, "coordinates out of range"));
  CHECK(has_message(v, "not in any substation"));
  CHECK(has_message(v, "in multiple substations"));
  CHECK(has_message(v, "angle_diff_max exceeds 2*angle_abs_max"));
}

TEST_CASE("two reference buses are flagged") {
  auto doc = two_bus_doc();
  doc["buses"][1]["is_reference"] = true;
  CHECK(has_message(validate(network_from_json(doc)), "multiple reference buses"));
}

TEST_CASE("network JSON round trip") {
  const auto net = network_from_json(two_bus_doc());
  CHECK(validate(net).empty());
  CHECK(net.substations()[0].voltage == VoltageClass::kV500);
  CHECK(net.substations()[1].voltage == VoltageClass::kV115_161);
  REQUIRE(net.substations()[1].location.has_value());
  CHECK(net.substations()[1].location->lat == 29.5);
  CHECK_FALSE(net.substations()[0].location.has_value());

  const auto again = network_from_json(network_to_json(net));
  CHECK(network_to_json(again) == network_to_json(net));

  for (const auto& name : fixture_names()) {
    const auto fx = make_fixture(name).network;
    CHECK(network_to_json(network_from_json(network_to_json(fx))) == network_to_json(fx));
  }
}

TEST_CASE("network JSON rejects malformed documents") {
  auto doc = two_bus_doc();
  doc["buses"][0]["colour"] = "red";
  CHECK_THROWS_WITH_AS(network_from_json(doc), doctest::Contains("unknown key 'colour'"), std::invalid_argument);

  doc = two_bus_doc();
  doc["branches"][0]["susceptance"] = 0.0;
  CHECK_THROWS_WITH_AS(network_from_json(doc), doctest::Contains("zero susceptance"), std::invalid_argument);

  doc = two_bus_doc();
  doc["branches"][0]["to"] = "Z";
  CHECK_THROWS_WITH_AS(network_from_json(doc), doctest::Contains("unknown bus 'Z'"), std::invalid_argument);

  doc = two_bus_doc();
  doc.erase("substations");
  CHECK_THROWS_AS(network_from_json(doc), std::invalid_argument);

  doc = two_bus_doc();
  doc["substations"][0]["voltage_class"] = "345";
  CHECK_THROWS_AS(network_from_json(doc), std::invalid_argument);

  doc = two_bus_doc();
  doc["substations"][1].erase("lat");
  CHECK_THROWS_AS(network_from_json(doc), std::invalid_argument);
}

TEST_CASE("integer ids are accepted") {
  auto doc = two_bus_doc();
  doc["buses"][0]["id"] = 1;
  doc["branches"][0]["from"] = 1;
  doc["substations"][0]["buses"] = json::array({1});
  const auto net = network_from_json(doc);
  CHECK(net.bus_index("1") == 0);
}

TEST_CASE("load_network reads a file and reports its path on errors") {
  const auto dir = std::filesystem::temp_directory_path() / "floodsp_test_grid";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << two_bus_doc().dump();
    std::ofstream(dir / "bad.json") << "{ not json";
  }
  CHECK(load_network(dir / "ok.json").num_buses() == 2);
  CHECK_THROWS_WITH(load_network(dir / "bad.json"), doctest::Contains("bad.json"));
  CHECK_THROWS(load_network(dir / "missing.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("voltage class names") {
  for (auto v : {VoltageClass::kV115_161, VoltageClass::kV230, VoltageClass::kV500}) {
    CHECK(parse_voltage_class(to_string(v)) == v);
  }
}
