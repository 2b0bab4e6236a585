#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "floodsp/cli.hpp"

using namespace floodsp::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

json result_of(const Run& r) { return json::parse(r.out).at("result"); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  [[nodiscard]] std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("envelope JSON round trip") {
  ResultEnvelope env;
  env.command = "solve";
  env.config = {{"budget", 3}};
  env.timing = {{"wall_seconds", 0.25}};
  env.result = {{"objective", 1.5}, {"bound", "-inf"}};
  CHECK(envelope_from_json(envelope_to_json(env)) == env);
  auto doc = envelope_to_json(env);
  doc["schema_version"] = kSchemaVersion + 1;
  CHECK_THROWS(envelope_from_json(doc));
  doc = envelope_to_json(env);
  doc.erase("result");
  CHECK_THROWS(envelope_from_json(doc));
}

TEST_CASE("shortest round-trip number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(1e300 * 1e10) == "inf");
  CHECK(format_double(-1e300 * 1e10) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("solve and eval agree on tiny3") {
  TempDir dir("floodsp_cli_solve");
  REQUIRE(call({"make-fixture", "--name", "tiny3", "--dir", dir.path.string()}).code == 0);
  const std::vector<std::string> inst{"--network", dir / "network.json", "--scenarios", dir / "scenarios.json"};
  auto with = [&](std::vector<std::string> head, const std::vector<std::string>& tail = {}) {
    head.insert(head.end(), inst.begin(), inst.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };

  const auto zero = call(with({"solve", "--budget", "0"}));
  REQUIRE(zero.code == 0);
  const auto zr = result_of(zero);
  CHECK(zr["status"] == "optimal");
  CHECK(zr["objective"].get<double>() == doctest::Approx(1.5));
  CHECK(result_of(call(with({"eval", "--zero-plan"})))["expected_loss"].get<double>() == doctest::Approx(1.5));

  const auto full = call(with({"solve", "--budget", "5", "--plan-out", dir / "plan.json"}));
  REQUIRE(full.code == 0);
  CHECK(result_of(full)["objective"].get<double>() == doctest::Approx(0.0));
  CHECK(json::parse(slurp(dir / "plan.json")) == json::parse(R"({"levels": {"S1": 1, "S2": 2}})"));
  CHECK(result_of(call(with({"eval", "--plan", dir / "plan.json"})))["expected_loss"].get<double>() == doctest::Approx(0.0));

  const auto heur = call(with({"heuristic", "--budget", "3", "--plan-out", dir / "heur.json"}));
  REQUIRE(heur.code == 0);
  const double best = result_of(heur)["expected_loss"].get<double>();
  CHECK(result_of(call(with({"eval", "--plan", dir / "heur.json"})))["expected_loss"].get<double>() == doctest::Approx(best));

  const auto uniq = call(with({"check-unique", "--budget", "5"}));
  REQUIRE(uniq.code == 0);
  CHECK(result_of(uniq)["unique"] == true);

  CHECK(call(with({"eval", "--zero-plan", "--plan", dir / "plan.json"})).code != 0);
  CHECK(call({"validate", "--network", dir / "network.json"}).code == 0);
}

TEST_CASE("sweep output is deterministic") {
  TempDir dir("floodsp_cli_sweep");
  REQUIRE(call({"make-fixture", "--name", "star8", "--dir", dir.path.string()}).code == 0);
  for (const char* leaf : {"a", "b"}) {
    const auto r = call({"sweep", "--network", dir / "network.json", "--scenarios", dir / "scenarios.json", "--out-dir",
                         dir / leaf});
    REQUIRE(r.code == 0);
  }
  for (const char* csv : {"sweep.csv", "plans.csv", "transitions.csv", "intervals.csv"}) {
    CAPTURE(csv);
    const auto a = slurp(dir.path / "a" / csv);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir.path / "b" / csv));
  }
  const auto report = envelope_from_json(json::parse(slurp(dir.path / "a" / "report.json")));
  CHECK(report.command == "sweep");
  CHECK(report.result["rows"].size() == 16);
}

TEST_CASE("errors map to exit codes") {
  TempDir dir("floodsp_cli_errors");
  CHECK(call({}).code != 0);
  CHECK(call({"no-such-command"}).code != 0);
  const auto missing = call({"solve", "--network", dir / "nope.json", "--scenarios", dir / "nope.json", "--budget", "1"});
  CHECK(missing.code != 0);
  CHECK_FALSE(missing.err.empty());
  std::ofstream(dir / "garbled.json") << "{";
  const auto garbled = call({"solve", "--network", dir / "garbled.json", "--scenarios", dir / "garbled.json", "--budget", "1"});
  CHECK(garbled.code == 1);
  CHECK(garbled.err.rfind("error: ", 0) == 0);
  CHECK(call({"make-fixture", "--name", "atlantis", "--dir", dir.path.string()}).code == 1);

  std::ofstream(dir / "bad.json") << R"({"buses": [{"id": "a"}], "branches": [], "substations": []})";
  const auto bad = call({"validate", "--network", dir / "bad.json"});
  CHECK(bad.code == 2);
  CHECK(result_of(bad)["violations"].size() >= 2);
}
