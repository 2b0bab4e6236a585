#include "floodsp/geo_remap.hpp"

#include <boost/tokenizer.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "floodsp/geo.hpp"

namespace floodsp::remap {

namespace {

void check_point(GeoPoint p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon)) throw std::invalid_argument("non-finite coordinate");
  if (p.lat < -90.0 || p.lat > 90.0) throw std::invalid_argument("latitude outside [-90, 90]");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, int line) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

double distance_km(GeoPoint a, GeoPoint b) {
  check_point(a);
  check_point(b);
  return geo::haversine_km(a, b);
}

Assignment assign(const std::vector<std::vector<double>>& cost, const lp::LpOptions& options) {
  const int na = static_cast<int>(cost.size());
  const int nb = na == 0 ? 0 : static_cast<int>(cost.front().size());
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != nb) throw std::invalid_argument("assign: ragged cost matrix");
  }
  if (na > nb) throw std::invalid_argument("assign: more sources than targets, no feasible assignment");
  Assignment out;
  if (na == 0) return out;

  lp::Model model;
  std::vector<std::vector<int>> var(static_cast<size_t>(na), std::vector<int>(static_cast<size_t>(nb)));
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      var[static_cast<size_t>(a)][static_cast<size_t>(b)] =
          model.add_variable("x_" + std::to_string(a) + "_" + std::to_string(b), 0.0, lp::kInfinity,
                             cost[static_cast<size_t>(a)][static_cast<size_t>(b)]);
    }
  }
  for (int a = 0; a < na; ++a) {
    std::vector<lp::Term> terms;
    for (int b = 0; b < nb; ++b) terms.push_back({var[static_cast<size_t>(a)][static_cast<size_t>(b)], 1.0});
    model.add_constraint("src_" + std::to_string(a), std::move(terms), lp::Sense::kGreaterEqual, 1.0);
  }
  for (int b = 0; b < nb; ++b) {
    std::vector<lp::Term> terms;
    for (int a = 0; a < na; ++a) terms.push_back({var[static_cast<size_t>(a)][static_cast<size_t>(b)], 1.0});
    model.add_constraint("dst_" + std::to_string(b), std::move(terms), lp::Sense::kLessEqual, 1.0);
  }
  const auto sol = lp::solve_lp(model, options);
  if (sol.status != lp::LpStatus::kOptimal) {
    throw std::runtime_error(std::string("assign: LP ") + lp::to_string(sol.status));
  }
  out.lp_iterations = sol.iterations;
  out.target.assign(static_cast<size_t>(na), -1);
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      const double v = sol.x[static_cast<size_t>(var[static_cast<size_t>(a)][static_cast<size_t>(b)])];
      out.max_fractionality = std::max(out.max_fractionality, std::min(std::abs(v), std::abs(1.0 - v)));
      if (v > 0.5) {
        if (out.target[static_cast<size_t>(a)] >= 0) throw std::runtime_error("assign: source assigned twice");
        out.target[static_cast<size_t>(a)] = b;
      }
    }
  }
  if (out.max_fractionality > 1e-9) throw std::runtime_error("assign: fractional LP solution");
  for (int a = 0; a < na; ++a) {
    const int b = out.target[static_cast<size_t>(a)];
    if (b < 0) throw std::runtime_error("assign: source left unassigned");
    out.distance.push_back(cost[static_cast<size_t>(a)][static_cast<size_t>(b)]);
    out.total += out.distance.back();
  }
  return out;
}

Assignment remap(const std::vector<LabeledPoint>& from, const std::vector<LabeledPoint>& to,
                 const lp::LpOptions& options) {
  if (from.size() > to.size()) throw std::invalid_argument("remap: fewer targets than sources");
  std::vector<std::vector<double>> cost;
  for (const auto& a : from) {
    auto& row = cost.emplace_back();
    for (const auto& b : to) row.push_back(distance_km(a.point, b.point));
  }
  return assign(cost, options);
}

Assignment greedy_nearest(const std::vector<std::vector<double>>& cost) {
  Assignment out;
  const size_t nb = cost.empty() ? 0 : cost.front().size();
  if (cost.size() > nb) throw std::invalid_argument("greedy_nearest: more sources than targets");
  std::vector<bool> used(nb, false);
  for (const auto& row : cost) {
    int best = -1;
    for (size_t b = 0; b < nb; ++b) {
      if (!used[b] && (best < 0 || row[b] < row[static_cast<size_t>(best)])) best = static_cast<int>(b);
    }
    used[static_cast<size_t>(best)] = true;
    out.target.push_back(best);
    out.distance.push_back(row[static_cast<size_t>(best)]);
    out.total += out.distance.back();
  }
  return out;
}

std::vector<LabeledPoint> read_points_csv(std::istream& in) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::vector<LabeledPoint> out;
  std::string line;
  int number = 0;
  int id_col = -1, lon_col = -1, lat_col = -1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    for (const auto& tok : Tokenizer(line)) cells.push_back(trim(tok));
    if (id_col < 0) {
      for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
        if (cells[static_cast<size_t>(i)] == "id") id_col = i;
        if (cells[static_cast<size_t>(i)] == "lon") lon_col = i;
        if (cells[static_cast<size_t>(i)] == "lat") lat_col = i;
      }
      if (id_col < 0 || lon_col < 0 || lat_col < 0) throw std::runtime_error("points csv: header must contain id, lon, lat");
      continue;
    }
    const auto need = static_cast<size_t>(std::max({id_col, lon_col, lat_col}));
    if (cells.size() <= need) throw std::runtime_error("line " + std::to_string(number) + ": too few columns");
    LabeledPoint p;
    p.id = cells[static_cast<size_t>(id_col)];
    p.point.lon = parse_number(cells[static_cast<size_t>(lon_col)], number);
    p.point.lat = parse_number(cells[static_cast<size_t>(lat_col)], number);
    check_point(p.point);
    out.push_back(std::move(p));
  }
  if (id_col < 0) throw std::runtime_error("points csv: missing header");
  return out;
}

std::vector<LabeledPoint> load_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_points_csv(in);
}

void write_mapping_csv(std::ostream& out, const std::vector<LabeledPoint>& from, const std::vector<LabeledPoint>& to,
                       const Assignment& assignment) {
  out << "from_id,to_id,distance_km\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (size_t a = 0; a < from.size(); ++a) {
    out << from[a].id << ',' << to[static_cast<size_t>(assignment.target[a])].id << ',' << assignment.distance[a]
        << '\n';
  }
}

}  // namespace floodsp::remap
