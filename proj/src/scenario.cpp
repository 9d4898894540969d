#include "somdsa/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "somdsa/errors.hpp"
#include "somdsa/rng.hpp"

namespace somdsa::scenario {

using nlohmann::json;

model::NetworkInstance generate_instance(int S, int C, double density,
                                         int rmin, int rmax,
                                         std::uint64_t seed) {
  if (S < 1 || C < 1) throw ConfigError("S and C must be at least 1");
  if (!(density >= 0.0 && density <= 1.0)) {
    throw ConfigError("density must lie in [0, 1]");
  }
  if (rmin > rmax) throw ConfigError("empty demand range");
  if (rmin < 0 || rmax > C) {
    throw ConfigError("demand range must lie within [0, C]");
  }

  Rng rng(seed);
  model::Geometry geo;
  geo.positions.reserve(S);
  for (int n = 0; n < S; ++n) {
    const double x = rng.unit();
    const double y = rng.unit();
    geo.positions.push_back({x, y});
  }
  geo.radius = radius_for_density(density);

  model::NetworkInstance inst;
  inst.S = S;
  inst.C = C;
  inst.R.resize(S);
  for (int n = 0; n < S; ++n) {
    inst.R[n] = rmin + static_cast<int>(rng.below(rmax - rmin + 1));
  }
  inst.I = model::interference_from_geometry(geo.positions, geo.radius, C);
  inst.geometry = std::move(geo);
  return inst;
}

double pair_distance_cdf(double r) {
  if (r <= 0.0) return 0.0;
  const double r2 = r * r;
  if (r <= 1.0) {
    return M_PI * r2 - (8.0 / 3.0) * r2 * r + 0.5 * r2 * r2;
  }
  if (r * r >= 2.0) return 1.0;
  const double s = std::sqrt(r2 - 1.0);
  return 1.0 / 3.0 + (8.0 / 3.0) * s * s * s + (M_PI - 2.0) * r2 -
         0.5 * r2 * r2 - 4.0 * r2 * std::atan(s) + 4.0 * s;
}

double radius_for_density(double density) {
  if (density <= 0.0) return 0.0;
  if (density >= 1.0) return std::sqrt(2.0);
  double lo = 0.0;
  double hi = std::sqrt(2.0);
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pair_distance_cdf(mid) < density ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

bool within(const std::array<double, 2>& a, const std::array<double, 2>& b,
            double radius) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy <= radius * radius;
}

}  // namespace

std::vector<int> identify_opportunities(
    const std::array<double, 2>& tx_position,
    const std::array<double, 2>& rx_position,
    const std::vector<PrimaryUser>& primary_users, int C) {
  std::vector<int> open;
  for (int m = 0; m < C; ++m) {
    bool blocked = false;
    for (const auto& pu : primary_users) {
      if (!pu.active_channel || *pu.active_channel != m) continue;
      if (pu.role == PuRole::receiver && within(pu.position, tx_position, pu.r_tx)) {
        blocked = true;
        break;
      }
      if (pu.role == PuRole::transmitter &&
          within(pu.position, rx_position, pu.r_rx)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) open.push_back(m);
  }
  return open;
}

std::vector<std::uint8_t> fuse_sensing(
    const std::vector<std::vector<std::uint8_t>>& busy_maps, int C) {
  std::vector<std::uint8_t> available(C, 1);
  for (const auto& map : busy_maps) {
    if (static_cast<int>(map.size()) != C) {
      throw ShapeError("sensing bitmap has length " +
                       std::to_string(map.size()) + ", expected " +
                       std::to_string(C));
    }
    for (int m = 0; m < C; ++m) {
      if (map[m]) available[m] = 0;
    }
  }
  return available;
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> keys) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError("unknown field \"" + item.key() + "\" in event");
    }
  }
}

int event_int(const json& j, const char* what) {
  if (!j.is_number_integer()) {
    throw ParseError(std::string(what) + " must be an integer");
  }
  return j.get<int>();
}

Event parse_event_line(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError("event line " + std::to_string(line_no) + ": " +
                     e.what());
  }
  if (!j.is_object() || !j.contains("t") || !j.contains("kind")) {
    throw ParseError("event line " + std::to_string(line_no) +
                     ": requires t and kind");
  }
  Event ev;
  if (!j.at("t").is_number_integer() || j.at("t").get<long long>() < 0) {
    throw ParseError("event line " + std::to_string(line_no) +
                     ": t must be a nonnegative integer");
  }
  ev.t = j.at("t").get<long long>();
  const std::string kind = j.at("kind").is_string()
                               ? j.at("kind").get<std::string>()
                               : std::string();

  if (kind == "pu_arrival") {
    reject_unknown(j, {"t", "kind", "id", "channel", "position", "radius"});
    if (!j.contains("id") || !j.contains("channel")) {
      throw ParseError("pu_arrival requires id and channel");
    }
    PuArrival a;
    a.id = event_int(j.at("id"), "id");
    const int channel = event_int(j.at("channel"), "channel");
    if (channel < 1) throw ParseError("channel indices are 1-based");
    a.channel = channel - 1;
    const bool has_pos = j.contains("position");
    const bool has_rad = j.contains("radius");
    if (has_pos != has_rad) {
      throw ParseError("pu_arrival needs both position and radius or neither");
    }
    if (has_pos) {
      const json& jp = j.at("position");
      if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number() ||
          !jp[1].is_number()) {
        throw ParseError("position must be an [x,y] pair");
      }
      a.position = {{jp[0].get<double>(), jp[1].get<double>()}};
      if (!j.at("radius").is_number() || !(j.at("radius").get<double>() > 0)) {
        throw ParseError("radius must be a positive number");
      }
      a.radius = j.at("radius").get<double>();
    }
    ev.body = a;
  } else if (kind == "pu_departure") {
    reject_unknown(j, {"t", "kind", "ref"});
    if (!j.contains("ref")) throw ParseError("pu_departure requires ref");
    ev.body = PuDeparture{event_int(j.at("ref"), "ref")};
  } else if (kind == "demand_change") {
    reject_unknown(j, {"t", "kind", "sc", "new_r"});
    if (!j.contains("sc") || !j.contains("new_r")) {
      throw ParseError("demand_change requires sc and new_r");
    }
    const int sc = event_int(j.at("sc"), "sc");
    if (sc < 1) throw ParseError("sc indices are 1-based");
    const int new_r = event_int(j.at("new_r"), "new_r");
    if (new_r < 0) throw ParseError("new_r must be nonnegative");
    ev.body = DemandChange{sc - 1, new_r};
  } else {
    throw ParseError("event line " + std::to_string(line_no) +
                     ": unknown kind \"" + kind + "\"");
  }
  return ev;
}

}  // namespace

std::vector<Event> parse_events_jsonl(const std::string& text) {
  std::vector<Event> events;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    events.push_back(parse_event_line(line, line_no));
    if (events.size() > 1 && events[events.size() - 2].t > events.back().t) {
      throw ValidationError("event times decrease at line " +
                            std::to_string(line_no));
    }
  }
  return events;
}

std::vector<Event> load_events_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open events file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_events_jsonl(buf.str());
}

std::string events_to_jsonl_text(const std::vector<Event>& events) {
  std::string out;
  for (const auto& ev : events) {
    json j;
    j["t"] = ev.t;
    if (const auto* a = std::get_if<PuArrival>(&ev.body)) {
      j["kind"] = "pu_arrival";
      j["id"] = a->id;
      j["channel"] = a->channel + 1;
      if (a->position) {
        j["position"] = json::array({(*a->position)[0], (*a->position)[1]});
        j["radius"] = *a->radius;
      }
    } else if (const auto* d = std::get_if<PuDeparture>(&ev.body)) {
      j["kind"] = "pu_departure";
      j["ref"] = d->ref;
    } else if (const auto* c = std::get_if<DemandChange>(&ev.body)) {
      j["kind"] = "demand_change";
      j["sc"] = c->sc + 1;
      j["new_r"] = c->new_r;
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace somdsa::scenario
