#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "somdsa/model.hpp"

namespace somdsa::scenario {

enum class PuRole { transmitter, receiver };

struct PrimaryUser {
  int id = 0;
  std::array<double, 2> position{0.0, 0.0};
  PuRole role = PuRole::transmitter;
  std::optional<int> active_channel;  // 0-based
  double r_tx = 0.0;
  double r_rx = 0.0;
};

// Random geometric instance: SC positions uniform in the unit square, one
// interference radius calibrated so the expected fraction of interfering
// pairs matches density, demands uniform in [rmin, rmax].
model::NetworkInstance generate_instance(int S, int C, double density,
                                         int rmin, int rmax,
                                         std::uint64_t seed);

// P(|U - V| <= r) for two independent uniform points in the unit square.
// Piecewise closed form; F(0) = 0, F(sqrt(2)) = 1.
double pair_distance_cdf(double r);

// Inverse of the pair-distance CDF by bisection. density <= 0 -> 0,
// density >= 1 -> sqrt(2).
double radius_for_density(double density);

// Channels usable by an SU link: channel m is out when an active PU
// receiver on m sits within its r_tx of the transmitter position, or an
// active PU transmitter on m sits within its r_rx of the receiver position.
// Boundaries are inclusive. Returns ascending channel indices.
std::vector<int> identify_opportunities(
    const std::array<double, 2>& tx_position,
    const std::array<double, 2>& rx_position,
    const std::vector<PrimaryUser>& primary_users, int C);

// OR-fusion of per-SC busy bitmaps: a channel is available only when no
// controller saw it busy. C disambiguates the zero-controller case.
std::vector<std::uint8_t> fuse_sensing(
    const std::vector<std::vector<std::uint8_t>>& busy_maps, int C);

// Timeline events. A PU arrival without position or radius blocks its
// channel everywhere; with both, only for SCs inside the disc.
struct PuArrival {
  int id = 0;
  int channel = 0;  // 0-based
  std::optional<std::array<double, 2>> position;
  std::optional<double> radius;
};

struct PuDeparture {
  int ref = 0;  // id of the arrival being reversed
};

struct DemandChange {
  int sc = 0;  // 0-based
  int new_r = 0;
};

struct Event {
  long long t = 0;
  std::variant<PuArrival, PuDeparture, DemandChange> body;
};

// One JSON object per line, e.g.
//   {"t":5,"kind":"pu_arrival","id":1,"channel":2,"position":[0.4,0.6],"radius":0.3}
//   {"t":9,"kind":"pu_departure","ref":1}
//   {"t":12,"kind":"demand_change","sc":1,"new_r":0}
// Channel and SC indices are 1-based in the file. Blank lines are skipped;
// unknown kinds or fields and decreasing times are rejected.
std::vector<Event> parse_events_jsonl(const std::string& text);
std::vector<Event> load_events_file(const std::string& path);
std::string events_to_jsonl_text(const std::vector<Event>& events);

}  // namespace somdsa::scenario
