#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace somdsa::model {

struct Geometry {
  std::vector<std::array<double, 2>> positions;  // planar SC coordinates
  double radius = 0.0;                           // interference radius
};

// S x S x C nonnegative severity tensor. Entry (n,k,m) is the severity of
// the conflict when controllers n and k both hold channel m. Zero diagonal,
// symmetric in (n,k).
struct InterferenceTensor {
  int S = 0;
  int C = 0;
  std::vector<int> v;

  static InterferenceTensor zeros(int S, int C);

  int at(int n, int k, int m) const { return v[idx(n, k, m)]; }
  int& at(int n, int k, int m) { return v[idx(n, k, m)]; }

  std::size_t idx(int n, int k, int m) const {
    return (static_cast<std::size_t>(n) * S + k) * C + m;
  }
};

struct NetworkInstance {
  int S = 0;                         // spectrum controllers
  int C = 0;                         // channels
  std::vector<int> R;                // per-SC demand
  InterferenceTensor I;              // S x S x C severities
  std::optional<Geometry> geometry;  // only used to synthesize I
};

// Interference cost by channel separation, derived from I. Entry (n,k,d)
// holds cost at separation d = 0..D-1 and obeys the decay recursion
//   P(n,k,d) = max(0, P(n,k,d-1) - 1),  P(n,k,0) = max over channels of I,
// with a zero diagonal. Depth D equals the channel count.
struct ProximityTensor {
  int S = 0;
  int D = 0;
  std::vector<int> v;

  int at(int n, int k, int d) const {
    return v[(static_cast<std::size_t>(n) * S + k) * D + d];
  }
  int& at(int n, int k, int d) {
    return v[(static_cast<std::size_t>(n) * S + k) * D + d];
  }
};

// Binary S x C channel grants; feasible when row n sums to R[n].
struct AssignmentMatrix {
  int S = 0;
  int C = 0;
  std::vector<std::uint8_t> cells;

  static AssignmentMatrix zeros(int S, int C);

  bool at(int n, int m) const {
    return cells[static_cast<std::size_t>(n) * C + m] != 0;
  }
  void set(int n, int m, bool val) {
    cells[static_cast<std::size_t>(n) * C + m] = val ? 1 : 0;
  }
  int row_sum(int n) const;

  bool operator==(const AssignmentMatrix&) const = default;
};

ProximityTensor build_proximity(const NetworkInstance& inst);

// Total interference cost of an assignment: sum over ordered pairs of
// active grants (n,m),(k,j) of P(n,k,|m-j|). Each unordered conflicting
// pair therefore contributes twice. Throws ShapeError on mismatched dims.
long long cost(const AssignmentMatrix& a, const ProximityTensor& p);

// Synthesizes a binary tensor from planar placement: nodes within `radius`
// of each other conflict on every channel.
InterferenceTensor interference_from_geometry(
    const std::vector<std::array<double, 2>>& positions, double radius, int C);

// Returns every invariant violation with 1-based coordinates; empty == ok.
std::vector<std::string> validate(const NetworkInstance& inst);

// Strict JSON schema:
//   {"S":int,"C":int,"R":[int],"I":[[[int]]],
//    "geometry":{"positions":[[x,y]],"radius":float}|null}
// I may be omitted when geometry is present (derived at load). Unknown
// fields are rejected by name. Invariant violations are rejected at load.
NetworkInstance parse_instance_json(const std::string& text);
NetworkInstance load_instance_file(const std::string& path);
std::string instance_to_json_text(const NetworkInstance& inst, int indent = 2);

// FNV-1a hash of the canonical (compact, key-sorted) JSON form, as 16 hex
// digits. Identifies an instance in reports and manifests.
std::string instance_fingerprint(const NetworkInstance& inst);

}  // namespace somdsa::model
