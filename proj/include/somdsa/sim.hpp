#pragma once

#include <string>
#include <vector>

#include "somdsa/model.hpp"
#include "somdsa/scenario.hpp"
#include "somdsa/som.hpp"

namespace somdsa::sim {

struct SimConfig {
  som::SolverConfig solver;
  bool warm_start = false;
};

struct MetricsRow {
  long long tick = 0;
  long long cost = 0;
  double satisfaction = 0.0;  // granted demand / requested demand
  long long churn = 0;        // grants changed since the previous resolve
};

// Everything observable about one re-allocation, kept for auditing: the
// availability in force and what the solver produced under it.
struct StepRecord {
  long long tick = 0;
  som::ChannelMask mask;
  model::AssignmentMatrix assignment;
  bool converged = true;
  int outer_steps = 0;
};

struct SimResult {
  std::vector<MetricsRow> metrics;
  std::vector<StepRecord> steps;
};

// Holds the mutable network picture: demands changed by events, the set of
// active primary users, and the last granted assignment. Events only change
// the picture; re-allocation happens on resolve().
class Simulation {
 public:
  Simulation(model::NetworkInstance inst, SimConfig config);

  // pu_arrival registers a blocker, pu_departure removes it by id,
  // demand_change rewrites one SC's demand. Never re-solves.
  void apply_event(const scenario::Event& event);

  // Masks blocked channels, clamps demands to what remains, re-solves, and
  // appends one metrics row. Warm starts reuse the previous weights. When
  // nothing is allocatable the assignment is empty and no solver runs.
  StepRecord resolve(long long tick);

  // Availability derived from the active PUs: an arrival with a disc blocks
  // only SCs inside it when the instance has geometry; otherwise it blocks
  // the channel for everyone.
  som::ChannelMask current_mask() const;

  const model::NetworkInstance& instance() const { return inst_; }
  const std::vector<MetricsRow>& metrics() const { return metrics_; }
  const model::AssignmentMatrix& assignment() const { return assignment_; }

 private:
  struct ActivePu {
    int id = 0;
    int channel = 0;
    bool global = true;
    std::array<double, 2> position{0.0, 0.0};
    double radius = 0.0;
  };

  model::NetworkInstance inst_;
  SimConfig config_;
  std::vector<ActivePu> active_;
  model::AssignmentMatrix assignment_;
  bool has_previous_ = false;
  Matrix previous_w_{0, 0};
  std::vector<MetricsRow> metrics_;
};

// Applies due events tick by tick and resolves once per event-bearing tick;
// always resolves at t = 0 so the timeline starts with an allocation.
SimResult run_simulation(const model::NetworkInstance& inst,
                         const std::vector<scenario::Event>& events,
                         const SimConfig& config);

std::string metrics_to_csv_text(const std::vector<MetricsRow>& metrics);

// Final allocation in the solver's result schema.
std::string final_to_json_text(const SimResult& result);

}  // namespace somdsa::sim
