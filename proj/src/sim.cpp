#include "somdsa/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "somdsa/errors.hpp"

namespace somdsa::sim {

using nlohmann::json;

Simulation::Simulation(model::NetworkInstance inst, SimConfig config)
    : inst_(std::move(inst)),
      config_(config),
      assignment_(model::AssignmentMatrix::zeros(inst_.S, inst_.C)) {
  auto violations = model::validate(inst_);
  if (!violations.empty()) {
    throw ValidationError("invalid instance: " + violations.front());
  }
}

void Simulation::apply_event(const scenario::Event& event) {
  if (const auto* a = std::get_if<scenario::PuArrival>(&event.body)) {
    if (a->channel < 0 || a->channel >= inst_.C) {
      throw ValidationError("pu_arrival channel " +
                            std::to_string(a->channel + 1) + " outside 1.." +
                            std::to_string(inst_.C));
    }
    for (const auto& pu : active_) {
      if (pu.id == a->id) {
        throw ReferenceError("pu id " + std::to_string(a->id) +
                             " is already active");
      }
    }
    ActivePu pu;
    pu.id = a->id;
    pu.channel = a->channel;
    pu.global = !(a->position && inst_.geometry);
    if (a->position) {
      pu.position = *a->position;
      pu.radius = *a->radius;
    }
    active_.push_back(pu);
  } else if (const auto* d = std::get_if<scenario::PuDeparture>(&event.body)) {
    auto it = std::find_if(active_.begin(), active_.end(),
                           [d](const ActivePu& pu) { return pu.id == d->ref; });
    if (it == active_.end()) {
      throw ReferenceError("pu_departure for unknown id " +
                           std::to_string(d->ref));
    }
    active_.erase(it);
  } else if (const auto* c = std::get_if<scenario::DemandChange>(&event.body)) {
    if (c->sc < 0 || c->sc >= inst_.S) {
      throw ReferenceError("demand_change for unknown SC " +
                           std::to_string(c->sc + 1));
    }
    if (c->new_r > inst_.C) {
      throw ValidationError("demand " + std::to_string(c->new_r) +
                            " exceeds channels " + std::to_string(inst_.C));
    }
    inst_.R[c->sc] = c->new_r;
  }
}

som::ChannelMask Simulation::current_mask() const {
  auto mask = som::ChannelMask::all(inst_.S, inst_.C);
  for (const auto& pu : active_) {
    for (int n = 0; n < inst_.S; ++n) {
      if (!pu.global) {
        const auto& p = inst_.geometry->positions[n];
        const double dx = p[0] - pu.position[0];
        const double dy = p[1] - pu.position[1];
        if (dx * dx + dy * dy > pu.radius * pu.radius) continue;
      }
      mask.set(n, pu.channel, false);
    }
  }
  return mask;
}

StepRecord Simulation::resolve(long long tick) {
  const auto mask = current_mask();

  long long requested = 0;
  long long granted = 0;
  for (int n = 0; n < inst_.S; ++n) {
    requested += inst_.R[n];
    granted += std::min(inst_.R[n], mask.row_count(n));
  }

  StepRecord step;
  step.tick = tick;
  step.mask = mask;
  if (granted == 0) {
    step.assignment = model::AssignmentMatrix::zeros(inst_.S, inst_.C);
    step.converged = true;
    step.outer_steps = 0;
  } else {
    const Matrix* warm =
        (config_.warm_start && has_previous_) ? &previous_w_ : nullptr;
    auto result = som::solve_restricted(inst_, mask, config_.solver, warm);
    step.assignment = std::move(result.assignment);
    step.converged = result.converged;
    step.outer_steps = result.outer_steps;
    previous_w_ = std::move(result.final_state.W);
  }

  long long churn = 0;
  if (metrics_.empty()) {
    churn = 0;  // nothing to compare the first allocation against
  } else {
    for (int n = 0; n < inst_.S; ++n) {
      for (int m = 0; m < inst_.C; ++m) {
        if (assignment_.at(n, m) != step.assignment.at(n, m)) ++churn;
      }
    }
  }

  const auto P = model::build_proximity(inst_);
  MetricsRow row;
  row.tick = tick;
  row.cost = model::cost(step.assignment, P);
  row.satisfaction =
      requested == 0 ? 1.0
                     : static_cast<double>(granted) / requested;
  row.churn = churn;
  metrics_.push_back(row);

  assignment_ = step.assignment;
  has_previous_ = granted > 0 || has_previous_;
  return step;
}

SimResult run_simulation(const model::NetworkInstance& inst,
                         const std::vector<scenario::Event>& events,
                         const SimConfig& config) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].t < events[i - 1].t) {
      throw ValidationError("event stream is not time-ordered");
    }
  }

  Simulation sim(inst, config);
  SimResult out;
  std::size_t next = 0;

  auto apply_tick = [&](long long tick) {
    while (next < events.size() && events[next].t == tick) {
      sim.apply_event(events[next]);
      ++next;
    }
    out.steps.push_back(sim.resolve(tick));
  };

  apply_tick(0);
  while (next < events.size()) {
    apply_tick(events[next].t);
  }

  out.metrics = sim.metrics();
  return out;
}

std::string metrics_to_csv_text(const std::vector<MetricsRow>& metrics) {
  std::string out = "tick,cost,satisfaction,churn\n";
  char buf[128];
  for (const auto& r : metrics) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%.12g,%lld\n", r.tick, r.cost,
                  r.satisfaction, r.churn);
    out += buf;
  }
  return out;
}

std::string final_to_json_text(const SimResult& result) {
  if (result.steps.empty()) throw Error("simulation produced no steps");
  const auto& last = result.steps.back();
  const auto& row = result.metrics.back();
  json j;
  json rows = json::array();
  for (int n = 0; n < last.assignment.S; ++n) {
    json r = json::array();
    for (int m = 0; m < last.assignment.C; ++m) {
      r.push_back(last.assignment.at(n, m) ? 1 : 0);
    }
    rows.push_back(std::move(r));
  }
  j["assignment"] = std::move(rows);
  j["converged"] = last.converged;
  j["cost"] = row.cost;
  j["outer_steps"] = last.outer_steps;
  std::string s = j.dump(2);
  s.push_back('\n');
  return s;
}

}  // namespace somdsa::sim
