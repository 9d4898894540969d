#include "somdsa/som.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "json.hpp"
#include "somdsa/errors.hpp"
#include "somdsa/rng.hpp"

namespace somdsa::som {

using nlohmann::json;

ChannelMask ChannelMask::all(int S, int C) {
  ChannelMask m;
  m.S = S;
  m.C = C;
  m.cells.assign(static_cast<std::size_t>(S) * C, 1);
  return m;
}

int ChannelMask::row_count(int n) const {
  int total = 0;
  for (int m = 0; m < C; ++m) total += at(n, m) ? 1 : 0;
  return total;
}

namespace {

std::vector<long long> rho_for(const model::InterferenceTensor& I,
                               const std::vector<int>& demands) {
  std::vector<long long> rho(I.S, 0);
  for (int i = 0; i < I.S; ++i) {
    for (int j = 0; j < I.S; ++j) {
      int sev = 0;
      for (int m = 0; m < I.C; ++m) sev = std::max(sev, I.at(i, j, m));
      rho[i] += static_cast<long long>(demands[j]) * sev;
    }
  }
  return rho;
}

void check_config(const SolverConfig& config) {
  if (config.n_epochs < 1) throw ConfigError("n_epochs must be at least 1");
  if (!(config.tol > 0.0)) throw ConfigError("tol must be positive");
  if (config.max_outer_steps < 1) {
    throw ConfigError("max_outer_steps must be at least 1");
  }
}

SomState make_state(const model::NetworkInstance& inst,
                    const std::vector<int>& demands, const ChannelMask* mask,
                    const SolverConfig& config) {
  int min_pos = std::numeric_limits<int>::max();
  for (int r : demands) {
    if (r > 0) min_pos = std::min(min_pos, r);
  }
  if (min_pos == std::numeric_limits<int>::max()) {
    throw ConfigError("total demand is zero: nothing to allocate");
  }

  SomState st;
  st.W = Matrix(inst.S, inst.C);
  for (int n = 0; n < inst.S; ++n) {
    const int avail = mask ? mask->row_count(n) : inst.C;
    const double w0 = avail > 0 ? static_cast<double>(demands[n]) / avail : 0.0;
    for (int m = 0; m < inst.C; ++m) {
      st.W(n, m) = (!mask || mask->at(n, m)) ? w0 : 0.0;
    }
  }
  st.t = 0;
  st.alpha = static_cast<double>(min_pos);
  st.sigma = config.sigma0;
  st.eta.resize(inst.S);
  for (int n = 0; n < inst.S; ++n) st.eta[n] = demands[n] + inst.S / 5;
  st.rho = rho_for(inst.I, demands);
  return st;
}

std::vector<int> hood_over(const std::vector<double>& y, int eta,
                           const std::vector<int>& candidates) {
  std::vector<int> idx = candidates;
  std::sort(idx.begin(), idx.end(), [&y](int a, int b) {
    if (y[a] != y[b]) return y[a] < y[b];
    return a < b;
  });
  const int take = std::min<int>(eta, static_cast<int>(idx.size()));
  idx.resize(take);
  return idx;
}

void project_row_masked(Matrix& W, int n, double target,
                        const ChannelMask& mask) {
  std::vector<double> vals;
  std::vector<int> where;
  for (int m = 0; m < W.cols(); ++m) {
    if (mask.at(n, m)) {
      vals.push_back(W(n, m));
      where.push_back(m);
    } else {
      W(n, m) = 0.0;
    }
  }
  if (vals.empty()) {
    if (target > 1e-9) {
      throw InfeasibleError("row demand " + std::to_string(target) +
                            " with no allowed channels");
    }
    return;
  }
  project_row(vals, target);
  for (std::size_t i = 0; i < where.size(); ++i) W(n, where[i]) = vals[i];
}

model::AssignmentMatrix decode_impl(const Matrix& W,
                                    const std::vector<int>& demands,
                                    const ChannelMask* mask) {
  const int S = W.rows();
  const int C = W.cols();
  auto out = model::AssignmentMatrix::zeros(S, C);
  for (int n = 0; n < S; ++n) {
    std::vector<int> idx;
    for (int m = 0; m < C; ++m) {
      if (!mask || mask->at(n, m)) idx.push_back(m);
    }
    if (demands[n] > static_cast<int>(idx.size())) {
      throw InfeasibleError("row demand " + std::to_string(demands[n]) +
                            " exceeds " + std::to_string(idx.size()) +
                            " decodable channels");
    }
    std::sort(idx.begin(), idx.end(), [&W, n](int a, int b) {
      if (W(n, a) != W(n, b)) return W(n, a) > W(n, b);
      return a < b;
    });
    for (int i = 0; i < demands[n]; ++i) out.set(n, idx[i], true);
  }
  return out;
}

SolveResult solve_impl(const model::NetworkInstance& inst,
                       const std::vector<int>& demands,
                       const ChannelMask* mask, const Matrix* warm_start,
                       const SolverConfig& config) {
  check_config(config);
  const auto P = model::build_proximity(inst);

  SomState st = make_state(inst, demands, mask, config);
  if (warm_start) {
    if (warm_start->rows() != inst.S || warm_start->cols() != inst.C) {
      throw ShapeError("warm start shape does not match instance");
    }
    st.W = *warm_start;
    if (mask) {
      for (int n = 0; n < inst.S; ++n) {
        project_row_masked(st.W, n, demands[n], *mask);
      }
    } else {
      project_rows(st.W, demands);
    }
  }

  std::vector<int> active;
  for (int n = 0; n < inst.S; ++n) {
    if (demands[n] > 0) active.push_back(n);
  }

  Rng rng(config.seed);
  std::vector<TraceRow> trace;
  double delta = std::numeric_limits<double>::infinity();
  int outer = 0;
  bool converged = false;

  while (outer < config.max_outer_steps) {
    for (int e = 0; e < config.n_epochs; ++e) {
      std::vector<int> order = active;
      if (config.order == Order::shuffled) rng.shuffle(order);
      delta = run_epoch(st, demands, P, order, mask);
      const auto decoded = decode_impl(st.W, demands, mask);
      trace.push_back({outer, e, delta, model::cost(decoded, P), st.alpha,
                       st.sigma});
      if (delta < config.tol) break;
    }
    ++outer;
    bool at_floor = true;
    for (int n = 0; n < inst.S; ++n) {
      if (st.eta[n] != demands[n]) at_floor = false;
    }
    if (at_floor && delta < config.tol) {
      converged = true;
      break;
    }
    step_schedules(st, demands, config);
  }

  SolveResult res;
  res.assignment = decode_impl(st.W, demands, mask);
  res.cost = model::cost(res.assignment, P);
  res.converged = converged;
  res.outer_steps = outer;
  res.trace = std::move(trace);
  res.final_state = std::move(st);
  return res;
}

}  // namespace

std::vector<long long> difficulty_rho(const model::NetworkInstance& inst) {
  return rho_for(inst.I, inst.R);
}

SomState init_weights(const model::NetworkInstance& inst,
                      const SolverConfig& config) {
  return make_state(inst, inst.R, nullptr, config);
}

double objective(const Matrix& W, const model::ProximityTensor& P, int sc,
                 int channel) {
  double y = 0.0;
  for (int k = 0; k < P.S; ++k) {
    for (int j = 0; j < W.cols(); ++j) {
      y += P.at(sc, k, std::abs(channel - j)) * W(k, j);
    }
  }
  return y;
}

std::vector<double> objective_row(const Matrix& W,
                                  const model::ProximityTensor& P, int sc) {
  std::vector<double> y(W.cols());
  for (int m = 0; m < W.cols(); ++m) y[m] = objective(W, P, sc, m);
  return y;
}

int select_winner(const std::vector<double>& y) {
  return static_cast<int>(std::min_element(y.begin(), y.end()) - y.begin());
}

std::vector<int> neighborhood(const std::vector<double>& y, int eta) {
  std::vector<int> idx(y.size());
  std::iota(idx.begin(), idx.end(), 0);
  return hood_over(y, eta, idx);
}

double effective_alpha(double alpha, double sigma, long long rho, int demand,
                       double y_winner, double y_k) {
  const double raw = alpha * (static_cast<double>(rho) / demand) *
                     std::exp(-std::abs(y_winner - y_k) / sigma);
  return std::clamp(raw, 0.0, 1.0);
}

void apply_update(SomState& state, int sc, int demand,
                  const std::vector<int>& hood, const std::vector<double>& y) {
  if (hood.empty()) return;
  const double y_winner = y[hood.front()];
  for (int k : hood) {
    const double a = effective_alpha(state.alpha, state.sigma, state.rho[sc],
                                     demand, y_winner, y[k]);
    state.W(sc, k) += a * (1.0 - state.W(sc, k));
  }
}

void shift_to_plane(std::span<double> row, double target) {
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  const double shift = (target - sum) / static_cast<double>(row.size());
  for (double& v : row) v += shift;
}

void repair_box(std::span<double> row, double target) {
  const int n = static_cast<int>(row.size());
  for (int pass = 0; pass < n; ++pass) {
    for (double& v : row) v = std::clamp(v, 0.0, 1.0);
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    const double resid = target - sum;
    if (std::abs(resid) <= 1e-12) return;
    std::vector<int> open;
    for (int m = 0; m < n; ++m) {
      if (resid > 0 ? row[m] < 1.0 : row[m] > 0.0) open.push_back(m);
    }
    if (open.empty()) return;
    const double share = resid / static_cast<double>(open.size());
    for (int m : open) row[m] += share;
  }
  for (double& v : row) v = std::clamp(v, 0.0, 1.0);
}

void project_row(std::span<double> row, double target) {
  if (target < -1e-9 ||
      target > static_cast<double>(row.size()) + 1e-9) {
    throw InfeasibleError("row demand " + std::to_string(target) +
                          " cannot fit in " + std::to_string(row.size()) +
                          " unit cells");
  }
  shift_to_plane(row, target);
  repair_box(row, target);
}

void project_rows(Matrix& W, const std::vector<int>& targets) {
  for (int n = 0; n < W.rows(); ++n) {
    project_row(W.row(n), static_cast<double>(targets[n]));
  }
}

void project_rows(Matrix& W, const std::vector<int>& targets,
                  const ChannelMask& mask) {
  for (int n = 0; n < W.rows(); ++n) {
    project_row_masked(W, n, static_cast<double>(targets[n]), mask);
  }
}

ConstraintPlane::ConstraintPlane(int S, int C, const std::vector<int>& demands)
    : S_(S), C_(C) {
  if (static_cast<int>(demands.size()) != S) {
    throw ShapeError("demand vector length does not match row count");
  }
  a_.assign(static_cast<std::size_t>(S) * S * C, 0.0);
  for (int n = 0; n < S; ++n) {
    for (int m = 0; m < C; ++m) {
      a_[static_cast<std::size_t>(n) * S * C + n * C + m] = 1.0;
    }
  }
  b_.assign(demands.begin(), demands.end());

  // M = A A^T, inverted by Gauss-Jordan with partial pivoting.
  std::vector<double> m(static_cast<std::size_t>(S) * S, 0.0);
  for (int r = 0; r < S; ++r) {
    for (int c = 0; c < S; ++c) {
      double dot = 0.0;
      for (int k = 0; k < S * C; ++k) dot += a(r, k) * a(c, k);
      m[static_cast<std::size_t>(r) * S + c] = dot;
    }
  }
  minv_.assign(static_cast<std::size_t>(S) * S, 0.0);
  for (int r = 0; r < S; ++r) minv_[static_cast<std::size_t>(r) * S + r] = 1.0;
  auto mat = [&m, S](int r, int c) -> double& {
    return m[static_cast<std::size_t>(r) * S + c];
  };
  auto inv = [this, S](int r, int c) -> double& {
    return minv_[static_cast<std::size_t>(r) * S + c];
  };
  for (int col = 0; col < S; ++col) {
    int pivot = col;
    for (int r = col + 1; r < S; ++r) {
      if (std::abs(mat(r, col)) > std::abs(mat(pivot, col))) pivot = r;
    }
    if (std::abs(mat(pivot, col)) < 1e-12) {
      throw Error("constraint matrix is singular");
    }
    if (pivot != col) {
      for (int c = 0; c < S; ++c) {
        std::swap(mat(pivot, c), mat(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    }
    const double p = mat(col, col);
    for (int c = 0; c < S; ++c) {
      mat(col, c) /= p;
      inv(col, c) /= p;
    }
    for (int r = 0; r < S; ++r) {
      if (r == col) continue;
      const double f = mat(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < S; ++c) {
        mat(r, c) -= f * mat(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
}

std::vector<double> ConstraintPlane::residual(
    const std::vector<double>& w) const {
  if (static_cast<int>(w.size()) != cols()) {
    throw ShapeError("flattened weight length does not match plane");
  }
  std::vector<double> r(S_, 0.0);
  for (int n = 0; n < S_; ++n) {
    double dot = 0.0;
    for (int k = 0; k < cols(); ++k) dot += a(n, k) * w[k];
    r[n] = dot - b_[n];
  }
  return r;
}

std::vector<double> ConstraintPlane::project(
    const std::vector<double>& w) const {
  const auto r = residual(w);
  std::vector<double> y(S_, 0.0);
  for (int n = 0; n < S_; ++n) {
    double dot = 0.0;
    for (int k = 0; k < S_; ++k) {
      dot += minv_[static_cast<std::size_t>(n) * S_ + k] * r[k];
    }
    y[n] = dot;
  }
  std::vector<double> out = w;
  for (int k = 0; k < cols(); ++k) {
    double dot = 0.0;
    for (int n = 0; n < S_; ++n) dot += a(n, k) * y[n];
    out[k] -= dot;
  }
  return out;
}

double ConstraintPlane::energy(const std::vector<double>& w) const {
  const auto p = project(w);
  double e = 0.0;
  for (int k = 0; k < cols(); ++k) {
    const double d = w[k] - p[k];
    e += d * d;
  }
  return e;
}

model::AssignmentMatrix decode_assignment(const Matrix& W,
                                          const std::vector<int>& demands) {
  return decode_impl(W, demands, nullptr);
}

model::AssignmentMatrix decode_assignment(const Matrix& W,
                                          const std::vector<int>& demands,
                                          const ChannelMask& mask) {
  return decode_impl(W, demands, &mask);
}

double run_epoch(SomState& state, const std::vector<int>& demands,
                 const model::ProximityTensor& P, const std::vector<int>& order,
                 const ChannelMask* mask) {
  const Matrix before = state.W;
  for (int sc : order) {
    const auto y = objective_row(state.W, P, sc);
    std::vector<int> candidates;
    for (int m = 0; m < state.W.cols(); ++m) {
      if (!mask || mask->at(sc, m)) candidates.push_back(m);
    }
    const auto hood = hood_over(y, state.eta[sc], candidates);
    apply_update(state, sc, demands[sc], hood, y);
    if (mask) {
      project_row_masked(state.W, sc, static_cast<double>(demands[sc]), *mask);
    } else {
      project_row(state.W.row(sc), static_cast<double>(demands[sc]));
    }
  }
  return before.max_abs_diff(state.W);
}

void step_schedules(SomState& state, const std::vector<int>& demands,
                    const SolverConfig& config) {
  state.alpha *= config.alpha_decay;
  state.sigma *= config.sigma_decay;
  for (std::size_t n = 0; n < state.eta.size(); ++n) {
    state.eta[n] = std::max(demands[n], state.eta[n] - 1);
  }
  ++state.t;
}

SolveResult solve(const model::NetworkInstance& inst,
                  const SolverConfig& config) {
  return solve_impl(inst, inst.R, nullptr, nullptr, config);
}

SolveResult solve_restricted(const model::NetworkInstance& inst,
                             const ChannelMask& mask,
                             const SolverConfig& config,
                             const Matrix* warm_start) {
  if (mask.S != inst.S || mask.C != inst.C) {
    throw ShapeError("mask shape does not match instance");
  }
  std::vector<int> demands(inst.S);
  for (int n = 0; n < inst.S; ++n) {
    demands[n] = std::min(inst.R[n], mask.row_count(n));
  }
  return solve_impl(inst, demands, &mask, warm_start, config);
}

std::string result_to_json_text(const SolveResult& result) {
  json j;
  json rows = json::array();
  for (int n = 0; n < result.assignment.S; ++n) {
    json row = json::array();
    for (int m = 0; m < result.assignment.C; ++m) {
      row.push_back(result.assignment.at(n, m) ? 1 : 0);
    }
    rows.push_back(std::move(row));
  }
  j["assignment"] = std::move(rows);
  j["cost"] = result.cost;
  j["converged"] = result.converged;
  j["outer_steps"] = result.outer_steps;
  std::string s = j.dump(2);
  s.push_back('\n');
  return s;
}

std::string trace_to_csv_text(const std::vector<TraceRow>& trace) {
  std::string out = "outer_step,epoch,max_delta_w,decoded_cost,alpha,sigma\n";
  char buf[160];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.12g,%lld,%.12g,%.12g\n",
                  r.outer_step, r.epoch, r.max_delta_w, r.decoded_cost,
                  r.alpha, r.sigma);
    out += buf;
  }
  return out;
}

}  // namespace somdsa::som
