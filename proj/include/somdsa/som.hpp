#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "somdsa/matrix.hpp"
#include "somdsa/model.hpp"

namespace somdsa::som {

enum class Order { shuffled, fixed };

struct SolverConfig {
  std::uint64_t seed = 0;
  int n_epochs = 5;           // inner epochs per schedule step
  double tol = 1e-4;          // convergence threshold on max |dW|
  int max_outer_steps = 200;  // safety bound on schedule steps
  Order order = Order::shuffled;
  double sigma0 = 9.0;
  double alpha_decay = 0.95;
  double sigma_decay = 0.95;
};

// Competitive-solver state. W[n][m] reads as the probability that SC n is
// granted channel m; every projection restores row sums to the demands.
struct SomState {
  Matrix W{0, 0};
  int t = 0;
  double alpha = 0.0;
  double sigma = 0.0;
  std::vector<int> eta;        // current neighborhood sizes, >= demand
  std::vector<long long> rho;  // static difficulty weights
};

// Per-SC allowed-channel sets used by the restricted solver. A cleared cell
// pins W to zero and removes the channel from neighborhoods and decoding.
struct ChannelMask {
  int S = 0;
  int C = 0;
  std::vector<std::uint8_t> cells;

  static ChannelMask all(int S, int C);
  bool at(int n, int m) const {
    return cells[static_cast<std::size_t>(n) * C + m] != 0;
  }
  void set(int n, int m, bool allowed) {
    cells[static_cast<std::size_t>(n) * C + m] = allowed ? 1 : 0;
  }
  int row_count(int n) const;
  bool operator==(const ChannelMask&) const = default;
};

// rho[i] = sum_j R[j] * max_m I[i][j][m]; zero diagonal keeps self terms out.
std::vector<long long> difficulty_rho(const model::NetworkInstance& inst);

// W = R[n]/C per row, t = 0, alpha = min positive demand, sigma = sigma0,
// eta[j] = R[j] + floor(S/5). Throws ConfigError when total demand is zero.
SomState init_weights(const model::NetworkInstance& inst,
                      const SolverConfig& config = {});

// Y for presenting SC sc against candidate channel: interference pressure
// from every other SC's current soft assignment, decayed by separation.
double objective(const Matrix& W, const model::ProximityTensor& P, int sc,
                 int channel);
std::vector<double> objective_row(const Matrix& W,
                                  const model::ProximityTensor& P, int sc);

// Argmin over the Y row; ties go to the lowest channel index.
int select_winner(const std::vector<double>& y);

// min(eta, C) channels ordered by ascending (Y, index); front is the winner.
std::vector<int> neighborhood(const std::vector<double>& y, int eta);

// alpha * (rho/demand) * exp(-|y_winner - y_k| / sigma), clamped to [0, 1]
// so W += a*(1-W) cannot leave the unit box.
double effective_alpha(double alpha, double sigma, long long rho, int demand,
                       double y_winner, double y_k);

// Reinforce row sc at the neighborhood channels; other cells untouched.
void apply_update(SomState& state, int sc, int demand,
                  const std::vector<int>& hood, const std::vector<double>& y);

// Orthogonal projection of one row onto sum(row) = target (uniform shift).
void shift_to_plane(std::span<double> row, double target);

// Clip to [0,1] and spread the residual over unclamped entries until the

// row meets both box and plane; at most row-length passes are needed.
void repair_box(std::span<double> row, double target);

// shift_to_plane then repair_box. Throws InfeasibleError when target exceeds
// the row length (box and plane cannot intersect).
void project_row(std::span<double> row, double target);

// Project every row to its demand. With a mask, only allowed cells carry
// weight; masked cells are pinned to zero.
void project_rows(Matrix& W, const std::vector<int>& targets);
void project_rows(Matrix& W, const std::vector<int>& targets,
                  const ChannelMask& mask);

// Dense reference projector onto {w : A w = b} where A is the S x (S*C)
// block matrix with row n covering columns n*C .. n*C+C-1 and b the demand
// vector. Built from the generic pseudo-inverse so it cross-checks the
// closed-form row shift without sharing code with it.
class ConstraintPlane {
 public:
  ConstraintPlane(int S, int C, const std::vector<int>& demands);

  int rows() const { return S_; }
  int cols() const { return S_ * C_; }
  double a(int r, int c) const {
    return a_[static_cast<std::size_t>(r) * S_ * C_ + c];
  }
  const std::vector<double>& b() const { return b_; }

  // w - A^T (A A^T)^{-1} (A w - b)
  std::vector<double> project(const std::vector<double>& w) const;
  // A w - b
  std::vector<double> residual(const std::vector<double>& w) const;
  // squared distance to the plane; zero iff A w = b
  double energy(const std::vector<double>& w) const;

 private:
  int S_;
  int C_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> minv_;  // (A A^T)^{-1}, S x S
};

// Top demands[n] channels per row by weight, ties to the lowest index.
// Masked channels are never candidates.
model::AssignmentMatrix decode_assignment(const Matrix& W,
                                          const std::vector<int>& demands);
model::AssignmentMatrix decode_assignment(const Matrix& W,
                                          const std::vector<int>& demands,
                                          const ChannelMask& mask);

// One presentation pass: for each SC in order, compute Y, pick winner and
// neighborhood of size eta[sc], reinforce, re-project the row. Returns the
// largest absolute weight change over the pass.
double run_epoch(SomState& state, const std::vector<int>& demands,
                 const model::ProximityTensor& P, const std::vector<int>& order,
                 const ChannelMask* mask = nullptr);

// alpha and sigma decay geometrically; eta decrements toward the demand
// floor; t advances.
void step_schedules(SomState& state, const std::vector<int>& demands,
                    const SolverConfig& config);

struct TraceRow {
  int outer_step = 0;
  int epoch = 0;
  double max_delta_w = 0.0;
  long long decoded_cost = 0;
  double alpha = 0.0;
  double sigma = 0.0;
};

struct SolveResult {
  model::AssignmentMatrix assignment;
  long long cost = 0;
  bool converged = false;
  int outer_steps = 0;
  std::vector<TraceRow> trace;
  SomState final_state;
};

// Full run: init, epochs until quiet, schedule steps until every eta hits
// its demand, then decode. Non-convergence within max_outer_steps is
// reported via the flag, not an error.
SolveResult solve(const model::NetworkInstance& inst,
                  const SolverConfig& config);

// Same loop over the masked problem: demands are first clamped to each
// row's allowed-channel count. warm_start, when given, seeds W from a
// previous solve (masked cells zeroed, rows re-projected) instead of the
// uniform init; schedules always restart.
SolveResult solve_restricted(const model::NetworkInstance& inst,
                             const ChannelMask& mask,
                             const SolverConfig& config,
                             const Matrix* warm_start = nullptr);

std::string result_to_json_text(const SolveResult& result);
std::string trace_to_csv_text(const std::vector<TraceRow>& trace);

}  // namespace somdsa::som
