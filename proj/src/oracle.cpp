#include "somdsa/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <vector>

#include "json.hpp"
#include "somdsa/errors.hpp"
#include "somdsa/rng.hpp"
#include "somdsa/som.hpp"

namespace somdsa::oracle {

using nlohmann::json;

const char* method_name(Method method) {
  switch (method) {
    case Method::exact: return "exact";
    case Method::greedy: return "greedy";
    case Method::random: return "random";
    case Method::som: return "som";
  }
  return "unknown";
}

namespace {

constexpr double kSearchGuard = 1e7;

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

void check_feasible(const model::NetworkInstance& inst) {
  for (int n = 0; n < inst.S; ++n) {
    if (inst.R[n] > inst.C) {
      throw InfeasibleError("demand " + std::to_string(inst.R[n]) +
                            " exceeds channels " + std::to_string(inst.C) +
                            " at SC " + std::to_string(n + 1));
    }
  }
}

// Pairwise cost the channels of SC n add against every already-granted SC,
// counting both ordered directions. Within-row terms vanish (zero diagonal).
long long added_cost(const model::ProximityTensor& P,
                     const std::vector<std::vector<int>>& grants, int n,
                     const std::vector<int>& channels) {
  long long total = 0;
  for (int k = 0; k < n; ++k) {
    for (int m : channels) {
      for (int j : grants[k]) {
        const int d = std::abs(m - j);
        total += P.at(n, k, d) + P.at(k, n, d);
      }
    }
  }
  return total;
}

// Advance comb to the next k-subset of {0..c-1} in lexicographic order.
bool next_combination(std::vector<int>& comb, int c) {
  const int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[i] < c - (k - i)) {
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

struct ExactSearch {
  const model::NetworkInstance& inst;
  const model::ProximityTensor& P;
  std::vector<std::vector<int>> grants;
  std::vector<long long> prefix;  // cost of grants[0..n-1]
  long long best = std::numeric_limits<long long>::max();
  std::vector<std::vector<int>> best_grants;

  void dfs(int n) {
    if (n == inst.S) {
      if (prefix[n] < best) {
        best = prefix[n];
        best_grants = grants;
      }
      return;
    }
    std::vector<int> comb(inst.R[n]);
    std::iota(comb.begin(), comb.end(), 0);
    do {
      const long long add = added_cost(P, grants, n, comb);
      if (prefix[n] + add >= best) continue;
      grants[n] = comb;
      prefix[n + 1] = prefix[n] + add;
      dfs(n + 1);
    } while (next_combination(comb, inst.C));
    grants[n].clear();
  }
};

model::AssignmentMatrix to_matrix(const std::vector<std::vector<int>>& grants,
                                  int S, int C) {
  auto a = model::AssignmentMatrix::zeros(S, C);
  for (int n = 0; n < S; ++n) {
    for (int m : grants[n]) a.set(n, m, true);
  }
  return a;
}

SolveReport finish(const model::NetworkInstance& inst, Method method,
                   model::AssignmentMatrix assignment,
                   std::chrono::steady_clock::time_point start) {
  const auto P = model::build_proximity(inst);
  SolveReport rep;
  rep.assignment = std::move(assignment);
  rep.cost = model::cost(rep.assignment, P);
  rep.method = method;
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  rep.fingerprint = model::instance_fingerprint(inst);
  return rep;
}

}  // namespace

SolveReport exact_solve(const model::NetworkInstance& inst) {
  const auto start = std::chrono::steady_clock::now();
  check_feasible(inst);

  double space = 1.0;
  for (int n = 0; n < inst.S; ++n) space *= binom(inst.C, inst.R[n]);
  if (space > kSearchGuard) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", space);
    throw GuardError("search space of " + std::string(buf) +
                     " assignments exceeds the 1e7 guard");
  }

  const auto P = model::build_proximity(inst);
  ExactSearch search{inst, P, {}, {}, std::numeric_limits<long long>::max(),
                     {}};
  search.grants.resize(inst.S);
  search.prefix.assign(inst.S + 1, 0);
  // A full first branch always completes (no pruning can fire before a best
  // exists), so best_grants is populated.
  search.dfs(0);

  return finish(inst, Method::exact,
                to_matrix(search.best_grants, inst.S, inst.C), start);
}

SolveReport greedy_solve(const model::NetworkInstance& inst) {
  const auto start = std::chrono::steady_clock::now();
  check_feasible(inst);

  const auto P = model::build_proximity(inst);
  const auto rho = som::difficulty_rho(inst);
  std::vector<int> order(inst.S);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&rho](int a, int b) {
    if (rho[a] != rho[b]) return rho[a] > rho[b];
    return a < b;
  });

  std::vector<std::vector<int>> grants(inst.S);
  std::vector<bool> placed(inst.S, false);
  for (int n : order) {
    // Marginal cost is separable per channel: within-row pairs cost nothing.
    std::vector<long long> marginal(inst.C, 0);
    for (int m = 0; m < inst.C; ++m) {
      for (int k = 0; k < inst.S; ++k) {
        if (!placed[k]) continue;
        for (int j : grants[k]) {
          const int d = std::abs(m - j);
          marginal[m] += P.at(n, k, d) + P.at(k, n, d);
        }
      }
    }
    std::vector<int> idx(inst.C);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&marginal](int a, int b) {
      if (marginal[a] != marginal[b]) return marginal[a] < marginal[b];
      return a < b;
    });
    grants[n].assign(idx.begin(), idx.begin() + inst.R[n]);
    std::sort(grants[n].begin(), grants[n].end());
    placed[n] = true;
  }

  return finish(inst, Method::greedy, to_matrix(grants, inst.S, inst.C),
                start);
}

SolveReport random_solve(const model::NetworkInstance& inst,
                         std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  check_feasible(inst);

  Rng rng(seed);
  auto a = model::AssignmentMatrix::zeros(inst.S, inst.C);
  std::vector<int> pool(inst.C);
  for (int n = 0; n < inst.S; ++n) {
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < inst.R[n]; ++i) {
      const int j = i + static_cast<int>(rng.below(inst.C - i));
      std::swap(pool[i], pool[j]);
      a.set(n, pool[i], true);
    }
  }

  return finish(inst, Method::random, std::move(a), start);
}

std::string report_to_json_text(const SolveReport& report) {
  json j;
  json rows = json::array();
  for (int n = 0; n < report.assignment.S; ++n) {
    json row = json::array();
    for (int m = 0; m < report.assignment.C; ++m) {
      row.push_back(report.assignment.at(n, m) ? 1 : 0);
    }
    rows.push_back(std::move(row));
  }
  j["assignment"] = std::move(rows);
  j["cost"] = report.cost;
  j["converged"] = true;
  j["method"] = method_name(report.method);
  j["outer_steps"] = 0;
  std::string s = j.dump(2);
  s.push_back('\n');
  return s;
}

}  // namespace somdsa::oracle
