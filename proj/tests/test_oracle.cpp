#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "somdsa/errors.hpp"
#include "somdsa/model.hpp"
#include "somdsa/oracle.hpp"
#include "somdsa/rng.hpp"
#include "test_util.hpp"

using namespace somdsa;
using testutil::make_instance;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("exact finds the separating optimum with a canonical witness") {
  auto inst = make_instance(2, 2, {1, 1}, {{0, 1}});
  const auto rep = oracle::exact_solve(inst);
  CHECK(rep.cost == 0);
  CHECK(rep.assignment.at(0, 0));
  CHECK(!rep.assignment.at(0, 1));
  CHECK(!rep.assignment.at(1, 0));
  CHECK(rep.assignment.at(1, 1));
  CHECK(rep.method == oracle::Method::exact);
  CHECK(rep.fingerprint == model::instance_fingerprint(inst));
}

TEST_CASE("exact on a quiet instance keeps the first enumeration") {
  auto inst = make_instance(2, 3, {2, 1});
  const auto rep = oracle::exact_solve(inst);
  CHECK(rep.cost == 0);
  // First subsets in order: {1,2} for SC1, {1} for SC2.
  CHECK(rep.assignment.at(0, 0));
  CHECK(rep.assignment.at(0, 1));
  CHECK(!rep.assignment.at(0, 2));
  CHECK(rep.assignment.at(1, 0));
}

TEST_CASE("exact prices a forced collision") {
  auto inst = make_instance(2, 1, {1, 1}, {{0, 1}});
  const auto rep = oracle::exact_solve(inst);
  CHECK(rep.cost == 2);
}

TEST_CASE("exact rejects oversized search spaces") {
  auto inst = make_instance(4, 20, {8, 8, 8, 8});
  CHECK_THROWS_AS(oracle::exact_solve(inst), GuardError);
}

TEST_CASE("exact rejects infeasible demand") {
  auto inst = make_instance(1, 2, {3});
  CHECK_THROWS_AS(oracle::exact_solve(inst), InfeasibleError);
}

TEST_CASE("greedy spreads a pair and fills quiet instances low-first") {
  auto pair = make_instance(2, 2, {1, 1}, {{0, 1}});
  CHECK(oracle::greedy_solve(pair).cost == 0);

  auto quiet = make_instance(2, 4, {2, 1});
  const auto rep = oracle::greedy_solve(quiet);
  CHECK(rep.cost == 0);
  CHECK(rep.assignment.at(0, 0));
  CHECK(rep.assignment.at(0, 1));
  CHECK(rep.assignment.at(1, 0));
}

TEST_CASE("greedy prices a clique that cannot be colored") {
  auto clique = make_instance(3, 2, {1, 1, 1}, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(oracle::greedy_solve(clique).cost == 2);
  CHECK(oracle::exact_solve(clique).cost == 2);
}

TEST_CASE("random solves are feasible and seed-deterministic") {
  auto inst = make_instance(3, 4, {2, 1, 3}, {{0, 1}});
  const auto a = oracle::random_solve(inst, 9);
  const auto b = oracle::random_solve(inst, 9);
  CHECK(a.assignment == b.assignment);
  for (int n = 0; n < 3; ++n) CHECK(a.assignment.row_sum(n) == inst.R[n]);

  bool differs = false;
  for (std::uint64_t s = 0; s < 50 && !differs; ++s) {
    differs = !(oracle::random_solve(inst, s).assignment == a.assignment);
  }
  CHECK(differs);
}

TEST_CASE("methods sandwich on random small instances") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int S = 1 + static_cast<int>(rng.below(3));
    const int C = 1 + static_cast<int>(rng.below(4));
    std::vector<int> R(S);
    for (int n = 0; n < S; ++n) {
      R[n] = 1 + static_cast<int>(rng.below(std::min(2, C)));
    }
    auto inst = make_instance(S, C, R);
    for (int n = 0; n < S; ++n) {
      for (int k = n + 1; k < S; ++k) {
        if (rng.below(2) == 1) {
          for (int m = 0; m < C; ++m) {
            inst.I.at(n, k, m) = 1;
            inst.I.at(k, n, m) = 1;
          }
        }
      }
    }
    const auto exact = oracle::exact_solve(inst);
    const auto greedy = oracle::greedy_solve(inst);
    long long worst = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      worst = std::max(worst, oracle::random_solve(inst, s).cost);
    }
    CHECK(exact.cost <= greedy.cost);
    CHECK(greedy.cost <= worst);
  }
}

TEST_CASE("exact cost is invariant under SC relabeling") {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const int S = 2 + static_cast<int>(rng.below(2));
    const int C = 2 + static_cast<int>(rng.below(3));
    std::vector<int> R(S);
    for (int n = 0; n < S; ++n) {
      R[n] = 1 + static_cast<int>(rng.below(2));
    }
    auto inst = make_instance(S, C, R);
    for (int n = 0; n < S; ++n) {
      for (int k = n + 1; k < S; ++k) {
        const int sev = static_cast<int>(rng.below(3));
        for (int m = 0; m < C; ++m) {
          inst.I.at(n, k, m) = sev;
          inst.I.at(k, n, m) = sev;
        }
      }
    }

    std::vector<int> perm(S);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    auto relabeled = make_instance(S, C, std::vector<int>(S, 0));
    for (int n = 0; n < S; ++n) {
      relabeled.R[perm[n]] = inst.R[n];
      for (int k = 0; k < S; ++k) {
        for (int m = 0; m < C; ++m) {
          relabeled.I.at(perm[n], perm[k], m) = inst.I.at(n, k, m);
        }
      }
    }
    CHECK(oracle::exact_solve(inst).cost ==
          oracle::exact_solve(relabeled).cost);
  }
}

TEST_CASE("report JSON carries the method and no timing") {
  auto inst = make_instance(2, 2, {1, 1}, {{0, 1}});
  const auto rep = oracle::exact_solve(inst);
  const auto text = oracle::report_to_json_text(rep);
  CHECK(text.find("\"method\": \"exact\"") != std::string::npos);
  CHECK(text.find("elapsed") == std::string::npos);
  CHECK(text.find("\"cost\": 0") != std::string::npos);
}

TEST_SUITE_END();
