#pragma once

#include <cstdint>
#include <string>

#include "somdsa/model.hpp"

namespace somdsa::oracle {

enum class Method { exact, greedy, random, som };

const char* method_name(Method method);

struct SolveReport {
  model::AssignmentMatrix assignment;
  long long cost = 0;
  Method method = Method::exact;
  double elapsed_ms = 0.0;
  std::string fingerprint;
};

// Exhaustive search over every feasible assignment, each row's channel
// subsets visited in lexicographic order and the first optimum kept, so the
// witness is canonical. Partial assignments are pruned against the best
// complete cost. Throws GuardError when the space exceeds 1e7 assignments.
SolveReport exact_solve(const model::NetworkInstance& inst);

// SCs in descending difficulty order each take the channels with the
// smallest marginal cost against grants fixed so far.
SolveReport greedy_solve(const model::NetworkInstance& inst);

// Uniform random feasible assignment; the noise floor for comparisons.
SolveReport random_solve(const model::NetworkInstance& inst,
                         std::uint64_t seed);

// Same schema as the solver's result JSON plus a "method" field. Timings
// stay out of the file so repeat runs are byte-identical.
std::string report_to_json_text(const SolveReport& report);

}  // namespace somdsa::oracle
