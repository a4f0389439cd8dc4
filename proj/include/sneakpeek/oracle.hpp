#pragma once

#include "sneakpeek/scheduling.hpp"

namespace sneakpeek {

struct OracleBudget {
  long long max_candidates = 10'000'000;
};

struct OracleResult {
  Schedule schedule;
  double utility = 0.0;
  long long candidate_count = 0;
};

// Enumerates every request permutation x model assignment and returns a
// maximizer of the mean planned utility (ties: lexicographically smallest
// encoding). Throws BudgetExceeded when the candidate count would exceed the
// budget.
OracleResult exact_global(const PlanView& plan, LatencyMode mode,
                          const OracleBudget& budget);

// Convenience wrapper: profiled accuracies, no short-circuit candidates.
OracleResult exact_global(const std::vector<Request>& requests, const AppMap& apps,
                          LatencyMode mode, const OracleBudget& budget);

// Enumerates contiguous group orderings x one-model-per-group assignments.
// Member order inside each group is taken as given (the callers pass
// priority-ordered groups, matching the greedy scheduler's search space).
OracleResult exact_grouped(const PlanView& plan,
                           const std::vector<RequestGroup>& ordered_groups,
                           LatencyMode mode, const OracleBudget& budget);

}  // namespace sneakpeek
