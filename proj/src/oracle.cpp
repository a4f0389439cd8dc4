#include "sneakpeek/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace sneakpeek {

namespace {

void check_budget(double candidate_count, const OracleBudget& budget) {
  if (candidate_count > static_cast<double>(budget.max_candidates)) {
    throw BudgetExceeded("enumeration would visit " +
                         std::to_string(static_cast<long long>(candidate_count)) +
                         " candidates (budget " +
                         std::to_string(budget.max_candidates) + ")");
  }
}

struct EntryStep {
  double busy_after = 0.0;
  double util_prefix = 0.0;
  int resident_after = -1;
};

// Applies one scheduled entry on top of the previous timeline state.
EntryStep apply_entry(const EntryStep& prev, const PlanRequest& pr,
                      const PlanCandidate& cand, double accuracy, LatencyMode mode) {
  EntryStep next = prev;
  double cost = 0.0;
  if (cand.model_ref != kSneakPeekModel) {
    if (mode == LatencyMode::PaperFlat) {
      cost = cand.infer_ms + cand.swap_ms;
    } else {
      cost = cand.infer_ms +
             (prev.resident_after == cand.model_key ? 0.0 : cand.swap_ms);
    }
    next.resident_after = cand.model_key;
  }
  next.busy_after = prev.busy_after + cost;
  next.util_prefix = prev.util_prefix +
                     accuracy * (1.0 - penalty(*pr.penalty, pr.deadline_ms,
                                               next.busy_after));
  return next;
}

}  // namespace

OracleResult exact_global(const PlanView& plan, LatencyMode mode,
                          const OracleBudget& budget) {
  const std::size_t n = plan.requests.size();
  if (n == 0) {
    return OracleResult{Schedule{}, 0.0, 1};
  }

  double projected = 1.0;
  for (std::size_t i = 1; i <= n; ++i) projected *= static_cast<double>(i);
  for (const auto& pr : plan.requests) {
    if (pr.candidates->empty()) {
      throw Error("request without candidate models");
    }
    projected *= static_cast<double>(pr.candidates->size());
  }
  check_budget(projected, budget);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> assign(n, 0);
  std::vector<EntryStep> steps(n);

  // Positions [p, n) are recomputed whenever an earlier digit changes; the
  // rightmost-fastest odometer makes this amortized O(1) per candidate.
  auto recompute_from = [&](std::size_t p) {
    for (std::size_t i = p; i < n; ++i) {
      const PlanRequest& pr = plan.requests[perm[i]];
      const PlanCandidate& cand = (*pr.candidates)[assign[i]];
      const EntryStep prev = (i == 0) ? EntryStep{} : steps[i - 1];
      steps[i] = apply_entry(prev, pr, cand, pr.accuracy[assign[i]], mode);
    }
  };

  double best_sum = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_perm, best_assign;
  long long count = 0;

  do {
    std::fill(assign.begin(), assign.end(), 0);
    recompute_from(0);
    while (true) {
      ++count;
      if (steps[n - 1].util_prefix > best_sum) {
        best_sum = steps[n - 1].util_prefix;
        best_perm = perm;
        best_assign = assign;
      }
      bool advanced = false;
      for (std::size_t p = n; p-- > 0;) {
        if (assign[p] + 1 < plan.requests[perm[p]].candidates->size()) {
          ++assign[p];
          recompute_from(p);
          advanced = true;
          break;
        }
        assign[p] = 0;
      }
      if (!advanced) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  OracleResult result;
  for (std::size_t i = 0; i < n; ++i) {
    const PlanRequest& pr = plan.requests[best_perm[i]];
    result.schedule.entries.push_back(ScheduleEntry{
        pr.request->request_id, (*pr.candidates)[best_assign[i]].model_ref, 0});
  }
  result.utility = best_sum / static_cast<double>(n);
  result.candidate_count = count;
  return result;
}

OracleResult exact_global(const std::vector<Request>& requests, const AppMap& apps,
                          LatencyMode mode, const OracleBudget& budget) {
  SchedulingContext ctx;
  ctx.requests = &requests;
  ctx.apps = &apps;
  SchedulerSpec spec;  // profiled accuracies, no short-circuit candidates
  PlanView plan = build_plan(spec, ctx);
  return exact_global(plan, mode, budget);
}

OracleResult exact_grouped(const PlanView& plan,
                           const std::vector<RequestGroup>& ordered_groups,
                           LatencyMode mode, const OracleBudget& budget) {
  const std::size_t g = ordered_groups.size();
  const std::size_t total_requests = plan.requests.size();
  if (g == 0 || total_requests == 0) {
    return OracleResult{Schedule{}, 0.0, 1};
  }

  std::vector<const std::vector<PlanCandidate>*> group_candidates(g);
  double projected = 1.0;
  for (std::size_t i = 1; i <= g; ++i) projected *= static_cast<double>(i);
  for (std::size_t gi = 0; gi < g; ++gi) {
    const auto& members = ordered_groups[gi].members;
    if (members.empty()) {
      throw EmptyGroup("grouped enumeration received an empty group");
    }
    group_candidates[gi] = plan.requests[members.front()].candidates;
    for (std::size_t row : members) {
      if (plan.requests[row].candidates != group_candidates[gi]) {
        throw Error("group members must share one candidate set");
      }
    }
    projected *= static_cast<double>(group_candidates[gi]->size());
  }
  check_budget(projected, budget);

  std::vector<std::size_t> perm(g);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> assign(g, 0);
  std::vector<EntryStep> steps(g);  // state after each whole group

  auto recompute_from = [&](std::size_t p) {
    for (std::size_t i = p; i < g; ++i) {
      const auto& group = ordered_groups[perm[i]];
      const PlanCandidate& cand = (*group_candidates[perm[i]])[assign[i]];
      EntryStep state = (i == 0) ? EntryStep{} : steps[i - 1];
      for (std::size_t row : group.members) {
        const PlanRequest& pr = plan.requests[row];
        state = apply_entry(state, pr, cand, pr.accuracy[assign[i]], mode);
      }
      steps[i] = state;
    }
  };

  double best_sum = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_perm, best_assign;
  long long count = 0;

  do {
    std::fill(assign.begin(), assign.end(), 0);
    recompute_from(0);
    while (true) {
      ++count;
      if (steps[g - 1].util_prefix > best_sum) {
        best_sum = steps[g - 1].util_prefix;
        best_perm = perm;
        best_assign = assign;
      }
      bool advanced = false;
      for (std::size_t p = g; p-- > 0;) {
        if (assign[p] + 1 < group_candidates[perm[p]]->size()) {
          ++assign[p];
          recompute_from(p);
          advanced = true;
          break;
        }
        assign[p] = 0;
      }
      if (!advanced) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  OracleResult result;
  for (std::size_t i = 0; i < g; ++i) {
    const auto& group = ordered_groups[best_perm[i]];
    int model_ref = (*group_candidates[best_perm[i]])[best_assign[i]].model_ref;
    for (std::size_t row : group.members) {
      result.schedule.entries.push_back(
          ScheduleEntry{plan.requests[row].request->request_id, model_ref, 0});
    }
  }
  result.utility = best_sum / static_cast<double>(total_requests);
  result.candidate_count = count;
  return result;
}

}  // namespace sneakpeek
