#include "cobalt/bridge_oracle.hpp"

#include <deque>
#include <set>

#include "cobalt/errors.hpp"
#include "doctest.h"

using namespace cobalt;

namespace {

// Independent depth oracle: iterative-deepening DFS for the shallowest
// invariant violation. Shares nothing with the BFS path.
int iddfs_shortest_violation_depth(const BridgeModel& model, int max_depth) {
  std::function<bool(const BridgeState&, int)> dfs =
      [&](const BridgeState& state, int remaining) -> bool {
    if (!model.invariant(state)) return true;
    if (remaining == 0) return false;
    for (const auto& action : model.transitions)
      for (const auto& succ : action.successors(state))
        if (dfs(succ, remaining - 1)) return true;
    return false;
  };
  for (int depth = 1; depth <= max_depth; ++depth) {
    for (const auto& init : model.initial_states)
      if (dfs(init, depth - 1)) return depth;
  }
  return -1;
}

bool all_reachable_satisfy_type_ok(const BridgeModel& model) {
  std::set<std::string> visited;
  std::deque<BridgeState> queue;
  for (const auto& init : model.initial_states) {
    visited.insert(init.dump());
    queue.push_back(init);
  }
  while (!queue.empty()) {
    BridgeState state = queue.front();
    queue.pop_front();
    if (!model.type_ok(state)) return false;
    for (const auto& action : model.transitions)
      for (const auto& succ : action.successors(state))
        if (visited.insert(succ.dump()).second) queue.push_back(succ);
  }
  return true;
}

}  // namespace

TEST_CASE("t1: depth 4, chain Lock -> Reorg -> RelayMint") {
  OracleResult r = bfs_shortest_counterexample(t1_model());
  REQUIRE(r.violation_found);
  CHECK(r.trace.depth() == 4);
  CHECK(r.trace.action_names() ==
        std::vector<std::string>{"INITIAL", "Lock", "Reorg", "RelayMint"});
}

TEST_CASE("t2: depth 4, chain Lock -> RelayMint -> Reorg") {
  OracleResult r = bfs_shortest_counterexample(t2_model());
  REQUIRE(r.violation_found);
  CHECK(r.trace.depth() == 4);
  CHECK(r.trace.action_names() ==
        std::vector<std::string>{"INITIAL", "Lock", "RelayMint", "Reorg"});
}

TEST_CASE("t3: depth 3, zero-root exploit chain") {
  OracleResult r = bfs_shortest_counterexample(t3_model());
  REQUIRE(r.violation_found);
  CHECK(r.trace.depth() == 3);
  CHECK(r.trace.action_names() ==
        std::vector<std::string>{"INITIAL", "ActivateZeroRoot",
                                 "ExploitProcessWithoutProof"});
}

TEST_CASE("oracle traces end in the only violating state") {
  for (const auto& model : {t1_model(), t2_model(), t3_model()}) {
    OracleResult r = bfs_shortest_counterexample(model);
    REQUIRE(r.violation_found);
    const auto& steps = r.trace.steps;
    CHECK(steps.front().action == "INITIAL");
    for (size_t i = 0; i + 1 < steps.size(); ++i)
      CHECK(model.invariant(steps[i].state));
    CHECK_FALSE(model.invariant(steps.back().state));
  }
}

TEST_CASE("iterative deepening agrees on every depth") {
  CHECK(iddfs_shortest_violation_depth(t1_model(), 6) == 4);
  CHECK(iddfs_shortest_violation_depth(t2_model(), 6) == 4);
  CHECK(iddfs_shortest_violation_depth(t3_model(), 6) == 3);
}

TEST_CASE("t1 without reorg: invariant holds everywhere") {
  OracleResult r = bfs_shortest_counterexample(t1_model_without_reorg());
  CHECK_FALSE(r.violation_found);
  CHECK(r.distinct_states > 0);
}

TEST_CASE("t2 with finality check: invariant holds everywhere") {
  OracleResult r = bfs_shortest_counterexample(t2_model_with_finality_check());
  CHECK_FALSE(r.violation_found);
}

TEST_CASE("t3 without activation: exploit never enabled") {
  OracleResult r = bfs_shortest_counterexample(t3_model_without_activation());
  CHECK_FALSE(r.violation_found);
}

TEST_CASE("small-scope property: depth constant, states non-decreasing") {
  for (auto make : {t1_model, t2_model}) {
    long prev_states = 0;
    for (int max_tokens = 1; max_tokens <= 4; ++max_tokens) {
      OracleResult r = bfs_shortest_counterexample(make(max_tokens));
      REQUIRE(r.violation_found);
      CHECK(r.trace.depth() == 4);
      CHECK(r.distinct_states >= prev_states);
      prev_states = r.distinct_states;
    }
  }
}

TEST_CASE("type bounds hold on every reachable state") {
  CHECK(all_reachable_satisfy_type_ok(t1_model()));
  CHECK(all_reachable_satisfy_type_ok(t2_model()));
  CHECK(all_reachable_satisfy_type_ok(t3_model()));
}

TEST_CASE("state cap triggers StateExplosion") {
  CHECK_THROWS_AS(bfs_shortest_counterexample(t2_model(4), 10),
                  StateExplosion);
}

TEST_CASE("rendered trace uses the parsed-TLC textual shape") {
  OracleResult r = bfs_shortest_counterexample(t3_model());
  std::string text = render_oracle_trace(r.trace);
  CHECK(text.find("State 1: <Initial predicate>") != std::string::npos);
  CHECK(text.find("State 2: <ActivateZeroRoot>") != std::string::npos);
  CHECK(text.find("/\\ minted = 1") != std::string::npos);
}
