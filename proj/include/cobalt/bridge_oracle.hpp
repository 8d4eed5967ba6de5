#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace cobalt {

// A bridge state is a flat variable -> value object. nlohmann::json gives
// canonical ordering and equality, so dumped text doubles as the
// visited-set key. Sequence-valued variables are arrays; order matters.
using BridgeState = nlohmann::json;

struct BridgeAction {
  std::string name;
  // All successors of `s` under this action (one per nondeterministic
  // choice, e.g. per queue index).
  std::function<std::vector<BridgeState>(const BridgeState&)> successors;
};

struct BridgeModel {
  std::string name;
  std::map<std::string, int> constants;
  std::vector<BridgeState> initial_states;
  std::vector<BridgeAction> transitions;
  std::function<bool(const BridgeState&)> invariant;  // SafetyInvariant
  std::function<bool(const BridgeState&)> type_ok;
};

struct OracleStep {
  std::string action;  // INITIAL for the first entry
  BridgeState state;
};

struct OracleTrace {
  std::vector<OracleStep> steps;
  int depth() const { return static_cast<int>(steps.size()); }
  std::vector<std::string> action_names() const;
};

struct OracleResult {
  bool violation_found = false;
  OracleTrace trace;  // empty unless violation_found
  long distinct_states = 0;
};

// BFS over the reachable state space; returns a shortest violating trace,
// ties broken lexicographically by action-name sequence. Throws
// StateExplosion past `state_cap` visited states.
OracleResult bfs_shortest_counterexample(const BridgeModel& model,
                                         long state_cap = 1'000'000);

// Lock-and-Mint with the reorg / stale-queue flaw. The relay mints from
// the queue head whether or not the underlying lock survived the reorg.
BridgeModel t1_model(int max_tokens = 3);
// Same skeleton, but the mint guard skips the finality check while a
// pre-final deposit can still be reverted (optimistic relay).
BridgeModel t2_model(int max_tokens = 3);
// Nomad-style zero-root initialization: activating the default root lets
// an empty proof validate an arbitrary message.
BridgeModel t3_model(int max_messages = 3, int max_tokens = 3);

// Variants used by oracle cross-checks.
BridgeModel t1_model_without_reorg(int max_tokens = 3);
BridgeModel t2_model_with_finality_check(int max_tokens = 3);
BridgeModel t3_model_without_activation(int max_messages = 3,
                                        int max_tokens = 3);

// Renders the oracle trace in the same textual shape as a parsed TLC
// trace, for diff-based comparison.
std::string render_oracle_trace(const OracleTrace& trace);

}  // namespace cobalt
