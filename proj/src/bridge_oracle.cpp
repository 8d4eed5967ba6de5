#include "cobalt/bridge_oracle.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "cobalt/errors.hpp"

namespace cobalt {

std::vector<std::string> OracleTrace::action_names() const {
  std::vector<std::string> names;
  for (const auto& s : steps) names.push_back(s.action);
  return names;
}

namespace {

struct Node {
  BridgeState state;
  std::vector<std::string> path;  // action names from an initial state
  std::vector<BridgeState> snapshots;
};

OracleTrace to_trace(const Node& node) {
  OracleTrace trace;
  trace.steps.push_back({"INITIAL", node.snapshots.front()});
  for (size_t i = 0; i < node.path.size(); ++i)
    trace.steps.push_back({node.path[i], node.snapshots[i + 1]});
  return trace;
}

}  // namespace

OracleResult bfs_shortest_counterexample(const BridgeModel& model,
                                         long state_cap) {
  // Actions expanded in name order and frontiers kept path-sorted, so the
  // first path that reaches any state is the lexicographically smallest
  // of that length. Equal-length violations then tie-break for free.
  std::vector<const BridgeAction*> actions;
  for (const auto& a : model.transitions) actions.push_back(&a);
  std::sort(actions.begin(), actions.end(),
            [](const BridgeAction* a, const BridgeAction* b) {
              return a->name < b->name;
            });

  std::unordered_set<std::string> visited;
  std::vector<Node> frontier;

  OracleResult result;
  std::vector<Node> violations;

  for (const auto& init : model.initial_states) {
    std::string key = init.dump();
    if (!visited.insert(key).second) continue;
    Node n{init, {}, {init}};
    if (!model.invariant(init)) violations.push_back(n);
    frontier.push_back(std::move(n));
  }

  while (!frontier.empty() && violations.empty()) {
    std::sort(frontier.begin(), frontier.end(),
              [](const Node& a, const Node& b) { return a.path < b.path; });
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (const BridgeAction* action : actions) {
        for (auto& succ : action->successors(node.state)) {
          std::string key = succ.dump();
          if (!visited.insert(key).second) continue;
          if (visited.size() > static_cast<size_t>(state_cap))
            throw StateExplosion("visited-state cap exceeded (" +
                                 std::to_string(state_cap) + ")");
          Node child;
          child.path = node.path;
          child.path.push_back(action->name);
          child.snapshots = node.snapshots;
          child.snapshots.push_back(succ);
          child.state = std::move(succ);
          if (!model.invariant(child.state)) violations.push_back(child);
          next.push_back(std::move(child));
        }
      }
    }
    frontier = std::move(next);
  }

  result.distinct_states = static_cast<long>(visited.size());
  if (!violations.empty()) {
    auto best = std::min_element(
        violations.begin(), violations.end(),
        [](const Node& a, const Node& b) { return a.path < b.path; });
    result.violation_found = true;
    result.trace = to_trace(*best);
  }
  return result;
}

// ---------------------------------------------------------------------------
// T1: Lock-and-Mint, reorg / stale queue.
//
// Mapping to the narrative: Lock enqueues an unfinalized deposit message;
// Reorg reverts the lock but the message stays queued (the staleness);
// RelayMint mints from the queue head regardless of the message's fate.

namespace {

BridgeModel t1_base(int max_tokens, bool with_reorg) {
  BridgeModel m;
  m.name = "T1";
  m.constants = {{"MaxTokens", max_tokens}};
  m.initial_states = {
      {{"locked", 0}, {"minted", 0}, {"queue", BridgeState::array()}}};

  auto max = max_tokens;

  m.transitions.push_back(
      {"Lock", [max](const BridgeState& s) -> std::vector<BridgeState> {
         if (s["locked"].get<int>() >= max ||
             static_cast<int>(s["queue"].size()) >= max)
           return {};
         BridgeState n = s;
         n["locked"] = n["locked"].get<int>() + 1;
         n["queue"].push_back("PENDING");
         return {n};
       }});

  m.transitions.push_back(
      {"Finalize", [](const BridgeState& s) -> std::vector<BridgeState> {
         std::vector<BridgeState> out;
         for (size_t i = 0; i < s["queue"].size(); ++i) {
           if (s["queue"][i] != "PENDING") continue;
           BridgeState n = s;
           n["queue"][i] = "FINAL";
           out.push_back(std::move(n));
         }
         return out;
       }});

  if (with_reorg) {
    m.transitions.push_back(
        {"Reorg", [](const BridgeState& s) -> std::vector<BridgeState> {
           std::vector<BridgeState> out;
           if (s["locked"].get<int>() == 0) return out;
           for (size_t i = 0; i < s["queue"].size(); ++i) {
             if (s["queue"][i] != "PENDING") continue;
             BridgeState n = s;
             n["locked"] = n["locked"].get<int>() - 1;
             n["queue"][i] = "REVERTED";
             out.push_back(std::move(n));
           }
           return out;
         }});
  }

  m.transitions.push_back(
      {"RelayMint", [max](const BridgeState& s) -> std::vector<BridgeState> {
         if (s["queue"].empty() || s["minted"].get<int>() >= max) return {};
         BridgeState n = s;
         n["minted"] = n["minted"].get<int>() + 1;
         n["queue"].erase(n["queue"].begin());  // head of the relay queue
         return {n};
       }});

  m.invariant = [](const BridgeState& s) {
    return s["minted"].get<int>() <= s["locked"].get<int>();
  };
  m.type_ok = [max](const BridgeState& s) {
    int locked = s["locked"].get<int>(), minted = s["minted"].get<int>();
    if (locked < 0 || locked > max || minted < 0 || minted > max)
      return false;
    if (static_cast<int>(s["queue"].size()) > max) return false;
    for (const auto& q : s["queue"])
      if (q != "PENDING" && q != "FINAL" && q != "REVERTED") return false;
    return true;
  };
  return m;
}

}  // namespace

BridgeModel t1_model(int max_tokens) { return t1_base(max_tokens, true); }

BridgeModel t1_model_without_reorg(int max_tokens) {
  auto m = t1_base(max_tokens, false);
  m.name = "T1-no-reorg";
  return m;
}

// ---------------------------------------------------------------------------
// T2: Lock-and-Mint, optimistic relay. RelayMint's guard omits the
// finality check; Reorg can still revert a pre-final deposit after it was
// minted against.

namespace {

BridgeModel t2_base(int max_tokens, bool finality_check) {
  BridgeModel m;
  m.name = "T2";
  m.constants = {{"MaxTokens", max_tokens}};
  m.initial_states = {
      {{"locked", 0}, {"minted", 0}, {"deposits", BridgeState::array()}}};

  auto max = max_tokens;

  m.transitions.push_back(
      {"Lock", [max](const BridgeState& s) -> std::vector<BridgeState> {
         if (s["locked"].get<int>() >= max ||
             static_cast<int>(s["deposits"].size()) >= max)
           return {};
         BridgeState n = s;
         n["locked"] = n["locked"].get<int>() + 1;
         n["deposits"].push_back({{"status", "PENDING"}, {"minted", false}});
         return {n};
       }});

  m.transitions.push_back(
      {"Finalize", [](const BridgeState& s) -> std::vector<BridgeState> {
         std::vector<BridgeState> out;
         for (size_t i = 0; i < s["deposits"].size(); ++i) {
           if (s["deposits"][i]["status"] != "PENDING") continue;
           BridgeState n = s;
           n["deposits"][i]["status"] = "FINAL";
           out.push_back(std::move(n));
         }
         return out;
       }});

  m.transitions.push_back(
      {"RelayMint",
       [max, finality_check](const BridgeState& s) -> std::vector<BridgeState> {
         std::vector<BridgeState> out;
         if (s["minted"].get<int>() >= max) return out;
         for (size_t i = 0; i < s["deposits"].size(); ++i) {
           const auto& d = s["deposits"][i];
           if (d["minted"].get<bool>()) continue;
           if (finality_check) {
             if (d["status"] != "FINAL") continue;
           } else {
             if (d["status"] == "REVERTED") continue;  // pre-finality OK
           }
           BridgeState n = s;
           n["minted"] = n["minted"].get<int>() + 1;
           n["deposits"][i]["minted"] = true;
           out.push_back(std::move(n));
         }
         return out;
       }});

  m.transitions.push_back(
      {"Reorg", [](const BridgeState& s) -> std::vector<BridgeState> {
         std::vector<BridgeState> out;
         if (s["locked"].get<int>() == 0) return out;
         for (size_t i = 0; i < s["deposits"].size(); ++i) {
           if (s["deposits"][i]["status"] != "PENDING") continue;
           BridgeState n = s;
           n["locked"] = n["locked"].get<int>() - 1;
           n["deposits"][i]["status"] = "REVERTED";
           out.push_back(std::move(n));
         }
         return out;
       }});

  m.invariant = [](const BridgeState& s) {
    return s["minted"].get<int>() <= s["locked"].get<int>();
  };
  m.type_ok = [max](const BridgeState& s) {
    int locked = s["locked"].get<int>(), minted = s["minted"].get<int>();
    if (locked < 0 || locked > max || minted < 0 || minted > max)
      return false;
    return static_cast<int>(s["deposits"].size()) <= max;
  };
  return m;
}

}  // namespace

BridgeModel t2_model(int max_tokens) { return t2_base(max_tokens, false); }

BridgeModel t2_model_with_finality_check(int max_tokens) {
  auto m = t2_base(max_tokens, true);
  m.name = "T2-finality-checked";
  return m;
}

// ---------------------------------------------------------------------------
// T3: Nomad-style zero-root initialization. ActivateZeroRoot marks the
// default root as confirmed; from then on a message with an empty proof
// validates against it and mints unbacked tokens.

namespace {

BridgeModel t3_base(int max_messages, int max_tokens, bool with_activation) {
  BridgeModel m;
  m.name = "T3";
  m.constants = {{"MaxMessages", max_messages}, {"MaxTokens", max_tokens}};
  m.initial_states = {{{"zeroRootConfirmed", false},
                       {"legitRootConfirmed", false},
                       {"processed", 0},
                       {"locked", 0},
                       {"minted", 0}}};

  if (with_activation) {
    m.transitions.push_back(
        {"ActivateZeroRoot",
         [](const BridgeState& s) -> std::vector<BridgeState> {
           if (s["zeroRootConfirmed"].get<bool>()) return {};
           BridgeState n = s;
           n["zeroRootConfirmed"] = true;
           return {n};
         }});
  }

  m.transitions.push_back(
      {"ExploitProcessWithoutProof",
       [max_messages, max_tokens](
           const BridgeState& s) -> std::vector<BridgeState> {
         if (!s["zeroRootConfirmed"].get<bool>()) return {};
         if (s["processed"].get<int>() >= max_messages ||
             s["minted"].get<int>() >= max_tokens)
           return {};
         BridgeState n = s;
         n["processed"] = n["processed"].get<int>() + 1;
         n["minted"] = n["minted"].get<int>() + 1;
         return {n};
       }});

  m.transitions.push_back(
      {"Lock", [max_tokens](const BridgeState& s) -> std::vector<BridgeState> {
         if (s["locked"].get<int>() >= max_tokens) return {};
         BridgeState n = s;
         n["locked"] = n["locked"].get<int>() + 1;
         return {n};
       }});

  m.transitions.push_back(
      {"Prove", [](const BridgeState& s) -> std::vector<BridgeState> {
         if (s["legitRootConfirmed"].get<bool>() ||
             s["locked"].get<int>() == 0)
           return {};
         BridgeState n = s;
         n["legitRootConfirmed"] = true;
         return {n};
       }});

  m.transitions.push_back(
      {"Process",
       [max_messages, max_tokens](
           const BridgeState& s) -> std::vector<BridgeState> {
         if (!s["legitRootConfirmed"].get<bool>()) return {};
         if (s["processed"].get<int>() >= max_messages ||
             s["minted"].get<int>() >= s["locked"].get<int>() ||
             s["minted"].get<int>() >= max_tokens)
           return {};
         BridgeState n = s;
         n["processed"] = n["processed"].get<int>() + 1;
         n["minted"] = n["minted"].get<int>() + 1;
         return {n};
       }});

  m.invariant = [](const BridgeState& s) {
    return s["minted"].get<int>() <= s["locked"].get<int>();
  };
  m.type_ok = [max_messages, max_tokens](const BridgeState& s) {
    int processed = s["processed"].get<int>();
    int locked = s["locked"].get<int>(), minted = s["minted"].get<int>();
    return processed >= 0 && processed <= max_messages && locked >= 0 &&
           locked <= max_tokens && minted >= 0 && minted <= max_tokens;
  };
  return m;
}

}  // namespace

BridgeModel t3_model(int max_messages, int max_tokens) {
  return t3_base(max_messages, max_tokens, true);
}

BridgeModel t3_model_without_activation(int max_messages, int max_tokens) {
  auto m = t3_base(max_messages, max_tokens, false);
  m.name = "T3-no-activation";
  return m;
}

// ---------------------------------------------------------------------------

namespace {

std::string to_tla_text(const BridgeState& v) {
  if (v.is_boolean()) return v.get<bool>() ? "TRUE" : "FALSE";
  if (v.is_number_integer()) return std::to_string(v.get<long>());
  if (v.is_string()) return "\"" + v.get<std::string>() + "\"";
  if (v.is_array()) {
    std::string out = "<<";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) out += ", ";
      out += to_tla_text(v[i]);
    }
    return out + ">>";
  }
  if (v.is_object()) {
    std::string out = "[";
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first) out += ", ";
      first = false;
      out += it.key() + " |-> " + to_tla_text(it.value());
    }
    return out + "]";
  }
  return v.dump();
}

}  // namespace

std::string render_oracle_trace(const OracleTrace& trace) {
  std::ostringstream out;
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& step = trace.steps[i];
    out << "State " << (i + 1) << ": <"
        << (step.action == "INITIAL" ? std::string("Initial predicate")
                                     : step.action)
        << ">\n";
    for (auto it = step.state.begin(); it != step.state.end(); ++it)
      out << "/\\ " << it.key() << " = " << to_tla_text(it.value()) << "\n";
    out << "\n";
  }
  return out.str();
}

}  // namespace cobalt
