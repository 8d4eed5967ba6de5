#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cobalt/tlc_runner.hpp"

namespace cobalt {

inline constexpr const char* kInitialAction = "INITIAL";

struct TraceState {
  int index = 0;  // 1-based state number
  std::string action;
  // Ordered variable -> value-text map; value text kept verbatim.
  std::vector<std::pair<std::string, std::string>> bindings;

  const std::string* binding(const std::string& name) const {
    for (const auto& [k, v] : bindings)
      if (k == name) return &v;
    return nullptr;
  }
};

struct CounterexampleTrace {
  std::vector<TraceState> states;
  std::optional<std::string> violated_invariant;
  std::optional<long> states_explored;  // TLC's "distinct states found"

  // Depth counts the initial state: depth = transitions + 1.
  int depth() const { return static_cast<int>(states.size()); }
};

struct CompileDiagnostic {
  std::string message_excerpt;  // contiguous substring of full_output
  std::string full_output;
};

struct TlcVerdict {
  VerdictClass klass = VerdictClass::kSafe;
  std::optional<CounterexampleTrace> trace;       // VIOLATION only
  std::optional<CompileDiagnostic> diagnostic;    // COMPILE_ERROR only
  RawTlcOutput raw;
};

}  // namespace cobalt
