#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cobalt/trace.hpp"

namespace cobalt {

struct StateBlock {
  std::string header;  // the `State N: <...>` line
  std::string body;    // lines up to the next header or trace end
};

// Splits TLC output on `State \d+:` header lines, in state-number order.
// Empty list when no headers match.
std::vector<StateBlock> segment_states(const std::string& stdout_text);

// Extracts the action name from the block header and one binding per
// `/\ <identifier> = <value>` conjunct line. Values wrapped by TLC across
// lines are joined. Throws MalformedBlock on a header with zero conjuncts.
std::pair<std::string, std::vector<std::pair<std::string, std::string>>>
parse_bindings(const StateBlock& block);

// Full pipeline: classify, then segment/extract/annotate on VIOLATION or
// pull the diagnostic excerpt on COMPILE_ERROR.
TlcVerdict parse_verdict(const RawTlcOutput& raw);
TlcVerdict parse_verdict(const RawTlcOutput& raw, const RunnerConfig& config);

}  // namespace cobalt
