#pragma once

#include <string>
#include <vector>

#include "cobalt/errors.hpp"

namespace cobalt {

// The two generated artifacts: a TLA+ module and its TLC configuration.
struct SpecArtifact {
  std::string module_name;
  std::string module_text;
  std::string config_text;
  int iteration = 0;
};

enum class Severity { kError, kWarn };

struct LintFinding {
  Severity severity;
  std::string rule_id;
  std::string excerpt;  // the offending source line
};

struct LintReport {
  std::vector<LintFinding> findings;
  bool passed() const {
    for (const auto& f : findings)
      if (f.severity == Severity::kError) return false;
    return true;
  }
};

// Pulls the TLA+ module and TLC config out of a generator reply.
//
// Accepted fence tags (case-insensitive): "tla" for the module, "cfg" for
// the config. An untagged block whose first non-blank line is a
// `---- MODULE <Name> ----` header also counts as the module. More than one
// candidate of either kind raises ExtractionError(AmbiguousBlocks).
SpecArtifact extract_artifacts(const std::string& response_text);

// Reads the module name from a `---- MODULE <Name> ----` header line.
// Throws ExtractionError(NoModuleHeader) when absent.
std::string parse_module_header(const std::string& module_text);

// Textual boundedness lint per the structural template. Heuristic, not a
// TLA+ parse; TLC stays the semantic oracle.
//
// ERROR rules:
//   UNBOUNDED_SET       - variable typed over Nat/Int/STRING, or Seq(...)
//                         with no Len(..) bound in the same definition
//   UNDECLARED_CONSTANT - CONSTANT used in the module but not assigned in
//                         the config's CONSTANT(S) section
//   MISSING_INVARIANT   - no SafetyInvariant definition
// WARN rules:
//   MISSING_TYPEOK      - no TypeOK definition
LintReport lint_boundedness(const SpecArtifact& artifact);

}  // namespace cobalt
