#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cobalt/artifact.hpp"
#include "cobalt/trace.hpp"

namespace cobalt {

enum class Directive {
  kConfirmFinding,
  kTightenGuard,
  kFixSyntax,
  kRemodel,
  kEscalateBounds,
};

const char* to_string(Directive d);

struct FeedbackMessage {
  VerdictClass verdict_class;
  std::string body;
  Directive directive;
};

// Template texts with named slots. Slot vocabulary:
//   {invariant}  violated invariant name
//   {depth}      counterexample depth (initial state counts)
//   {trace}      numbered state listing with changed bindings
//   {diagnostic} verbatim compile diagnostic excerpt
//   {states}     distinct states explored
struct TemplateSet {
  std::string violation;
  std::string compile_error;
  std::string safe;
  std::string safe_low_coverage;
  std::string timeout;

  static TemplateSet builtin();
  // Overrides from <dir>/{violation,compile_error,safe,safe_low_coverage,
  // timeout}.txt; missing files keep the builtin text.
  static TemplateSet load_directory(const std::filesystem::path& dir);
};

// State 1 renders all bindings; each later state renders only bindings
// whose value-text changed since the previous state.
std::vector<std::string> render_changed_bindings(
    const CounterexampleTrace& trace);

class FeedbackSynthesizer {
 public:
  struct Options {
    size_t body_cap = 4000;       // truncation drops middle states only
    long low_states_threshold = 5;  // SAFE below this escalates bounds
  };

  FeedbackSynthesizer() : FeedbackSynthesizer(TemplateSet::builtin(), {}) {}
  FeedbackSynthesizer(TemplateSet templates, Options options)
      : templates_(std::move(templates)), options_(options) {}

  FeedbackMessage synthesize(const TlcVerdict& verdict) const;

  // Pre-TLC feedback for extraction and lint failures.
  FeedbackMessage for_extraction_failure(const ExtractionError& err) const;
  FeedbackMessage for_lint_failure(const LintReport& report) const;

 private:
  TemplateSet templates_;
  Options options_;
};

}  // namespace cobalt
