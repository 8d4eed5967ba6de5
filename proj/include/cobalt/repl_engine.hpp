#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cobalt/feedback.hpp"
#include "cobalt/llm_gateway.hpp"
#include "cobalt/tlc_runner.hpp"
#include "cobalt/trace_parser.hpp"
#include "json.hpp"

namespace cobalt {

enum class OnSafePolicy { kTerminate, kFeedback };

enum class Terminal { kBugFound, kSafeTerminal, kBudgetExhausted, kAborted };

const char* to_string(Terminal t);

struct LoopConfig {
  int max_iterations = 4;
  OnSafePolicy on_safe = OnSafePolicy::kFeedback;
  RunnerConfig runner;
  bool lint_blocking = true;
  // One extra confirm/tighten turn after a violation before terminating.
  bool confirmation_turn = false;
  std::string system_prompt;
  TemplateSet templates = TemplateSet::builtin();
  FeedbackSynthesizer::Options feedback_options;
};

struct IterationRecord {
  int index = 1;
  std::optional<SpecArtifact> artifact;
  std::optional<LintReport> lint;
  std::optional<TlcVerdict> verdict;
  std::string feedback_body;
  std::optional<Directive> directive;
  double t_llm_s = 0.0;
  double t_tlc_s = 0.0;
};

struct Metrics {
  int iterations_to_bug = -1;  // 0 = ground truth, no LLM involved
  int trace_depth = 0;
  std::optional<long> states_explored;
  double t_tlc_total_s = 0.0;
  double t_e2e_s = 0.0;
};

struct RunRecord {
  std::string target_id;
  std::vector<IterationRecord> iterations;
  Terminal terminal = Terminal::kAborted;
  std::string abort_reason;  // ABORTED only
  Metrics metrics;
};

class ReplEngine {
 public:
  ReplEngine(LoopConfig config, GenerationBackend& backend,
             TlcExecutor& tlc);

  // The full generate -> extract -> lint -> check -> feed-back loop.
  // Always returns a RunRecord; faults surface as terminal=ABORTED.
  RunRecord run_loop(const std::string& target_id,
                     const std::string& target_description);

 private:
  struct CheckOutcome {
    std::optional<TlcVerdict> verdict;
    double t_tlc_s = 0.0;
    std::optional<std::string> abort;
  };
  CheckOutcome check_artifact(const SpecArtifact& artifact);

  LoopConfig config_;
  GenerationBackend& backend_;
  TlcExecutor& tlc_;
  FeedbackSynthesizer synth_;
};

// One TLC pass over a human-written spec; no generator involved
// (iterations_to_bug = 0).
RunRecord check_ground_truth(const std::filesystem::path& spec_path,
                             const std::filesystem::path& cfg_path,
                             const LoopConfig& config, TlcExecutor& tlc);

// Flat-file evidence of one run; schema_version pins the layout.
nlohmann::json run_record_to_json(const RunRecord& record);
void write_run_record(const RunRecord& record,
                      const std::filesystem::path& path);

}  // namespace cobalt
