#include "cobalt/repl_engine.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "cobalt/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cobalt {

const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::kBugFound: return "BUG_FOUND";
    case Terminal::kSafeTerminal: return "SAFE_TERMINAL";
    case Terminal::kBudgetExhausted: return "BUDGET_EXHAUSTED";
    case Terminal::kAborted: return "ABORTED";
  }
  return "?";
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void fill_bug_metrics(Metrics& m, const TlcVerdict& verdict, int iteration) {
  m.iterations_to_bug = iteration;
  if (verdict.trace) {
    m.trace_depth = verdict.trace->depth();
    m.states_explored = verdict.trace->states_explored;
  }
}

}  // namespace

ReplEngine::ReplEngine(LoopConfig config, GenerationBackend& backend,
                       TlcExecutor& tlc)
    : config_(std::move(config)),
      backend_(backend),
      tlc_(tlc),
      synth_(config_.templates, config_.feedback_options) {}

ReplEngine::CheckOutcome ReplEngine::check_artifact(
    const SpecArtifact& artifact) {
  CheckOutcome out;
  fs::path workspace;
  try {
    workspace = prepare_workspace(artifact, config_.runner);
    RawTlcOutput raw = tlc_.run(workspace, artifact, config_.runner);
    out.t_tlc_s = raw.duration_s;
    out.verdict = parse_verdict(raw, config_.runner);
  } catch (const SpawnError& e) {
    out.abort = std::string("SpawnError: ") + e.what();
  } catch (const ReplayExhausted& e) {
    out.abort = std::string("ReplayExhausted: ") + e.what();
  } catch (const ParseIncoherent& e) {
    out.abort = std::string("ParseIncoherent: ") + e.what();
  } catch (const MalformedBlock& e) {
    out.abort = std::string("MalformedBlock: ") + e.what();
  } catch (const IoError& e) {
    out.abort = std::string("IoError: ") + e.what();
  }
  if (!config_.runner.keep_workspace && !workspace.empty()) {
    std::error_code ec;
    fs::remove_all(workspace, ec);
  }
  return out;
}

RunRecord ReplEngine::run_loop(const std::string& target_id,
                               const std::string& target_description) {
  auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.target_id = target_id;

  Conversation conv(config_.system_prompt);
  conv.append_turn(Role::kUser, target_description);

  std::optional<VerdictClass> last_class;

  for (int i = 1; i <= config_.max_iterations; ++i) {
    IterationRecord iter;
    iter.index = i;

    auto t_gen = std::chrono::steady_clock::now();
    std::string reply;
    try {
      reply = generate(conv, backend_);
    } catch (const std::runtime_error& e) {
      record.terminal = Terminal::kAborted;
      record.abort_reason = std::string("BackendError: ") + e.what();
      record.iterations.push_back(std::move(iter));
      record.metrics.t_e2e_s = seconds_since(start);
      return record;
    }
    iter.t_llm_s = seconds_since(t_gen);
    conv.append_turn(Role::kAssistant, reply);

    // extract
    SpecArtifact artifact;
    try {
      artifact = extract_artifacts(reply);
      artifact.iteration = i;
    } catch (const ExtractionError& e) {
      FeedbackMessage fb = synth_.for_extraction_failure(e);
      iter.feedback_body = fb.body;
      iter.directive = fb.directive;
      conv.append_turn(Role::kUser, fb.body);
      record.iterations.push_back(std::move(iter));
      continue;
    }
    iter.artifact = artifact;

    // lint gate: ERROR findings skip the TLC call entirely
    LintReport lint = lint_boundedness(artifact);
    iter.lint = lint;
    if (config_.lint_blocking && !lint.passed()) {
      FeedbackMessage fb = synth_.for_lint_failure(lint);
      iter.feedback_body = fb.body;
      iter.directive = fb.directive;
      conv.append_turn(Role::kUser, fb.body);
      record.iterations.push_back(std::move(iter));
      continue;
    }

    // check
    CheckOutcome outcome = check_artifact(artifact);
    iter.t_tlc_s = outcome.t_tlc_s;
    record.metrics.t_tlc_total_s += outcome.t_tlc_s;
    if (outcome.abort) {
      record.terminal = Terminal::kAborted;
      record.abort_reason = *outcome.abort;
      record.iterations.push_back(std::move(iter));
      record.metrics.t_e2e_s = seconds_since(start);
      return record;
    }
    const TlcVerdict& verdict = *outcome.verdict;
    iter.verdict = verdict;
    last_class = verdict.klass;

    FeedbackMessage fb = synth_.synthesize(verdict);
    iter.feedback_body = fb.body;
    iter.directive = fb.directive;

    if (verdict.klass == VerdictClass::kViolation) {
      fill_bug_metrics(record.metrics, verdict, i);
      if (config_.confirmation_turn && i < config_.max_iterations) {
        conv.append_turn(Role::kUser, fb.body);
        try {
          std::string confirmation = generate(conv, backend_);
          conv.append_turn(Role::kAssistant, confirmation);
        } catch (const std::runtime_error&) {
          // the finding stands with or without the confirmation text
        }
      }
      record.iterations.push_back(std::move(iter));
      record.terminal = Terminal::kBugFound;
      record.metrics.t_e2e_s = seconds_since(start);
      return record;
    }

    if (verdict.klass == VerdictClass::kSafe &&
        config_.on_safe == OnSafePolicy::kTerminate) {
      record.iterations.push_back(std::move(iter));
      record.terminal = Terminal::kSafeTerminal;
      record.metrics.t_e2e_s = seconds_since(start);
      return record;
    }

    conv.append_turn(Role::kUser, fb.body);
    record.iterations.push_back(std::move(iter));
  }

  record.terminal = (last_class == VerdictClass::kSafe)
                        ? Terminal::kSafeTerminal
                        : Terminal::kBudgetExhausted;
  record.metrics.t_e2e_s = seconds_since(start);
  return record;
}

RunRecord check_ground_truth(const fs::path& spec_path,
                             const fs::path& cfg_path,
                             const LoopConfig& config, TlcExecutor& tlc) {
  auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.target_id = spec_path.stem().string();
  record.metrics.iterations_to_bug = 0;

  auto read = [](const fs::path& p) -> std::string {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  IterationRecord iter;
  iter.index = 0;
  try {
    SpecArtifact artifact;
    artifact.module_text = read(spec_path);
    artifact.config_text = read(cfg_path);
    artifact.module_name = parse_module_header(artifact.module_text);
    artifact.iteration = 0;
    iter.artifact = artifact;
    iter.lint = lint_boundedness(artifact);

    fs::path workspace = prepare_workspace(artifact, config.runner);
    RawTlcOutput raw = tlc.run(workspace, artifact, config.runner);
    if (!config.runner.keep_workspace) {
      std::error_code ec;
      fs::remove_all(workspace, ec);
    }
    iter.t_tlc_s = raw.duration_s;
    record.metrics.t_tlc_total_s = raw.duration_s;

    TlcVerdict verdict = parse_verdict(raw, config.runner);
    iter.verdict = verdict;
    switch (verdict.klass) {
      case VerdictClass::kViolation:
        fill_bug_metrics(record.metrics, verdict, 0);
        record.terminal = Terminal::kBugFound;
        break;
      case VerdictClass::kSafe:
        record.terminal = Terminal::kSafeTerminal;
        break;
      case VerdictClass::kCompileError:
        record.terminal = Terminal::kAborted;
        record.abort_reason = "ground-truth spec failed to compile";
        break;
      case VerdictClass::kTimeout:
        record.terminal = Terminal::kAborted;
        record.abort_reason = "TLC timeout on ground-truth spec";
        break;
    }
  } catch (const std::runtime_error& e) {
    record.terminal = Terminal::kAborted;
    record.abort_reason = e.what();
  }
  record.iterations.push_back(std::move(iter));
  record.metrics.t_e2e_s = seconds_since(start);
  return record;
}

// --------------------------------------------------------------------------
// Run-record serialization (schema v1).

namespace {

json lint_to_json(const LintReport& lint) {
  json findings = json::array();
  for (const auto& f : lint.findings) {
    findings.push_back(
        {{"severity", f.severity == Severity::kError ? "ERROR" : "WARN"},
         {"rule_id", f.rule_id},
         {"excerpt", f.excerpt}});
  }
  return {{"passed", lint.passed()}, {"findings", findings}};
}

json verdict_to_json(const TlcVerdict& v) {
  json out = {{"class", to_string(v.klass)},
              {"duration_s", v.raw.duration_s},
              {"timed_out", v.raw.timed_out},
              {"stdout", v.raw.stdout_text},
              {"stderr", v.raw.stderr_text}};
  if (v.raw.exit_code) out["exit_code"] = *v.raw.exit_code;
  if (v.trace) {
    json states = json::array();
    for (const auto& st : v.trace->states) {
      json bindings = json::object();
      for (const auto& [k, val] : st.bindings) bindings[k] = val;
      states.push_back(
          {{"index", st.index}, {"action", st.action}, {"bindings", bindings}});
    }
    json trace = {{"states", states}};
    if (v.trace->violated_invariant)
      trace["violated_invariant"] = *v.trace->violated_invariant;
    if (v.trace->states_explored)
      trace["states_explored"] = *v.trace->states_explored;
    out["trace"] = trace;
  }
  if (v.diagnostic)
    out["diagnostic"] = {{"message_excerpt", v.diagnostic->message_excerpt}};
  return out;
}

}  // namespace

json run_record_to_json(const RunRecord& record) {
  json iterations = json::array();
  for (const auto& it : record.iterations) {
    json entry = {{"index", it.index},
                  {"feedback", it.feedback_body},
                  {"t_llm_s", it.t_llm_s},
                  {"t_tlc_s", it.t_tlc_s}};
    if (it.directive) entry["directive"] = to_string(*it.directive);
    if (it.artifact) {
      entry["artifact"] = {{"module_name", it.artifact->module_name},
                           {"module_text", it.artifact->module_text},
                           {"config_text", it.artifact->config_text},
                           {"iteration", it.artifact->iteration}};
    }
    if (it.lint) entry["lint"] = lint_to_json(*it.lint);
    if (it.verdict) entry["verdict"] = verdict_to_json(*it.verdict);
    iterations.push_back(std::move(entry));
  }

  json metrics = {{"iterations_to_bug", record.metrics.iterations_to_bug},
                  {"trace_depth", record.metrics.trace_depth},
                  {"t_tlc_total_s", record.metrics.t_tlc_total_s},
                  {"t_e2e_s", record.metrics.t_e2e_s}};
  if (record.metrics.states_explored)
    metrics["states_explored"] = *record.metrics.states_explored;

  json out = {{"schema_version", 1},
              {"target_id", record.target_id},
              {"terminal", to_string(record.terminal)},
              {"iterations", iterations},
              {"metrics", metrics}};
  if (record.terminal == Terminal::kAborted)
    out["abort_reason"] = record.abort_reason;
  return out;
}

void write_run_record(const RunRecord& record, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write run record to " + path.string());
  out << run_record_to_json(record).dump(2) << "\n";
}

}  // namespace cobalt
