#include "cobalt/feedback.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;

namespace cobalt {

const char* to_string(Directive d) {
  switch (d) {
    case Directive::kConfirmFinding: return "CONFIRM_FINDING";
    case Directive::kTightenGuard: return "TIGHTEN_GUARD";
    case Directive::kFixSyntax: return "FIX_SYNTAX";
    case Directive::kRemodel: return "REMODEL";
    case Directive::kEscalateBounds: return "ESCALATE_BOUNDS";
  }
  return "?";
}

TemplateSet TemplateSet::builtin() {
  TemplateSet t;
  t.violation =
      "TLC found a counterexample. Invariant {invariant} is violated at "
      "depth {depth}.\n"
      "\n"
      "Shortest violation trace (only changed variables shown after state "
      "1):\n"
      "{trace}\n"
      "\n"
      "Choose one of the two directives:\n"
      "1. CONFIRM_FINDING - if this trace is the real protocol bug, reply "
      "confirming the finding and explain the causal chain.\n"
      "2. TIGHTEN_GUARD - if the trace is a modeling artifact, tighten the "
      "guard of the guilty action and resend both artifacts as fenced code "
      "blocks.\n";
  t.compile_error =
      "TLC could not check the specification. The toolchain reported:\n"
      "\n"
      "{diagnostic}\n"
      "\n"
      "Fix the syntax while preserving the model's intent, and resend both "
      "artifacts as fenced code blocks.\n";
  t.safe =
      "TLC reports SAFE: no reachable state violates {invariant}. Under the "
      "inversion convention this signals a modeling error, not protocol "
      "correctness. Remodel the protocol so the known flaw is expressible, "
      "then resend both artifacts as fenced code blocks.\n";
  t.safe_low_coverage =
      "TLC reports SAFE after exploring only {states} distinct states. The "
      "model is likely over-constrained. Escalate the CONSTANT bounds or "
      "loosen the action guards so flawed behavior becomes reachable, then "
      "resend both artifacts as fenced code blocks.\n";
  t.timeout =
      "TLC hit the wall-clock limit before finishing. Shrink the declared "
      "CONSTANTS or strengthen TypeOK so the state space stays finite and "
      "small, then resend both artifacts as fenced code blocks.\n";
  return t;
}

TemplateSet TemplateSet::load_directory(const fs::path& dir) {
  TemplateSet t = builtin();
  auto load = [&](const char* name, std::string& slot) {
    std::ifstream in(dir / (std::string(name) + ".txt"), std::ios::binary);
    if (!in) return;
    std::ostringstream buf;
    buf << in.rdbuf();
    slot = buf.str();
  };
  load("violation", t.violation);
  load("compile_error", t.compile_error);
  load("safe", t.safe);
  load("safe_low_coverage", t.safe_low_coverage);
  load("timeout", t.timeout);
  return t;
}

namespace {

std::string fill(std::string tmpl, const std::string& slot,
                 const std::string& value) {
  std::string needle = "{" + slot + "}";
  for (size_t pos = 0; (pos = tmpl.find(needle, pos)) != std::string::npos;) {
    tmpl.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return tmpl;
}

std::string render_state_entry(const TraceState& st,
                               const std::string& delta_text) {
  std::ostringstream out;
  out << "State " << st.index << " (" << st.action << ")";
  if (delta_text.empty()) {
    out << ": no variable changed";
  } else {
    out << ":\n" << delta_text;
  }
  return out.str();
}

// Joins state entries, dropping middle states until the cap fits. The
// first and last state always survive: Init and the violation.
std::string join_with_cap(const std::vector<std::string>& entries,
                          size_t cap) {
  size_t keep = entries.size();
  for (; keep >= 2; --keep) {
    std::ostringstream out;
    size_t head = (keep + 1) / 2;       // entries from the front
    size_t tail = keep - head;          // entries from the back
    for (size_t i = 0; i < head; ++i) out << entries[i] << "\n";
    if (keep < entries.size())
      out << "... (" << entries.size() - keep << " states omitted) ...\n";
    for (size_t i = entries.size() - tail; i < entries.size(); ++i)
      out << entries[i] << "\n";
    if (out.str().size() <= cap || keep == 2) return out.str();
  }
  return entries.empty() ? "" : entries.front() + "\n";
}

std::optional<long> states_explored_of(const TlcVerdict& verdict) {
  if (verdict.trace && verdict.trace->states_explored)
    return verdict.trace->states_explored;
  static const std::regex distinct(R"((\d+) distinct states found)");
  std::smatch m;
  if (std::regex_search(verdict.raw.stdout_text, m, distinct))
    return std::stol(m[1]);
  return std::nullopt;
}

}  // namespace

std::vector<std::string> render_changed_bindings(
    const CounterexampleTrace& trace) {
  std::vector<std::string> out;
  const TraceState* prev = nullptr;
  for (const auto& st : trace.states) {
    std::ostringstream text;
    for (const auto& [name, value] : st.bindings) {
      if (prev) {
        const std::string* old = prev->binding(name);
        if (old && *old == value) continue;
      }
      text << "  " << name << " = " << value << "\n";
    }
    std::string s = text.str();
    if (!s.empty() && s.back() == '\n') s.pop_back();
    out.push_back(std::move(s));
    prev = &st;
  }
  return out;
}

FeedbackMessage FeedbackSynthesizer::synthesize(
    const TlcVerdict& verdict) const {
  FeedbackMessage msg;
  msg.verdict_class = verdict.klass;

  switch (verdict.klass) {
    case VerdictClass::kViolation: {
      const auto& trace = *verdict.trace;
      auto deltas = render_changed_bindings(trace);
      std::vector<std::string> entries;
      for (size_t i = 0; i < trace.states.size(); ++i)
        entries.push_back(render_state_entry(trace.states[i], deltas[i]));

      std::string invariant =
          trace.violated_invariant.value_or("SafetyInvariant");
      // leave room for the fixed template text around the trace slot
      size_t overhead = templates_.violation.size() + invariant.size() + 16;
      size_t trace_cap =
          options_.body_cap > overhead ? options_.body_cap - overhead : 256;

      std::string body = fill(templates_.violation, "invariant", invariant);
      body = fill(body, "depth", std::to_string(trace.depth()));
      body = fill(body, "trace", join_with_cap(entries, trace_cap));
      msg.body = body;
      msg.directive = Directive::kConfirmFinding;
      break;
    }
    case VerdictClass::kCompileError: {
      msg.body = fill(templates_.compile_error, "diagnostic",
                      verdict.diagnostic->message_excerpt);
      msg.directive = Directive::kFixSyntax;
      break;
    }
    case VerdictClass::kSafe: {
      auto states = states_explored_of(verdict);
      if (states && *states < options_.low_states_threshold) {
        msg.body = fill(templates_.safe_low_coverage, "states",
                        std::to_string(*states));
        msg.directive = Directive::kEscalateBounds;
      } else {
        msg.body = fill(templates_.safe, "invariant", "SafetyInvariant");
        msg.directive = Directive::kRemodel;
      }
      break;
    }
    case VerdictClass::kTimeout: {
      msg.body = templates_.timeout;
      msg.directive = Directive::kTightenGuard;
      break;
    }
  }
  return msg;
}

FeedbackMessage FeedbackSynthesizer::for_extraction_failure(
    const ExtractionError& err) const {
  FeedbackMessage msg;
  msg.verdict_class = VerdictClass::kCompileError;
  msg.directive = Directive::kFixSyntax;
  msg.body =
      "Your reply could not be processed: " + std::string(err.what()) +
      ".\nResend exactly one TLA+ module in a ```tla fenced block and one "
      "TLC configuration in a ```cfg fenced block.\n";
  return msg;
}

FeedbackMessage FeedbackSynthesizer::for_lint_failure(
    const LintReport& report) const {
  FeedbackMessage msg;
  msg.verdict_class = VerdictClass::kCompileError;
  msg.directive = Directive::kFixSyntax;
  std::ostringstream body;
  body << "The specification violates the bounding rules and was not sent "
          "to TLC:\n";
  for (const auto& f : report.findings) {
    if (f.severity != Severity::kError) continue;
    body << "  [" << f.rule_id << "] " << f.excerpt << "\n";
  }
  body << "Type every variable over a finite range, declare every bound as "
          "a CONSTANT assigned in the config, and keep SafetyInvariant "
          "defined. Resend both artifacts as fenced code blocks.\n";
  msg.body = body.str();
  return msg;
}

}  // namespace cobalt
