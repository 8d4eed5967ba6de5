#include "cobalt/feedback.hpp"

#include "cobalt/trace_parser.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cobalt;

namespace {

TlcVerdict violation_verdict(const std::string& fixture) {
  return parse_verdict(testutil::load_tlc_fixture(fixture));
}

CounterexampleTrace synthetic_trace(int n_states) {
  CounterexampleTrace trace;
  for (int i = 1; i <= n_states; ++i) {
    TraceState st;
    st.index = i;
    st.action = i == 1 ? "INITIAL" : "Step" + std::to_string(i);
    // bulky sequence value so 50 states comfortably overflow the body cap
    std::string value = "<<";
    for (int k = 0; k < i % 7 + 3; ++k)
      value += " [status |-> \"PENDING\", nonce |-> " + std::to_string(i) +
               "],";
    value += " >>";
    st.bindings = {{"x", std::to_string(i)}, {"deposits", value}};
    trace.states.push_back(st);
  }
  trace.violated_invariant = "SafetyInvariant";
  return trace;
}

}  // namespace

TEST_CASE("violation feedback lists invariant, actions, both directives") {
  FeedbackSynthesizer synth;
  FeedbackMessage msg = synth.synthesize(violation_verdict("t1_violation"));
  CHECK(msg.verdict_class == VerdictClass::kViolation);
  CHECK(msg.directive == Directive::kConfirmFinding);
  CHECK(msg.body.find("SafetyInvariant") != std::string::npos);
  // every action, in trace order
  auto lock = msg.body.find("(Lock)");
  auto reorg = msg.body.find("(Reorg)");
  auto mint = msg.body.find("(RelayMint)");
  CHECK(lock != std::string::npos);
  CHECK(reorg != std::string::npos);
  CHECK(mint != std::string::npos);
  CHECK(lock < reorg);
  CHECK(reorg < mint);
  CHECK(msg.body.find("CONFIRM_FINDING") != std::string::npos);
  CHECK(msg.body.find("TIGHTEN_GUARD") != std::string::npos);
}

TEST_CASE("T3 violation body orders the exploit chain") {
  FeedbackSynthesizer synth;
  FeedbackMessage msg = synth.synthesize(violation_verdict("t3_violation"));
  auto activate = msg.body.find("ActivateZeroRoot");
  auto exploit = msg.body.find("ExploitProcessWithoutProof");
  REQUIRE(activate != std::string::npos);
  REQUIRE(exploit != std::string::npos);
  CHECK(activate < exploit);
}

TEST_CASE("compile-error feedback embeds the excerpt verbatim") {
  FeedbackSynthesizer synth;
  TlcVerdict v = parse_verdict(testutil::load_tlc_fixture("syntax_error"));
  FeedbackMessage msg = synth.synthesize(v);
  CHECK(msg.directive == Directive::kFixSyntax);
  CHECK(msg.body.find(v.diagnostic->message_excerpt) != std::string::npos);
}

TEST_CASE("SAFE feedback carries the modeling-error directive") {
  FeedbackSynthesizer synth;
  TlcVerdict v = parse_verdict(testutil::load_tlc_fixture("safe"));
  FeedbackMessage msg = synth.synthesize(v);
  CHECK(msg.directive == Directive::kRemodel);
  CHECK(msg.body.find("modeling error") != std::string::npos);
}

TEST_CASE("SAFE with suspiciously few states escalates bounds") {
  FeedbackSynthesizer synth;
  TlcVerdict v;
  v.klass = VerdictClass::kSafe;
  v.raw.exit_code = 0;
  v.raw.stdout_text =
      "Model checking completed. No error has been found.\n"
      "3 states generated, 2 distinct states found, 0 states left on queue.\n";
  FeedbackMessage msg = synth.synthesize(v);
  CHECK(msg.directive == Directive::kEscalateBounds);
  CHECK(msg.body.find("2 distinct states") != std::string::npos);
}

TEST_CASE("timeout feedback instructs shrinking the bounds") {
  FeedbackSynthesizer synth;
  TlcVerdict v;
  v.klass = VerdictClass::kTimeout;
  v.raw.timed_out = true;
  FeedbackMessage msg = synth.synthesize(v);
  CHECK(msg.verdict_class == VerdictClass::kTimeout);
  CHECK(msg.body.find("Shrink") != std::string::npos);
}

TEST_CASE("synthesis is deterministic") {
  FeedbackSynthesizer synth;
  TlcVerdict v = violation_verdict("t1_violation");
  CHECK(synth.synthesize(v).body == synth.synthesize(v).body);
}

TEST_CASE("delta rendering: state 1 full, later states changes only") {
  TlcVerdict v = violation_verdict("t1_violation");
  auto deltas = render_changed_bindings(*v.trace);
  REQUIRE(deltas.size() == 4);
  // state 1 renders everything
  CHECK(deltas[0].find("locked = 0") != std::string::npos);
  CHECK(deltas[0].find("minted = 0") != std::string::npos);
  CHECK(deltas[0].find("queue = <<>>") != std::string::npos);
  // state 4 (RelayMint) changes minted and queue, not locked
  CHECK(deltas[3].find("minted = 1") != std::string::npos);
  CHECK(deltas[3].find("locked") == std::string::npos);
}

TEST_CASE("identical consecutive states render an empty delta") {
  CounterexampleTrace trace;
  TraceState a{1, "INITIAL", {{"x", "1"}}};
  TraceState b{2, "Stutter", {{"x", "1"}}};
  trace.states = {a, b};
  auto deltas = render_changed_bindings(trace);
  CHECK_FALSE(deltas[0].empty());
  CHECK(deltas[1].empty());
}

TEST_CASE("single-state trace renders full bindings") {
  CounterexampleTrace trace;
  trace.states = {{1, "INITIAL", {{"x", "1"}, {"y", "2"}}}};
  auto deltas = render_changed_bindings(trace);
  REQUIRE(deltas.size() == 1);
  CHECK(deltas[0].find("x = 1") != std::string::npos);
  CHECK(deltas[0].find("y = 2") != std::string::npos);
}

TEST_CASE("truncation keeps the first and last state under the cap") {
  FeedbackSynthesizer::Options options;
  options.body_cap = 4000;
  FeedbackSynthesizer synth(TemplateSet::builtin(), options);
  TlcVerdict v;
  v.klass = VerdictClass::kViolation;
  v.raw.exit_code = 12;
  v.trace = synthetic_trace(50);
  FeedbackMessage msg = synth.synthesize(v);
  CHECK(msg.body.size() <= 4000);
  CHECK(msg.body.find("State 1 (INITIAL)") != std::string::npos);
  CHECK(msg.body.find("State 50 (Step50)") != std::string::npos);
  CHECK(msg.body.find("states omitted") != std::string::npos);
}

TEST_CASE("template overrides load from a directory") {
  auto dir = std::filesystem::temp_directory_path() / "cobalt-test-templates";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "safe.txt");
    out << "custom-safe-text {invariant}";
  }
  TemplateSet t = TemplateSet::load_directory(dir);
  CHECK(t.safe == "custom-safe-text {invariant}");
  CHECK(t.violation == TemplateSet::builtin().violation);
  std::filesystem::remove_all(dir);
}

TEST_CASE("lint feedback names each ERROR rule") {
  FeedbackSynthesizer synth;
  LintReport report;
  report.findings.push_back(
      {Severity::kError, "UNBOUNDED_SET", "queue \\in Seq(Messages)"});
  report.findings.push_back({Severity::kWarn, "MISSING_TYPEOK", "TypeOK"});
  FeedbackMessage msg = synth.for_lint_failure(report);
  CHECK(msg.directive == Directive::kFixSyntax);
  CHECK(msg.body.find("UNBOUNDED_SET") != std::string::npos);
  CHECK(msg.body.find("MISSING_TYPEOK") == std::string::npos);
}
