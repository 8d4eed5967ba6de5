#include "cobalt/repl_engine.hpp"

#include "cobalt/replay.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cobalt;
namespace fs = std::filesystem;

namespace {

// Counts invocations; useful for asserting the lint gate short-circuit.
class CountingRecordedTlc : public RecordedTlcExecutor {
 public:
  using RecordedTlcExecutor::RecordedTlcExecutor;
};

LoopConfig test_loop_config() {
  LoopConfig config;
  config.system_prompt = "system prompt under test";
  config.runner.tlc_invocation = "unused-under-recorded-executor";
  config.runner.workspace_root =
      fs::temp_directory_path() / "cobalt-test-engine";
  return config;
}

ReplayFixture load_fixture(const std::string& name) {
  return ReplayFixture::load(testutil::fixtures_dir() / "replay" / name /
                             "fixture.json");
}

}  // namespace

TEST_CASE("compile-error recovery converges in two iterations") {
  ReplayFixture fx = load_fixture("t3_compile_recovery");
  ReplayBackend backend(fx.replies);
  RecordedTlcExecutor tlc(fx.tlc_runs);
  ReplEngine engine(test_loop_config(), backend, tlc);

  RunRecord record = engine.run_loop("t3", "model the bridge");
  CHECK(record.terminal == Terminal::kBugFound);
  REQUIRE(record.iterations.size() == 2);
  CHECK(record.metrics.iterations_to_bug == 2);
  CHECK(record.metrics.trace_depth == 3);

  // iteration 1 carried the diagnostic excerpt verbatim
  const auto& first = record.iterations[0];
  REQUIRE(first.verdict.has_value());
  CHECK(first.verdict->klass == VerdictClass::kCompileError);
  CHECK(first.feedback_body.find(
            first.verdict->diagnostic->message_excerpt) !=
        std::string::npos);
  CHECK(first.directive == Directive::kFixSyntax);

  const auto& second = record.iterations[1];
  CHECK(second.verdict->klass == VerdictClass::kViolation);
}

TEST_CASE("first-shot convergence with depth 4") {
  ReplayFixture fx = load_fixture("t2_first_shot");
  ReplayBackend backend(fx.replies);
  RecordedTlcExecutor tlc(fx.tlc_runs);
  ReplEngine engine(test_loop_config(), backend, tlc);

  RunRecord record = engine.run_loop("t2", "model the optimistic relay");
  CHECK(record.terminal == Terminal::kBugFound);
  CHECK(record.metrics.iterations_to_bug == 1);
  CHECK(record.metrics.trace_depth == 4);
  CHECK(record.metrics.states_explored == 15);
  // recorded TLC duration flows through to the aggregate metric
  CHECK(record.metrics.t_tlc_total_s == doctest::Approx(0.30));
}

TEST_CASE("replay runs are deterministic modulo timings") {
  auto run_once = [] {
    ReplayFixture fx = load_fixture("t3_compile_recovery");
    ReplayBackend backend(fx.replies);
    RecordedTlcExecutor tlc(fx.tlc_runs);
    ReplEngine engine(test_loop_config(), backend, tlc);
    auto doc =
        run_record_to_json(engine.run_loop("t3", "model the bridge"));
    // strip wall-clock fields
    doc["metrics"].erase("t_e2e_s");
    for (auto& it : doc["iterations"]) it.erase("t_llm_s");
    return doc;
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("fence-less replies exhaust the budget") {
  ReplayBackend backend({"prose only, no blocks", "still no blocks"});
  RecordedTlcExecutor tlc({});
  LoopConfig config = test_loop_config();
  config.max_iterations = 2;
  ReplEngine engine(config, backend, tlc);

  RunRecord record = engine.run_loop("bad", "model something");
  CHECK(record.terminal == Terminal::kBudgetExhausted);
  REQUIRE(record.iterations.size() == 2);
  for (const auto& it : record.iterations) {
    CHECK_FALSE(it.artifact.has_value());
    CHECK(it.feedback_body.find("MissingModule") != std::string::npos);
  }
  CHECK(tlc.calls() == 0);
}

TEST_CASE("lint gate blocks the TLC call") {
  // Nat-typed variable: lint rejects, TLC must never run.
  std::string reply =
      "```tla\n"
      "---- MODULE Bad ----\n"
      "CONSTANTS MaxN\n"
      "Init ==\n"
      "    /\\ x \\in Nat\n"
      "SafetyInvariant == TRUE\n"
      "TypeOK == TRUE\n"
      "====\n"
      "```\n"
      "```cfg\nINIT Init\nNEXT Next\nCONSTANTS\n    MaxN = 3\n"
      "INVARIANT SafetyInvariant\n```\n";
  ReplayBackend backend({reply});
  RecordedTlcExecutor tlc({});
  LoopConfig config = test_loop_config();
  config.max_iterations = 1;
  ReplEngine engine(config, backend, tlc);

  RunRecord record = engine.run_loop("bad", "model");
  CHECK(record.terminal == Terminal::kBudgetExhausted);
  CHECK(tlc.calls() == 0);
  REQUIRE(record.iterations.size() == 1);
  CHECK(record.iterations[0].feedback_body.find("UNBOUNDED_SET") !=
        std::string::npos);

  SUBCASE("disabling the gate sends it to TLC") {
    ReplayBackend backend2({reply});
    std::vector<RawTlcOutput> runs(1);
    runs[0].exit_code = 255;
    runs[0].stdout_text = "***Parse Error***\nsomething\n";
    RecordedTlcExecutor tlc2(runs);
    LoopConfig config2 = test_loop_config();
    config2.max_iterations = 1;
    config2.lint_blocking = false;
    ReplEngine engine2(config2, backend2, tlc2);
    RunRecord record2 = engine2.run_loop("bad", "model");
    CHECK(tlc2.calls() == 1);
  }
}

TEST_CASE("SAFE verdict feeds back by default, terminates on policy") {
  std::string reply = testutil::read_file(testutil::fixtures_dir() /
                                          "replay" / "t2_first_shot" /
                                          "replies" / "001.md");
  RawTlcOutput safe_run;
  safe_run.exit_code = 0;
  safe_run.stdout_text = testutil::read_file(testutil::fixtures_dir() /
                                             "tlc" / "safe.out");

  SUBCASE("on_safe=feedback exhausts budget as SAFE_TERMINAL") {
    ReplayBackend backend({reply, reply});
    RecordedTlcExecutor tlc({safe_run, safe_run});
    LoopConfig config = test_loop_config();
    config.max_iterations = 2;
    ReplEngine engine(config, backend, tlc);
    RunRecord record = engine.run_loop("t", "model");
    CHECK(record.terminal == Terminal::kSafeTerminal);
    CHECK(record.iterations.size() == 2);
    CHECK(record.iterations[0].directive == Directive::kRemodel);
  }

  SUBCASE("on_safe=terminate stops at the first SAFE") {
    ReplayBackend backend({reply, reply});
    RecordedTlcExecutor tlc({safe_run, safe_run});
    LoopConfig config = test_loop_config();
    config.on_safe = OnSafePolicy::kTerminate;
    ReplEngine engine(config, backend, tlc);
    RunRecord record = engine.run_loop("t", "model");
    CHECK(record.terminal == Terminal::kSafeTerminal);
    CHECK(record.iterations.size() == 1);
  }
}

TEST_CASE("backend exhaustion aborts the run") {
  ReplayBackend backend({});
  RecordedTlcExecutor tlc({});
  ReplEngine engine(test_loop_config(), backend, tlc);
  RunRecord record = engine.run_loop("t", "model");
  CHECK(record.terminal == Terminal::kAborted);
  CHECK(record.abort_reason.find("exhausted") != std::string::npos);
}

TEST_CASE("iteration count never exceeds the budget") {
  for (int budget = 1; budget <= 4; ++budget) {
    std::vector<std::string> replies(8, "no fences here");
    ReplayBackend backend(replies);
    RecordedTlcExecutor tlc({});
    LoopConfig config = test_loop_config();
    config.max_iterations = budget;
    ReplEngine engine(config, backend, tlc);
    RunRecord record = engine.run_loop("t", "model");
    CHECK(static_cast<int>(record.iterations.size()) <= budget);
  }
}

TEST_CASE("check_ground_truth reports iteration zero") {
  std::vector<RawTlcOutput> runs(1);
  runs[0].exit_code = 12;
  runs[0].stdout_text = testutil::read_file(testutil::fixtures_dir() / "tlc" /
                                            "t1_violation.out");
  runs[0].duration_s = 0.27;
  RecordedTlcExecutor tlc(runs);
  RunRecord record =
      check_ground_truth(testutil::corpus_dir() / "T1.tla",
                         testutil::corpus_dir() / "T1.cfg",
                         test_loop_config(), tlc);
  CHECK(record.terminal == Terminal::kBugFound);
  CHECK(record.metrics.iterations_to_bug == 0);
  CHECK(record.metrics.trace_depth == 4);
}

TEST_CASE("check_ground_truth on a SAFE spec") {
  std::vector<RawTlcOutput> runs(1);
  runs[0].exit_code = 0;
  runs[0].stdout_text = "Model checking completed. No error has been found.\n";
  RecordedTlcExecutor tlc(runs);
  RunRecord record =
      check_ground_truth(testutil::corpus_dir() / "T1.tla",
                         testutil::corpus_dir() / "T1.cfg",
                         test_loop_config(), tlc);
  CHECK(record.terminal == Terminal::kSafeTerminal);
}

TEST_CASE("check_ground_truth with a missing file aborts") {
  RecordedTlcExecutor tlc({});
  RunRecord record = check_ground_truth("/no/such/file.tla",
                                        "/no/such/file.cfg",
                                        test_loop_config(), tlc);
  CHECK(record.terminal == Terminal::kAborted);
  CHECK(record.abort_reason.find("cannot read") != std::string::npos);
}

TEST_CASE("run record serializes with schema version and survives reload") {
  ReplayFixture fx = load_fixture("t2_first_shot");
  ReplayBackend backend(fx.replies);
  RecordedTlcExecutor tlc(fx.tlc_runs);
  ReplEngine engine(test_loop_config(), backend, tlc);
  RunRecord record = engine.run_loop("t2", "model");

  auto path = fs::temp_directory_path() / "cobalt-test-record.json";
  write_run_record(record, path);
  auto doc = nlohmann::json::parse(testutil::read_file(path));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["terminal"] == "BUG_FOUND");
  CHECK(doc["iterations"].size() == 1);
  CHECK(doc["iterations"][0]["artifact"]["module_name"] == "T2Bridge");
  CHECK(doc["iterations"][0]["verdict"]["trace"]["states"].size() == 4);
  CHECK(doc["metrics"]["iterations_to_bug"] == 1);
  fs::remove(path);
}
