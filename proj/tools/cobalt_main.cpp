// cobalt - neuro-symbolic TLA+ verification loop for bridge protocols.
//
// Subcommands:
//   verify  run the generate/check/feed-back loop on a target description
//   parse   parse a stored raw TLC output (with .exit sidecar)
//   oracle  BFS shortest counterexample over the built-in bridge models

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cobalt/bridge_oracle.hpp"
#include "cobalt/repl_engine.hpp"
#include "cobalt/replay.hpp"
#include "cobalt/trace_parser.hpp"

namespace fs = std::filesystem;
using namespace cobalt;

namespace {

constexpr int kUsageExit = 64;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string default_system_prompt_path() {
  return std::string(COBALT_SOURCE_DIR) + "/data/system_prompt.txt";
}

int terminal_to_exit(Terminal t) {
  switch (t) {
    case Terminal::kBugFound: return 0;
    case Terminal::kSafeTerminal: return 1;
    case Terminal::kBudgetExhausted: return 2;
    case Terminal::kAborted: return 3;
  }
  return 3;
}

void print_trace(const CounterexampleTrace& trace) {
  for (const auto& st : trace.states) {
    std::cout << "State " << st.index << ": <"
              << (st.action == kInitialAction ? "Initial predicate"
                                              : st.action)
              << ">\n";
    for (const auto& [k, v] : st.bindings)
      std::cout << "/\\ " << k << " = " << v << "\n";
    std::cout << "\n";
  }
  if (trace.violated_invariant)
    std::cout << "Violated invariant: " << *trace.violated_invariant << "\n";
  if (trace.states_explored)
    std::cout << "Distinct states explored: " << *trace.states_explored
              << "\n";
}

struct VerifyOptions {
  std::string target_file;
  std::string backend = "http";
  std::string fixture;
  std::string tlc_path;
  int max_iters = 4;
  double timeout_s = 60.0;
  std::string out_path;
  std::vector<std::string> ground_truth;  // <tla> <cfg>
  std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model = "default";
  double temperature = 0.0;
  std::string system_prompt_path = default_system_prompt_path();
  std::string on_safe = "feedback";
  bool no_lint_gate = false;
  bool keep_workspace = false;
  bool confirmation_turn = false;
};

int run_verify(const VerifyOptions& opt) {
  LoopConfig config;
  config.max_iterations = opt.max_iters;
  config.on_safe = opt.on_safe == "terminate" ? OnSafePolicy::kTerminate
                                              : OnSafePolicy::kFeedback;
  config.lint_blocking = !opt.no_lint_gate;
  config.confirmation_turn = opt.confirmation_turn;
  config.runner.timeout_s = opt.timeout_s;
  config.runner.keep_workspace = opt.keep_workspace;
  if (!opt.tlc_path.empty())
    config.runner.tlc_invocation = default_tlc_invocation(opt.tlc_path);

  RunRecord record;
  if (!opt.ground_truth.empty()) {
    SubprocessTlcExecutor tlc;
    record = check_ground_truth(opt.ground_truth[0], opt.ground_truth[1],
                                config, tlc);
  } else {
    try {
      config.system_prompt = read_file(opt.system_prompt_path);
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kUsageExit;
    }
    std::string target = read_file(opt.target_file);

    std::unique_ptr<GenerationBackend> backend;
    std::unique_ptr<TlcExecutor> tlc;
    if (opt.backend == "replay") {
      if (opt.fixture.empty()) {
        std::cerr << "error: --backend replay requires --fixture\n";
        return kUsageExit;
      }
      fs::path fixture_file = fs::path(opt.fixture);
      if (fs::is_directory(fixture_file)) fixture_file /= "fixture.json";
      ReplayFixture fx = ReplayFixture::load(fixture_file);
      backend = std::make_unique<ReplayBackend>(fx.replies);
      if (!fx.tlc_runs.empty())
        tlc = std::make_unique<RecordedTlcExecutor>(fx.tlc_runs);
    } else {
      HttpBackend::Params params;
      params.endpoint = opt.endpoint;
      params.model = opt.model;
      params.temperature = opt.temperature;
      backend = std::make_unique<HttpBackend>(params);
    }
    if (!tlc) tlc = std::make_unique<SubprocessTlcExecutor>();

    ReplEngine engine(config, *backend, *tlc);
    record = engine.run_loop(fs::path(opt.target_file).stem().string(),
                             target);
  }

  fs::path out = opt.out_path.empty()
                     ? fs::path(record.target_id + ".runrecord.json")
                     : fs::path(opt.out_path);
  write_run_record(record, out);

  std::cout << "terminal: " << to_string(record.terminal);
  if (record.terminal == Terminal::kAborted)
    std::cout << " (" << record.abort_reason << ")";
  std::cout << "\niterations: " << record.iterations.size()
            << "\niterations_to_bug: " << record.metrics.iterations_to_bug
            << "\ntrace_depth: " << record.metrics.trace_depth;
  if (record.metrics.states_explored)
    std::cout << "\nstates_explored: " << *record.metrics.states_explored;
  std::cout << "\nt_tlc_total_s: " << record.metrics.t_tlc_total_s
            << "\nt_e2e_s: " << record.metrics.t_e2e_s
            << "\nrun record: " << fs::absolute(out).string() << "\n";
  return terminal_to_exit(record.terminal);
}

int run_parse(const std::string& out_file, bool as_json) {
  fs::path out_path(out_file);
  fs::path exit_path = out_path;
  exit_path.replace_extension(".exit");

  RawTlcOutput raw;
  raw.stdout_text = read_file(out_path);
  std::string exit_text = read_file(exit_path);
  if (exit_text.find("timeout") != std::string::npos) {
    raw.timed_out = true;
  } else {
    raw.exit_code = std::stoi(exit_text);
  }

  TlcVerdict verdict = parse_verdict(raw);
  if (as_json) {
    nlohmann::json doc = {{"class", to_string(verdict.klass)}};
    if (verdict.trace) {
      nlohmann::json states = nlohmann::json::array();
      for (const auto& st : verdict.trace->states) {
        nlohmann::json bindings = nlohmann::json::object();
        for (const auto& [k, v] : st.bindings) bindings[k] = v;
        states.push_back({{"index", st.index},
                          {"action", st.action},
                          {"bindings", bindings}});
      }
      doc["trace"] = {{"states", states}};
      if (verdict.trace->violated_invariant)
        doc["trace"]["violated_invariant"] = *verdict.trace->violated_invariant;
      if (verdict.trace->states_explored)
        doc["trace"]["states_explored"] = *verdict.trace->states_explored;
    }
    if (verdict.diagnostic)
      doc["diagnostic"] = verdict.diagnostic->message_excerpt;
    std::cout << doc.dump(2) << "\n";
    return 0;
  }

  std::cout << to_string(verdict.klass) << "\n";
  if (verdict.trace) {
    std::cout << "\n";
    print_trace(*verdict.trace);
  }
  if (verdict.diagnostic)
    std::cout << "\n" << verdict.diagnostic->message_excerpt << "\n";
  return 0;
}

int run_oracle(const std::string& model_id, int max_tokens, int max_messages,
               long state_cap) {
  BridgeModel model;
  if (model_id == "t1") {
    model = t1_model(max_tokens);
  } else if (model_id == "t2") {
    model = t2_model(max_tokens);
  } else if (model_id == "t3") {
    model = t3_model(max_messages, max_tokens);
  } else {
    std::cerr << "error: unknown model id '" << model_id
              << "' (expected t1, t2, or t3)\n";
    return kUsageExit;
  }

  OracleResult result = bfs_shortest_counterexample(model, state_cap);
  if (!result.violation_found) {
    std::cout << "SAFE: invariant holds on all " << result.distinct_states
              << " reachable states\n";
    return 1;
  }
  std::cout << render_oracle_trace(result.trace);
  std::cout << "Depth: " << result.trace.depth() << "\n";
  std::cout << "Distinct states explored: " << result.distinct_states << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"COBALT: TLC-in-the-loop bridge protocol verification"};
  app.require_subcommand(1);
  app.set_config("--config");

  VerifyOptions vopt;
  auto* verify = app.add_subcommand(
      "verify", "Run the verification loop on a protocol description");
  verify->add_option("target", vopt.target_file,
                     "Protocol description file (markdown/text)");
  verify->add_option("--backend", vopt.backend, "Generator backend")
      ->check(CLI::IsMember({"http", "replay"}));
  verify->add_option("--fixture", vopt.fixture,
                     "Replay fixture file or directory");
  verify->add_option("--tlc-path", vopt.tlc_path,
                     "Path to the TLA+ tools archive (tla2tools.jar)")
      ->envname("COBALT_TLC_JAR");
  verify->add_option("--max-iters", vopt.max_iters, "Iteration budget")
      ->check(CLI::PositiveNumber);
  verify->add_option("--timeout-s", vopt.timeout_s,
                     "TLC wall-clock limit in seconds");
  verify->add_option("--out", vopt.out_path, "Run record output path");
  verify
      ->add_option("--ground-truth", vopt.ground_truth,
                   "Check a human-written spec: <module.tla> <module.cfg>")
      ->expected(2);
  verify->add_option("--endpoint", vopt.endpoint,
                     "Chat-completion endpoint URL");
  verify->add_option("--model", vopt.model, "Model name");
  verify->add_option("--temperature", vopt.temperature, "Sampling temperature");
  verify->add_option("--system-prompt", vopt.system_prompt_path,
                     "System prompt file");
  verify->add_option("--on-safe", vopt.on_safe, "Policy for a SAFE verdict")
      ->check(CLI::IsMember({"terminate", "feedback"}));
  verify->add_flag("--no-lint-gate", vopt.no_lint_gate,
                   "Send artifacts to TLC even when lint finds errors");
  verify->add_flag("--keep-workspace", vopt.keep_workspace,
                   "Keep TLC workspaces for debugging");
  verify->add_flag("--confirmation-turn", vopt.confirmation_turn,
                   "Ask the generator to confirm a violation before exit");

  std::string parse_file;
  bool parse_json = false;
  auto* parse =
      app.add_subcommand("parse", "Parse a stored raw TLC output file");
  parse->add_option("output", parse_file, "TLC stdout file (.exit sidecar)")
      ->required();
  parse->add_flag("--json", parse_json, "Machine-readable output");

  std::string oracle_id;
  int oracle_max_tokens = 3, oracle_max_messages = 3;
  long oracle_cap = 1'000'000;
  auto* oracle = app.add_subcommand(
      "oracle", "BFS shortest counterexample over a built-in bridge model");
  oracle->add_option("model", oracle_id, "Model id: t1, t2, or t3")
      ->required();
  oracle->add_option("--max-tokens", oracle_max_tokens, "MaxTokens constant");
  oracle->add_option("--max-messages", oracle_max_messages,
                     "MaxMessages constant (t3)");
  oracle->add_option("--state-cap", oracle_cap, "Visited-state explosion cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  try {
    if (verify->parsed()) {
      if (vopt.ground_truth.empty()) {
        if (vopt.target_file.empty() || !fs::exists(vopt.target_file)) {
          std::cerr << "error: target file missing or unreadable\n"
                    << verify->help();
          return kUsageExit;
        }
      } else {
        for (const auto& p : vopt.ground_truth) {
          if (!fs::exists(p)) {
            std::cerr << "error: ground-truth file missing: " << p << "\n";
            return kUsageExit;
          }
        }
      }
      return run_verify(vopt);
    }
    if (parse->parsed()) return run_parse(parse_file, parse_json);
    if (oracle->parsed())
      return run_oracle(oracle_id, oracle_max_tokens, oracle_max_messages,
                        oracle_cap);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return kUsageExit;
}
