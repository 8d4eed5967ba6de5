#include "cobalt/trace_parser.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "cobalt/errors.hpp"

namespace cobalt {

namespace {

const std::regex kStateHeader(R"(^State (\d+): <(\w+))");
const std::regex kConjunct(R"(^/\\ (\w+) = (.*)$)");
const std::regex kViolated(R"(Invariant (\w+) is violated)");
const std::regex kDistinctStates(R"((\d+) distinct states found)");

std::string rstrip(const std::string& s) {
  auto e = s.find_last_not_of(" \t\r\n");
  return e == std::string::npos ? "" : s.substr(0, e + 1);
}

std::string lstrip(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b);
}

}  // namespace

std::vector<StateBlock> segment_states(const std::string& stdout_text) {
  std::vector<StateBlock> blocks;
  std::istringstream in(stdout_text);
  std::string line;
  StateBlock* open = nullptr;
  std::vector<std::pair<int, StateBlock>> numbered;
  while (std::getline(in, line)) {
    line = rstrip(line);
    std::smatch m;
    if (std::regex_search(line, m, kStateHeader)) {
      numbered.push_back({std::stoi(m[1]), StateBlock{line, ""}});
      open = &numbered.back().second;
    } else if (open) {
      open->body += line;
      open->body += '\n';
    }
  }
  std::stable_sort(numbered.begin(), numbered.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [n, b] : numbered) blocks.push_back(std::move(b));
  return blocks;
}

std::pair<std::string, std::vector<std::pair<std::string, std::string>>>
parse_bindings(const StateBlock& block) {
  std::smatch m;
  std::string action;
  if (std::regex_search(block.header, m, kStateHeader)) {
    action = m[2];
    if (action == "Initial") action = kInitialAction;  // <Initial predicate>
  }

  std::vector<std::pair<std::string, std::string>> bindings;
  bool accumulating = false;
  std::istringstream in(block.body);
  std::string line;
  while (std::getline(in, line)) {
    line = rstrip(line);
    if (std::regex_match(line, m, kConjunct)) {
      bindings.emplace_back(m[1], m[2]);
      accumulating = true;
    } else if (line.empty()) {
      accumulating = false;
    } else if (accumulating && (line[0] == ' ' || line[0] == '\t')) {
      // TLC wraps long values onto indented continuation lines.
      bindings.back().second += " " + lstrip(line);
    } else {
      accumulating = false;  // summary or other non-trace content
    }
  }

  if (bindings.empty())
    throw MalformedBlock("state block without conjunct lines: " +
                         block.header);
  return {action, bindings};
}

namespace {

const char* kErrorMarkers[] = {
    "***Parse Error***", "Error:", "Fatal errors",
    "Semantic error",    "Lexical error",
};

CompileDiagnostic extract_diagnostic(const RawTlcOutput& raw) {
  CompileDiagnostic diag;
  diag.full_output = raw.stdout_text + raw.stderr_text;

  size_t start = std::string::npos;
  for (const char* marker : kErrorMarkers) {
    size_t pos = diag.full_output.find(marker);
    if (pos != std::string::npos) {
      // back up to the start of the marker's line
      size_t bol = diag.full_output.rfind('\n', pos);
      bol = (bol == std::string::npos) ? 0 : bol + 1;
      start = std::min(start, bol);
    }
  }
  if (start == std::string::npos) {
    diag.message_excerpt = diag.full_output;
    return diag;
  }
  // excerpt runs to the end of the message paragraph (first blank line)
  size_t end = diag.full_output.find("\n\n", start);
  if (end == std::string::npos) end = diag.full_output.size();
  diag.message_excerpt = diag.full_output.substr(start, end - start);
  return diag;
}

}  // namespace

TlcVerdict parse_verdict(const RawTlcOutput& raw, const RunnerConfig& config) {
  TlcVerdict verdict;
  verdict.raw = raw;
  verdict.klass = classify_exit(raw, config);

  switch (verdict.klass) {
    case VerdictClass::kSafe:
    case VerdictClass::kTimeout:
      break;
    case VerdictClass::kViolation: {
      auto blocks = segment_states(raw.stdout_text);
      if (blocks.empty())
        throw ParseIncoherent(
            "exit code says VIOLATION but no state blocks found");
      CounterexampleTrace trace;
      std::smatch m;
      for (size_t i = 0; i < blocks.size(); ++i) {
        auto [action, bindings] = parse_bindings(blocks[i]);
        TraceState st;
        std::regex_search(blocks[i].header, m, kStateHeader);
        st.index = std::stoi(m[1]);
        st.action = action;
        st.bindings = std::move(bindings);
        trace.states.push_back(std::move(st));
      }
      if (std::regex_search(raw.stdout_text, m, kViolated))
        trace.violated_invariant = m[1];
      if (std::regex_search(raw.stdout_text, m, kDistinctStates))
        trace.states_explored = std::stol(m[1]);
      verdict.trace = std::move(trace);
      break;
    }
    case VerdictClass::kCompileError:
      verdict.diagnostic = extract_diagnostic(raw);
      break;
  }
  return verdict;
}

TlcVerdict parse_verdict(const RawTlcOutput& raw) {
  return parse_verdict(raw, RunnerConfig{});
}

}  // namespace cobalt
