#include "cobalt/artifact.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <sstream>

namespace cobalt {

const char* to_string(ExtractionFault f) {
  switch (f) {
    case ExtractionFault::MissingModule: return "MissingModule";
    case ExtractionFault::MissingConfig: return "MissingConfig";
    case ExtractionFault::AmbiguousBlocks: return "AmbiguousBlocks";
    case ExtractionFault::NoModuleHeader: return "NoModuleHeader";
  }
  return "?";
}

namespace {

struct FencedBlock {
  std::string tag;  // lowercased info string, may be empty
  std::string body;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<FencedBlock> collect_fenced_blocks(const std::string& text) {
  std::vector<FencedBlock> blocks;
  std::istringstream in(text);
  std::string line;
  std::optional<FencedBlock> open;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.rfind("```", 0) == 0) {
      if (open) {
        blocks.push_back(std::move(*open));
        open.reset();
      } else {
        open = FencedBlock{lower(trim(t.substr(3))), ""};
      }
    } else if (open) {
      open->body += line;
      open->body += '\n';
    }
  }
  if (open) blocks.push_back(std::move(*open));  // unterminated fence
  return blocks;
}

const std::regex kModuleHeader(R"(^\s*-{4,}\s*MODULE\s+(\w+)\s*-{4,})");

bool starts_with_module_header(const std::string& body) {
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    return std::regex_search(line, kModuleHeader);
  }
  return false;
}

}  // namespace

std::string parse_module_header(const std::string& module_text) {
  std::istringstream in(module_text);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (std::regex_search(line, m, kModuleHeader)) return m[1];
  }
  throw ExtractionError(ExtractionFault::NoModuleHeader,
                        "no ---- MODULE <Name> ---- header found");
}

SpecArtifact extract_artifacts(const std::string& response_text) {
  auto blocks = collect_fenced_blocks(response_text);

  std::vector<const FencedBlock*> modules;
  std::vector<const FencedBlock*> configs;
  for (const auto& b : blocks) {
    if (b.tag == "tla") {
      modules.push_back(&b);
    } else if (b.tag == "cfg") {
      configs.push_back(&b);
    } else if (b.tag.empty() && starts_with_module_header(b.body)) {
      modules.push_back(&b);
    }
  }

  if (modules.size() > 1)
    throw ExtractionError(ExtractionFault::AmbiguousBlocks,
                          std::to_string(modules.size()) + " module blocks");
  if (configs.size() > 1)
    throw ExtractionError(ExtractionFault::AmbiguousBlocks,
                          std::to_string(configs.size()) + " config blocks");
  if (modules.empty())
    throw ExtractionError(ExtractionFault::MissingModule,
                          "no tla-tagged or header-bearing block");
  if (configs.empty())
    throw ExtractionError(ExtractionFault::MissingConfig,
                          "no cfg-tagged block");

  SpecArtifact art;
  art.module_text = modules.front()->body;
  art.config_text = configs.front()->body;
  art.module_name = parse_module_header(art.module_text);
  return art;
}

namespace {

// Splits a module into `Name == ...` definition blocks. A definition runs
// until the next top-level `Name ==` line.
std::vector<std::pair<std::string, std::string>> definition_blocks(
    const std::string& module_text) {
  static const std::regex def_start(R"(^(\w+)\s*==)");
  std::vector<std::pair<std::string, std::string>> defs;
  std::istringstream in(module_text);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (std::regex_search(line, m, def_start)) {
      defs.emplace_back(m[1], line + "\n");
    } else if (!defs.empty()) {
      defs.back().second += line + "\n";
    }
  }
  return defs;
}

std::vector<std::string> declared_constants(const std::string& module_text) {
  static const std::regex decl(R"(^\s*CONSTANTS?\b(.*))");
  static const std::regex name(R"(\w+)");
  std::vector<std::string> out;
  std::istringstream in(module_text);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (std::regex_search(line, m, decl)) {
      std::string rest = m[1];
      for (auto it = std::sregex_iterator(rest.begin(), rest.end(), name);
           it != std::sregex_iterator(); ++it) {
        out.push_back(it->str());
      }
    }
  }
  return out;
}

bool config_assigns(const std::string& config_text, const std::string& name) {
  std::regex assign("^\\s*" + name + "\\s*(=|<-)");
  std::istringstream in(config_text);
  std::string line;
  while (std::getline(in, line)) {
    if (std::regex_search(line, assign)) return true;
  }
  return false;
}

}  // namespace

LintReport lint_boundedness(const SpecArtifact& artifact) {
  LintReport report;

  static const std::regex unbounded(R"(\\in\s+(Nat|Int|STRING)\b)");
  static const std::regex seq_membership(R"(\\in\s+Seq\s*\()");
  static const std::regex len_bound(R"(Len\s*\(.*\)\s*(<=|<|\\leq))");

  // Rule (a): unbounded built-in sets inside Init / TypeOK.
  for (const auto& [name, body] : definition_blocks(artifact.module_text)) {
    if (name != "Init" && name != "TypeOK") continue;
    bool has_len_bound = std::regex_search(body, len_bound);
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
      if (std::regex_search(line, unbounded)) {
        report.findings.push_back(
            {Severity::kError, "UNBOUNDED_SET", trim(line)});
      } else if (std::regex_search(line, seq_membership) && !has_len_bound) {
        report.findings.push_back(
            {Severity::kError, "UNBOUNDED_SET", trim(line)});
      }
    }
  }

  // Rule (b): every module CONSTANT must be assigned in the config.
  for (const auto& c : declared_constants(artifact.module_text)) {
    if (!config_assigns(artifact.config_text, c)) {
      report.findings.push_back(
          {Severity::kError, "UNDECLARED_CONSTANT", c});
    }
  }

  // Rules (c)/(d): the two conventional definitions.
  static const std::regex safety(R"(^\s*SafetyInvariant\s*==)");
  static const std::regex typeok(R"(^\s*TypeOK\s*==)");
  bool has_safety = false, has_typeok = false;
  {
    std::istringstream in(artifact.module_text);
    std::string line;
    while (std::getline(in, line)) {
      if (std::regex_search(line, safety)) has_safety = true;
      if (std::regex_search(line, typeok)) has_typeok = true;
    }
  }
  if (!has_safety)
    report.findings.push_back(
        {Severity::kError, "MISSING_INVARIANT", "SafetyInvariant"});
  if (!has_typeok)
    report.findings.push_back({Severity::kWarn, "MISSING_TYPEOK", "TypeOK"});

  return report;
}

}  // namespace cobalt
