#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "cobalt/artifact.hpp"

namespace cobalt {

enum class VerdictClass { kSafe, kViolation, kCompileError, kTimeout };

const char* to_string(VerdictClass c);

struct RawTlcOutput {
  std::optional<int> exit_code;  // absent on timeout
  std::string stdout_text;
  std::string stderr_text;
  double duration_s = 0.0;
  bool timed_out = false;
};

struct RunnerConfig {
  // Command template; placeholders {module}, {cfg}, {workspace} are
  // substituted before whitespace splitting (quotes respected).
  std::string tlc_invocation;
  double timeout_s = 60.0;
  std::filesystem::path workspace_root;
  bool keep_workspace = false;
  bool check_deadlock = false;  // TLC checks deadlock unless told not to
  // Exit-code mapping escape hatch; anything unmapped is COMPILE_ERROR.
  std::map<int, VerdictClass> exit_map = {{0, VerdictClass::kSafe},
                                          {12, VerdictClass::kViolation}};

  RunnerConfig();
};

// Resolves the default TLC invocation from COBALT_TLC_JAR, or an explicit
// jar path when given. Empty when no jar is configured.
std::string default_tlc_invocation(const std::string& jar_override = "");

// Writes <ModuleName>.tla and <ModuleName>.cfg into a fresh directory under
// workspace_root. Never reuses a prior invocation's directory.
std::filesystem::path prepare_workspace(const SpecArtifact& artifact,
                                        const RunnerConfig& config);

// Pluggable execution layer so loop tests can replay recorded TLC outputs.
class TlcExecutor {
 public:
  virtual ~TlcExecutor() = default;
  virtual RawTlcOutput run(const std::filesystem::path& workspace,
                           const SpecArtifact& artifact,
                           const RunnerConfig& config) = 0;
};

// Real child-process executor. Captures both streams, measures wall-clock
// duration, terminates the child on timeout.
class SubprocessTlcExecutor : public TlcExecutor {
 public:
  RawTlcOutput run(const std::filesystem::path& workspace,
                   const SpecArtifact& artifact,
                   const RunnerConfig& config) override;
};

RawTlcOutput run_tlc(const std::filesystem::path& workspace,
                     const SpecArtifact& artifact, const RunnerConfig& config);

VerdictClass classify_exit(const RawTlcOutput& raw, const RunnerConfig& config);
VerdictClass classify_exit(const RawTlcOutput& raw);

}  // namespace cobalt
