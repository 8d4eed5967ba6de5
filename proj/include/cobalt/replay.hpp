#pragma once

#include <filesystem>
#include <vector>

#include "cobalt/llm_gateway.hpp"
#include "cobalt/tlc_runner.hpp"

namespace cobalt {

// A scripted loop scenario: ordered generator replies plus the recorded
// TLC outputs they produced. JSON file with paths relative to its
// directory:
//
//   {
//     "description": "...",
//     "replies": ["replies/001.md", {"text": "inline reply"}],
//     "tlc_runs": [
//       {"stdout": "tlc/001.out", "exit_code": 255},
//       {"stdout": "tlc/002.out", "exit_code": 12, "duration_s": 0.29}
//     ]
//   }
//
// "tlc_runs" is optional; without it the scenario needs a live TLC.
// An entry with "timed_out": true carries no exit_code.
struct ReplayFixture {
  std::string description;
  std::vector<std::string> replies;
  std::vector<RawTlcOutput> tlc_runs;

  static ReplayFixture load(const std::filesystem::path& fixture_file);
};

// TlcExecutor that replays recorded outputs in order. Throws
// ReplayExhausted when the scenario needs more runs than were recorded.
class RecordedTlcExecutor : public TlcExecutor {
 public:
  explicit RecordedTlcExecutor(std::vector<RawTlcOutput> runs)
      : runs_(std::move(runs)) {}

  RawTlcOutput run(const std::filesystem::path& workspace,
                   const SpecArtifact& artifact,
                   const RunnerConfig& config) override;

  size_t calls() const { return cursor_; }

 private:
  std::vector<RawTlcOutput> runs_;
  size_t cursor_ = 0;
};

}  // namespace cobalt
