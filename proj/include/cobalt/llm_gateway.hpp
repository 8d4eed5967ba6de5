#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "cobalt/errors.hpp"

namespace cobalt {

enum class Role { kSystem, kUser, kAssistant };

const char* to_string(Role r);

struct Turn {
  Role role;
  std::string content;
};

// Full multi-turn context. History is never truncated here; an oversized
// context is the backend's problem to reject.
class Conversation {
 public:
  explicit Conversation(std::string system_prompt)
      : system_prompt_(std::move(system_prompt)) {}

  // Roles must alternate USER/ASSISTANT after the initial user turn.
  // Throws RoleOrderError on consecutive same-role turns.
  void append_turn(Role role, std::string content);

  const std::string& system_prompt() const { return system_prompt_; }
  const std::vector<Turn>& turns() const { return turns_; }
  bool ends_with_user() const {
    return !turns_.empty() && turns_.back().role == Role::kUser;
  }

 private:
  std::string system_prompt_;
  std::vector<Turn> turns_;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string generate(const Conversation& conv) = 0;
  virtual std::string kind() const = 0;
};

// Chat-completion HTTP backend. Sends the system prompt plus the full
// role-tagged turn list; bearer token read from COBALT_API_KEY.
class HttpBackend : public GenerationBackend {
 public:
  struct Params {
    std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
    std::string model = "default";
    double temperature = 0.0;
    int timeout_s = 120;
  };

  explicit HttpBackend(Params params) : params_(std::move(params)) {}
  std::string generate(const Conversation& conv) override;
  std::string kind() const override { return "http"; }

 private:
  Params params_;
};

// Deterministic backend for offline tests: returns scripted replies in
// order; exhaustion is an error.
class ReplayBackend : public GenerationBackend {
 public:
  explicit ReplayBackend(std::vector<std::string> replies)
      : replies_(std::move(replies)) {}

  // Loads the "replies" list from a replay fixture JSON file.
  static ReplayBackend from_fixture(const std::filesystem::path& fixture);

  std::string generate(const Conversation& conv) override;
  std::string kind() const override { return "replay"; }
  size_t remaining() const { return replies_.size() - cursor_; }

 private:
  std::vector<std::string> replies_;
  size_t cursor_ = 0;
};

// Checks the precondition shared by every backend and dispatches.
// Records nothing itself; callers time the call for t_e2e accounting.
std::string generate(const Conversation& conv, GenerationBackend& backend);

}  // namespace cobalt
