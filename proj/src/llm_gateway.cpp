#include "cobalt/llm_gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cobalt/replay.hpp"
#include "httplib.h"
#include "json.hpp"

using nlohmann::json;

namespace cobalt {

const char* to_string(Role r) {
  switch (r) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "?";
}

void Conversation::append_turn(Role role, std::string content) {
  if (role == Role::kSystem)
    throw RoleOrderError("system text lives in system_prompt, not a turn");
  if (!turns_.empty() && turns_.back().role == role)
    throw RoleOrderError(std::string("consecutive ") + to_string(role) +
                         " turns");
  if (turns_.empty() && role != Role::kUser)
    throw RoleOrderError("conversation must open with a user turn");
  turns_.push_back({role, std::move(content)});
}

namespace {

struct SplitUrl {
  std::string host_part;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  size_t path_start = url.find('/', scheme_end == std::string::npos
                                        ? 0
                                        : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string HttpBackend::generate(const Conversation& conv) {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", conv.system_prompt()}});
  for (const auto& t : conv.turns())
    messages.push_back({{"role", to_string(t.role)}, {"content", t.content}});

  json request = {{"model", params_.model},
                  {"temperature", params_.temperature},
                  {"messages", messages}};

  auto [host, path] = split_url(params_.endpoint);
  httplib::Client client(host);
  client.set_read_timeout(params_.timeout_s, 0);
  client.set_connection_timeout(params_.timeout_s, 0);
  if (const char* key = std::getenv("COBALT_API_KEY"))
    client.set_bearer_token_auth(key);

  auto res = client.Post(path, request.dump(), "application/json");
  if (!res)
    throw BackendError("HTTP backend unreachable: " + params_.endpoint +
                       " (" + httplib::to_string(res.error()) + ")");
  if (res->status != 200)
    throw BackendError("HTTP backend returned status " +
                       std::to_string(res->status) + ": " + res->body);

  try {
    json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed completion response: ") +
                       e.what());
  }
}

ReplayBackend ReplayBackend::from_fixture(
    const std::filesystem::path& fixture) {
  return ReplayBackend(ReplayFixture::load(fixture).replies);
}

std::string ReplayBackend::generate(const Conversation&) {
  if (cursor_ >= replies_.size())
    throw ReplayExhausted("replay fixture exhausted after " +
                          std::to_string(replies_.size()) + " replies");
  return replies_[cursor_++];
}

std::string generate(const Conversation& conv, GenerationBackend& backend) {
  if (!conv.ends_with_user())
    throw RoleOrderError("generation requires the conversation to end with "
                         "a user turn");
  return backend.generate(conv);
}

}  // namespace cobalt
