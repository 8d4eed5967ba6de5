#include "cobalt/replay.hpp"

#include <fstream>
#include <sstream>

#include "cobalt/errors.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace cobalt {

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ReplayFixture ReplayFixture::load(const fs::path& fixture_file) {
  json doc;
  try {
    doc = json::parse(read_file(fixture_file));
  } catch (const json::exception& e) {
    throw IoError("malformed replay fixture " + fixture_file.string() +
                  ": " + e.what());
  }
  fs::path base = fixture_file.parent_path();

  ReplayFixture fx;
  fx.description = doc.value("description", "");
  for (const auto& entry : doc.at("replies")) {
    if (entry.is_string())
      fx.replies.push_back(read_file(base / entry.get<std::string>()));
    else
      fx.replies.push_back(entry.at("text").get<std::string>());
  }
  if (doc.contains("tlc_runs")) {
    for (const auto& entry : doc["tlc_runs"]) {
      RawTlcOutput raw;
      if (entry.contains("stdout"))
        raw.stdout_text = read_file(base / entry["stdout"].get<std::string>());
      if (entry.contains("stderr"))
        raw.stderr_text = read_file(base / entry["stderr"].get<std::string>());
      raw.timed_out = entry.value("timed_out", false);
      if (!raw.timed_out) raw.exit_code = entry.at("exit_code").get<int>();
      raw.duration_s = entry.value("duration_s", 0.0);
      fx.tlc_runs.push_back(std::move(raw));
    }
  }
  return fx;
}

RawTlcOutput RecordedTlcExecutor::run(const fs::path&, const SpecArtifact&,
                                      const RunnerConfig&) {
  if (cursor_ >= runs_.size())
    throw ReplayExhausted("recorded TLC outputs exhausted after " +
                          std::to_string(runs_.size()) + " runs");
  return runs_[cursor_++];
}

}  // namespace cobalt
