#pragma once

#include <stdexcept>
#include <string>

namespace cobalt {

// Extraction of the two artifacts from a generator reply.
enum class ExtractionFault {
  MissingModule,
  MissingConfig,
  AmbiguousBlocks,
  NoModuleHeader,
};

const char* to_string(ExtractionFault f);

class ExtractionError : public std::runtime_error {
 public:
  ExtractionError(ExtractionFault fault, std::string detail)
      : std::runtime_error(std::string(to_string(fault)) + ": " + detail),
        fault_(fault) {}
  ExtractionFault fault() const { return fault_; }

 private:
  ExtractionFault fault_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// TLC executable/runtime missing. Not a verdict; aborts the loop.
class SpawnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state block with a header but no conjunct lines. Indicates a
// TLC-format mismatch, which the generator cannot fix.
class MalformedBlock : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exit code said VIOLATION but no state blocks were found.
class ParseIncoherent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RoleOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReplayExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// BFS visited-set cap exceeded.
class StateExplosion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cobalt
