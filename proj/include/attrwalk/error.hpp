#pragma once

#include <stdexcept>
#include <string>

namespace attrwalk {

enum class ErrorKind {
  io,        // missing or unreadable file
  parse,     // malformed input text
  input,     // semantically invalid input (empty graph, empty score list)
  config,    // bad parameter value or unknown option
  data,      // non-finite or otherwise unusable values
  shape,     // dimension mismatch between matrices/vectors
  schema,    // column names / attribute layout mismatch
  format,    // bad serialized artifact (version, truncation)
  split,     // infeasible train/test edge split
  coverage,  // token missing from an embedding vocabulary
  training,  // degenerate training input (single-class labels)
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::input: return "input";
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::shape: return "shape";
    case ErrorKind::schema: return "schema";
    case ErrorKind::format: return "format";
    case ErrorKind::split: return "split";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::training: return "training";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + msg), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace attrwalk
