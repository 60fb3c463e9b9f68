#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace erl {

// Root of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// --- pool ---------------------------------------------------------------

class DuplicateScenarioId : public Error {
 public:
  explicit DuplicateScenarioId(const std::string& id)
      : Error("duplicate scenario_id: " + id), scenario_id_(id) {}
  const std::string& scenario_id() const { return scenario_id_; }

 private:
  std::string scenario_id_;
};

class InvalidHeuristic : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// --- prompts and reflection ----------------------------------------------

class TemplateError : public Error {
 public:
  using Error::Error;
};

class EmptyReflection : public Error {
 public:
  EmptyReflection() : Error("reflection text is empty") {}
};

class UnparseableVerdict : public Error {
 public:
  using Error::Error;
};

// --- retrieval -------------------------------------------------------------

class EmptyPool : public Error {
 public:
  EmptyPool() : Error("empty pool") {}
};

class MalformedRankerOutput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("cosine of an all-zero vector is undefined") {}
};

// --- backends ----------------------------------------------------------------

// Infrastructure failures. These abort evaluations; everything else is data.
class BackendError : public Error {
 public:
  using Error::Error;
};

class TransportError : public BackendError {
 public:
  TransportError(int status, const std::string& body_excerpt, const std::string& what)
      : BackendError(what), status_(status), body_excerpt_(body_excerpt) {}
  int status() const { return status_; }
  const std::string& body_excerpt() const { return body_excerpt_; }

 private:
  int status_;
  std::string body_excerpt_;
};

class TimeoutError : public BackendError {
 public:
  using BackendError::BackendError;
};

class BackendScriptExhausted : public BackendError {
 public:
  explicit BackendScriptExhausted(const std::string& session)
      : BackendError("scripted backend has no responses left for session '" + session + "'") {}
};

// A scripted response's guard substring was not found in the request.
class ScriptGuardViolation : public BackendError {
 public:
  using BackendError::BackendError;
};

// --- environment -------------------------------------------------------------

class SchemaError : public Error {
 public:
  SchemaError(const std::string& field_path, const std::string& what)
      : Error(field_path + ": " + what), field_path_(field_path) {}
  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

// --- evaluation --------------------------------------------------------------

class MissingPrice : public Error {
 public:
  using Error::Error;
};

}  // namespace erl
