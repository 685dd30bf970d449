#ifndef SCATTER_ERROR_HPP
#define SCATTER_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace scatter {

/// Base of every library error. kind() is a short tag suitable for
/// machine-parsable diagnostics ("input-domain", "parse", ...).
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string &what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string &kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define SCATTER_DEFINE_ERROR(Name, tag)                                        \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string &what) : Error(tag, what) {}               \
  }

SCATTER_DEFINE_ERROR(InputDomainError, "input-domain");
SCATTER_DEFINE_ERROR(DegenerateGeometryError, "degenerate-geometry");
SCATTER_DEFINE_ERROR(FitError, "fit-failure");
SCATTER_DEFINE_ERROR(SolverError, "solver");
SCATTER_DEFINE_ERROR(LoadError, "load");
SCATTER_DEFINE_ERROR(UndefinedMetricError, "undefined-metric");
SCATTER_DEFINE_ERROR(TrainingError, "training");
SCATTER_DEFINE_ERROR(ConfigError, "config");
SCATTER_DEFINE_ERROR(IoError, "io");
SCATTER_DEFINE_ERROR(LookupError, "lookup");
SCATTER_DEFINE_ERROR(PairingError, "pairing");

#undef SCATTER_DEFINE_ERROR

// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string &what)
      : Error("parse", "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace scatter

#endif // SCATTER_ERROR_HPP
