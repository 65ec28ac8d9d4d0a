#pragma once

#include <stdexcept>
#include <string>

namespace apgp {

// Error hierarchy shared by the whole library. Each type maps to one
// machine-parsable category used by the CLI front end.
struct Error : std::runtime_error {
    Error(std::string category, const std::string& msg)
        : std::runtime_error(msg), category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

  private:
    std::string category_;
};

struct EmptyShape : Error {
    explicit EmptyShape(const std::string& msg) : Error("empty-shape", msg) {}
};

struct InvalidSequence : Error {
    explicit InvalidSequence(const std::string& msg) : Error("invalid-sequence", msg) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& msg) : Error("length-mismatch", msg) {}
};

struct MalformedStructure : Error {
    explicit MalformedStructure(const std::string& msg) : Error("malformed-structure", msg) {}
};

struct IngestInconsistent : Error {
    explicit IngestInconsistent(const std::string& msg) : Error("ingest-inconsistent", msg) {}
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& msg) : Error("not-positive-definite", msg) {}
};

struct NoClasses : Error {
    explicit NoClasses(const std::string& msg) : Error("no-classes", msg) {}
};

struct CorrelationUndefined : Error {
    explicit CorrelationUndefined(const std::string& msg) : Error("correlation-undefined", msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io", msg) {}
};

}  // namespace apgp
