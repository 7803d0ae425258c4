#pragma once

#include <stdexcept>
#include <string>

namespace radmort {

// Bad parameters, malformed configuration, or input data that violates a
// documented contract. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A required upstream artifact (file produced by an earlier pipeline stage)
// does not exist. The CLI maps this to exit code 2. The message names both
// the missing file and the stage that produces it.
class MissingArtifactError : public std::runtime_error {
public:
    explicit MissingArtifactError(const std::string& what) : std::runtime_error(what) {}
};

// Anything else that goes wrong at run time (I/O failure, numerical
// breakdown). The CLI maps this to exit code 3.
class RuntimeFailure : public std::runtime_error {
public:
    explicit RuntimeFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace radmort
