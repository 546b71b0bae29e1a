#pragma once

#include <stdexcept>
#include <string>

namespace seqtran {

// All recoverable failures in the library throw this. The message starts with a
// short machine-greppable phrase ("non-binary label", "no sequential path", ...)
// followed by context such as the task id or sample index.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace seqtran
