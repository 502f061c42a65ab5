#pragma once

#include <span>
#include <string>
#include <vector>

namespace whamcan {

/// Severity of a reported constraint finding. Advisories flag known model
/// inconsistencies without failing validation.
enum class Severity { Error, Advisory };

struct Violation {
    std::string field;
    std::string message;
    Severity severity = Severity::Error;
};

/// True if any entry has Error severity (advisories alone still validate).
bool has_errors(std::span<const Violation> violations);

/// One line per violation, "field: message" with advisories tagged.
std::string format_violations(std::span<const Violation> violations);

} // namespace whamcan
