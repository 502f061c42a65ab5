#include "whamcan/validation.hpp"

#include <sstream>

namespace whamcan {

bool has_errors(std::span<const Violation> violations) {
    for (const auto& v : violations) {
        if (v.severity == Severity::Error) return true;
    }
    return false;
}

std::string format_violations(std::span<const Violation> violations) {
    std::ostringstream out;
    bool first = true;
    for (const auto& v : violations) {
        if (!first) out << '\n';
        first = false;
        if (v.severity == Severity::Advisory) out << "advisory: ";
        out << v.field << ": " << v.message;
    }
    return out.str();
}

} // namespace whamcan
