#pragma once

#include <stdexcept>
#include <string>

namespace qpar {

// input file or flag could not be parsed
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// a declared invariant does not hold for the given data
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// a size guard would be exceeded; carries the guard name and limit
struct GuardError : std::runtime_error {
    GuardError(const std::string& guard, long long limit, long long got)
        : std::runtime_error("guard '" + guard + "' exceeded: limit " + std::to_string(limit) +
                             ", got " + std::to_string(got)),
          guard_name(guard), limit(limit), got(got) {}
    std::string guard_name;
    long long limit;
    long long got;
};

// default tolerances; structural checks (norms, row sums) are tighter than
// logical ones (floating-point identities between independently computed values)
struct Tolerances {
    double logical = 1e-9;
    double structural = 1e-12;
};

namespace guards {
inline bool& enabled_flag() {
    static bool flag = true;
    return flag;
}
inline void set_enabled(bool on) { enabled_flag() = on; }
inline bool enabled() { return enabled_flag(); }
}  // namespace guards

// size guards are enforced unless explicitly lifted (--guard-override)
inline void check_guard(const char* name, long long limit, long long got) {
    if (got > limit && guards::enabled()) throw GuardError(name, limit, got);
}

}  // namespace qpar
