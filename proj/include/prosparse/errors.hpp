#pragma once

// Exception types shared by every prosparse module. The CLI maps them onto
// exit codes: usage_error -> 2, io_error / format_error -> 3. An
// integrity_error means an engine invariant broke and is always a bug.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prosparse {

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class format_error : public std::runtime_error {
public:
    format_error(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

struct integrity_error : std::logic_error {
    using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw usage_error(msg);
}

inline void check_integrity(bool cond, const std::string& msg) {
    if (!cond) throw integrity_error(msg);
}

}  // namespace detail
}  // namespace prosparse
