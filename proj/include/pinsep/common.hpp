#ifndef PINSEP_COMMON_HPP
#define PINSEP_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pinsep {

// Error taxonomy mirrors the CLI exit codes: parse -> 2, precondition/resource -> 3.
enum class ErrorKind { Parse, Precondition, Resource };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return kind_ == ErrorKind::Parse ? 2 : 3; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_parse(const std::string& msg) { throw Error(ErrorKind::Parse, msg); }
[[noreturn]] inline void fail_pre(const std::string& msg) { throw Error(ErrorKind::Precondition, msg); }
[[noreturn]] inline void fail_resource(const std::string& msg) { throw Error(ErrorKind::Resource, msg); }

bool is_prime(uint32_t n);

} // namespace pinsep

#endif
