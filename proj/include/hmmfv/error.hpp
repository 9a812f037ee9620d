#pragma once

#include <stdexcept>
#include <string>

namespace hmmfv {

/// Precondition violations: bad indices, malformed configs, unknown names.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SolverError : public std::runtime_error {
public:
    enum class Kind { Singular, NotConverged, ResidualCheck };

    SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

#define HMMFV_REQUIRE(cond, msg)                                                                   \
    do {                                                                                           \
        if (!(cond)) throw ::hmmfv::InvalidArgument(msg);                                          \
    } while (0)

} // namespace hmmfv
