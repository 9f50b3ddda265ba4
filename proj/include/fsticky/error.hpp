#ifndef FSTICKY_ERROR_HPP
#define FSTICKY_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fsticky {

// Argument outside the supported mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed input (non-monotone knots, bad grid, bad config).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

inline void require(bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
}

} // namespace fsticky

#endif
