#ifndef NILSPACE_BUDGET_HPP
#define NILSPACE_BUDGET_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace nilspace {

/// Raised when an exhaustive search would exceed its budget. Carries the
/// amount of work that was refused, so partial runs are never silently
/// mistaken for full ones.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, int64_t required, int64_t allowed)
        : std::runtime_error(what + " (required " + std::to_string(required) +
                             ", budget " + std::to_string(allowed) + ")"),
          required_(required), allowed_(allowed) {}

    int64_t required() const { return required_; }
    int64_t allowed() const { return allowed_; }

private:
    int64_t required_, allowed_;
};

namespace detail {

constexpr int64_t kSaturated = std::numeric_limits<int64_t>::max();

inline int64_t sat_mul(int64_t a, int64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kSaturated / b) return kSaturated;
    return a * b;
}

inline int64_t sat_pow(int64_t base, int64_t exp) {
    int64_t r = 1;
    for (int64_t i = 0; i < exp; ++i) r = sat_mul(r, base);
    return r;
}

} // namespace detail

} // namespace nilspace

#endif
