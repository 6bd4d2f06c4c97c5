#pragma once

#include "reachconf/types.hpp"

#include <chrono>
#include <optional>

namespace reachconf {

// Optional wall-clock limit threaded through long-running computations.
class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    Deadline() = default;

    static Deadline after(double seconds)
    {
        Deadline d;
        d.limit_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(seconds));
        return d;
    }

    bool expired() const { return limit_ && Clock::now() > *limit_; }

    void check(const char* where) const
    {
        if (expired())
            throw TimeoutError(std::string("deadline exceeded in ") + where);
    }

private:
    std::optional<Clock::time_point> limit_;
};

} // namespace reachconf
