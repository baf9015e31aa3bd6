#pragma once

#include <atomic>
#include <cstdint>

namespace twistl {

// Machine-independent work counters; monotone during a run.
struct EvalCounter {
    std::atomic<std::uint64_t> lift_evals{0};
    std::atomic<std::uint64_t> lift_derivative_evals{0};
    std::atomic<std::uint64_t> char_evals{0};

    EvalCounter() = default;
    EvalCounter(const EvalCounter& o)
        : lift_evals(o.lift_evals.load()),
          lift_derivative_evals(o.lift_derivative_evals.load()),
          char_evals(o.char_evals.load()) {}
    EvalCounter& operator=(const EvalCounter& o) {
        lift_evals = o.lift_evals.load();
        lift_derivative_evals = o.lift_derivative_evals.load();
        char_evals = o.char_evals.load();
        return *this;
    }
};

}  // namespace twistl
