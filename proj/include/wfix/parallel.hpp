#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "wfix/core.hpp"

namespace wfix {

/// Selects between the OpenMP kernels and their serial reference loops.
enum class Exec { serial, parallel };

/// Running (max, argmax) pair. NaN counts as +inf so a broken evaluation
/// can never hide behind a comparison that returns false. Ties resolve to
/// the smallest index, which makes the parallel merge deterministic.
struct MaxTracker {
    real value = 0;
    std::size_t index = std::numeric_limits<std::size_t>::max();

    void offer(real v, std::size_t i) noexcept {
        if (std::isnan(v)) v = std::numeric_limits<real>::infinity();
        if (index == npos() || v > value || (v == value && i < index)) {
            value = v;
            index = i;
        }
    }

    void merge(const MaxTracker& other) noexcept {
        if (other.index != npos()) offer(other.value, other.index);
    }

    std::optional<std::size_t> where() const noexcept {
        if (index == npos()) return std::nullopt;
        return index;
    }

    static constexpr std::size_t npos() noexcept {
        return std::numeric_limits<std::size_t>::max();
    }
};

/// max_i f(i) over [0, n). The serial branch is the reference the OpenMP
/// branch is tested against.
template <class F>
MaxTracker max_reduce(Exec exec, std::size_t n, F&& f) {
    MaxTracker result;
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) result.offer(f(i), i);
        return result;
    }
#pragma omp parallel
    {
        MaxTracker local;
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            local.offer(f(static_cast<std::size_t>(i)), static_cast<std::size_t>(i));
        }
#pragma omp critical(wfix_max_reduce)
        result.merge(local);
    }
    return result;
}

}  // namespace wfix
