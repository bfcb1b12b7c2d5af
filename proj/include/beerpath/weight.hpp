#pragma once

#include <cassert>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <type_traits>

namespace beerpath {

/// Nonnegative path weight with an explicit +infinity sentinel.
///
/// The sentinel is a dedicated flag, never a large finite value, so that
/// addition saturates instead of overflowing. T is std::int64_t for the
/// exact integer domain or double for the real domain.
template <typename T>
class Weight {
    static_assert(std::is_same_v<T, std::int64_t> || std::is_same_v<T, double>);

public:
    constexpr Weight() = default;
    constexpr explicit Weight(T value) : value_(value), inf_(false) { assert(value >= T{0}); }

    static constexpr Weight zero() { return Weight(T{0}); }
    static constexpr Weight infinity() {
        Weight w;
        w.inf_ = true;
        return w;
    }

    constexpr bool is_inf() const { return inf_; }
    constexpr bool is_finite() const { return !inf_; }

    constexpr T value() const {
        assert(!inf_);
        return value_;
    }

    friend constexpr Weight operator+(Weight a, Weight b) {
        if (a.inf_ || b.inf_) return infinity();
        return Weight(a.value_ + b.value_);
    }
    Weight& operator+=(Weight o) { return *this = *this + o; }

    // Total order with infinity as the unique maximum.
    friend constexpr bool operator<(Weight a, Weight b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.value_ < b.value_;
    }
    friend constexpr bool operator>(Weight a, Weight b) { return b < a; }
    friend constexpr bool operator<=(Weight a, Weight b) { return !(b < a); }
    friend constexpr bool operator>=(Weight a, Weight b) { return !(a < b); }
    friend constexpr bool operator==(Weight a, Weight b) {
        if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
        return a.value_ == b.value_;
    }
    friend constexpr bool operator!=(Weight a, Weight b) { return !(a == b); }

    friend constexpr Weight min(Weight a, Weight b) { return a < b ? a : b; }

    /// b - a for beer-minus-plain differences. Infinite whenever either
    /// operand is infinite. Clamped at zero: beer values dominate distances
    /// up to rounding in the real domain.
    friend constexpr Weight extra_over(Weight bd, Weight d) {
        if (bd.is_inf() || d.is_inf()) return infinity();
        return Weight(bd.value_ >= d.value_ ? bd.value_ - d.value_ : T{});
    }

    friend std::ostream& operator<<(std::ostream& os, Weight w) {
        if (w.inf_) return os << "inf";
        return os << w.value_;
    }

private:
    T value_{};
    bool inf_ = false;
};

using IntWeight = Weight<std::int64_t>;
using RealWeight = Weight<double>;

template <typename T>
std::string to_string(Weight<T> w) {
    if (w.is_inf()) return "inf";
    if constexpr (std::is_same_v<T, double>) {
        std::string s = std::to_string(w.value());
        return s;
    } else {
        return std::to_string(w.value());
    }
}

/// Comparison used wherever real-mode results are checked: absolute floor
/// 1e-9, relative beyond unit scale. Integer weights compare exactly.
template <typename T>
bool weights_close(Weight<T> a, Weight<T> b, double tol = 1e-9) {
    if (a.is_inf() || b.is_inf()) return a.is_inf() == b.is_inf();
    if constexpr (std::is_same_v<T, double>) {
        double x = a.value(), y = b.value();
        double scale = std::max({1.0, x < 0 ? -x : x, y < 0 ? -y : y});
        double d = x - y;
        if (d < 0) d = -d;
        return d <= tol * scale;
    } else {
        return a.value() == b.value();
    }
}

}  // namespace beerpath
