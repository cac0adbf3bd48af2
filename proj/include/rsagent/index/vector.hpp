#pragma once

#include <span>
#include <vector>

namespace rsagent::index {

/// Dense embedding. Built through the factories so the `normalized` flag
/// always tells the truth.
class Vector {
public:
    Vector() = default;

    /// L2-normalizes `values`. Throws InputError for empty, zero or non-finite input.
    static Vector normalized(std::vector<float> values);
    /// Keeps `values` as given; normalized() is false.
    static Vector raw(std::vector<float> values);

    std::size_t dimension() const noexcept { return values_.size(); }
    std::span<const float> values() const noexcept { return values_; }
    bool is_normalized() const noexcept { return normalized_; }
    bool is_zero() const noexcept;
    double norm() const noexcept;

    bool operator==(const Vector&) const = default;

private:
    std::vector<float> values_;
    bool normalized_ = false;
};

/// dot(a, b) / (|a| * |b|), accumulated left to right in double and clamped
/// to [-1, 1]. Throws InputError on a dimension mismatch or a zero vector.
double cosine_similarity(const Vector& a, const Vector& b);
double cosine_similarity(std::span<const float> a, std::span<const float> b);

} // namespace rsagent::index
