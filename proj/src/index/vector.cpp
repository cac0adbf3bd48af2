#include "rsagent/index/vector.hpp"

#include "rsagent/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rsagent::index {

Vector Vector::normalized(std::vector<float> values)
{
    if (values.empty()) throw InputError("cannot normalize an empty vector");
    double sq = 0.0;
    for (float v : values) {
        if (!std::isfinite(v)) throw InputError("vector has a non-finite component");
        sq += static_cast<double>(v) * static_cast<double>(v);
    }
    if (sq == 0.0) throw InputError("cannot normalize the zero vector");
    const double n = std::sqrt(sq);
    for (float& v : values) v = static_cast<float>(static_cast<double>(v) / n);
    Vector out;
    out.values_ = std::move(values);
    out.normalized_ = true;
    return out;
}

Vector Vector::raw(std::vector<float> values)
{
    Vector out;
    out.values_ = std::move(values);
    return out;
}

bool Vector::is_zero() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](float v) { return v == 0.0f; });
}

double Vector::norm() const noexcept
{
    double sq = 0.0;
    for (float v : values_) sq += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(sq);
}

double cosine_similarity(std::span<const float> a, std::span<const float> b)
{
    if (a.size() != b.size())
        throw InputError("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i], y = b[i];
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if (na == 0.0 || nb == 0.0) throw InputError("cosine similarity of a zero vector");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double cosine_similarity(const Vector& a, const Vector& b)
{
    return cosine_similarity(a.values(), b.values());
}

} // namespace rsagent::index
