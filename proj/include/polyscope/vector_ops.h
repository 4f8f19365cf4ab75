#pragma once

// Vector arithmetic shared by the neighbor search and the uniformity
// statistic. All accumulation happens in double regardless of the storage
// type, so float models and double test inputs go through the same code.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace polyscope {

/// A uniformity ratio, guaranteed to lie in (0, 1].
class UniformityValue {
 public:
  explicit UniformityValue(double value) : value_(value) {
    if (!(value > 0.0 && value <= 1.0)) {
      throw std::domain_error("uniformity must lie in (0, 1]");
    }
  }
  double value() const noexcept { return value_; }
  friend auto operator<=>(const UniformityValue&, const UniformityValue&) = default;

 private:
  double value_;
};

template <std::floating_point T>
double dot(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) throw std::invalid_argument("dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += double(u[i]) * double(v[i]);
  return acc;
}

template <std::floating_point T>
double norm(std::span<const T> u) {
  return std::sqrt(dot(u, u));
}

/// Cosine from a precomputed dot product and norms, clamped to [-1, 1].
inline double cosine_from(double dot_uv, double norm_u, double norm_v) {
  return std::clamp(dot_uv / (norm_u * norm_v), -1.0, 1.0);
}

template <std::floating_point T>
double cosine(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) throw std::invalid_argument("dimension mismatch");
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("cosine of a zero vector");
  return cosine_from(dot(u, v), nu, nv);
}

/// |sum of vs| / sum of |v|, summed in the order given.
///
/// Returns std::nullopt (degenerate) when the resultant is exactly zero.
/// Throws on an empty set, a zero vector, or mismatched dimensions.
template <std::floating_point T>
std::optional<UniformityValue> uniformity(std::span<const std::span<const T>> vs) {
  if (vs.empty()) throw std::invalid_argument("uniformity of an empty set");
  const std::size_t dim = vs.front().size();
  std::vector<double> resultant(dim, 0.0);
  double length_sum = 0.0;
  for (const auto& v : vs) {
    if (v.size() != dim) throw std::invalid_argument("dimension mismatch");
    const double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("uniformity of a zero vector");
    length_sum += n;
    for (std::size_t i = 0; i < dim; ++i) resultant[i] += double(v[i]);
  }
  const double r = norm(std::span<const double>(resultant));
  if (r == 0.0) return std::nullopt;
  // Rounding can push a perfectly aligned set a hair above 1.
  return UniformityValue(std::min(r / length_sum, 1.0));
}

template <std::floating_point T>
std::optional<UniformityValue> uniformity(const std::vector<std::vector<T>>& vs) {
  std::vector<std::span<const T>> views(vs.begin(), vs.end());
  return uniformity(std::span<const std::span<const T>>(views));
}

}  // namespace polyscope
