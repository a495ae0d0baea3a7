#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hybridbvp/grid.hpp"

namespace hybridbvp {

/// Bounded-variation integrator on [0, 1]: piecewise-linear between
/// breakpoints, with a jump (right - left) at each breakpoint, plus an
/// optional absolutely continuous part given by its density.
///
/// Canonical form: breakpoints sorted, coincident breakpoints merged (left
/// value of the first, right value of the last), jumps below 1e-15 dropped,
/// and 0 and 1 always present. Outside the given breakpoints the function is
/// extended by constants.
class BVFunction {
 public:
  struct Density {
    std::function<double(double)> fn;
    std::string source;  // kept for serialization; may be empty
  };

  BVFunction(std::vector<double> breakpoints, std::vector<double> left_values,
             std::vector<double> right_values, std::optional<Density> density = std::nullopt);

  /// A(t) = slope * t.
  static BVFunction linear(double slope);
  /// Jump of `height` at `at`, zero elsewhere.
  static BVFunction step(double at, double height = 1.0);
  /// Purely absolutely continuous A with A' = density, A(0) = 0.
  static BVFunction from_density(std::function<double(double)> density, std::string source = {});

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& left_values() const noexcept { return left_; }
  const std::vector<double>& right_values() const noexcept { return right_; }
  const std::optional<Density>& density() const noexcept { return density_; }

  double jump(std::size_t i) const noexcept { return right_[i] - left_[i]; }
  /// Slope of the linear segment [breakpoints[i], breakpoints[i + 1]].
  double segment_slope(std::size_t i) const noexcept;
  std::size_t n_segments() const noexcept { return breakpoints_.size() - 1; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::optional<Density> density_;
};

/// Sub-intervals used for the density and segment quadrature of the
/// absolutely continuous part.
inline constexpr std::size_t kDensityPieces = 1024;

/// Sum |jumps| + int |A'| over the segments, A' = segment slope + density.
double total_variation(const BVFunction& a);

/// Riemann-Stieltjes integral of a continuous f against A. The segment part is
/// integrated with the per-cell rule over the union of `partition`'s nodes and
/// A's breakpoints; jumps contribute f(breakpoint) * jump.
double stieltjes_integral(const std::function<double(double)>& f, const BVFunction& a,
                          const Grid& partition, QuadratureRule rule = QuadratureRule::gauss2);

/// Node-sampled f, interpolated linearly on its own grid.
double stieltjes_integral(const GridFunction& f, const BVFunction& a,
                          QuadratureRule rule = QuadratureRule::gauss2);

}  // namespace hybridbvp
