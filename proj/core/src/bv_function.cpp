#include "hybridbvp/bv_function.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hybridbvp/errors.hpp"

namespace hybridbvp {

namespace {

constexpr double kMergeTol = 1e-15;

}  // namespace

BVFunction::BVFunction(std::vector<double> breakpoints, std::vector<double> left_values,
                       std::vector<double> right_values, std::optional<Density> density)
    : density_(std::move(density)) {
  if (left_values.size() != breakpoints.size() || right_values.size() != breakpoints.size()) {
    throw InvalidArgument("BVFunction: breakpoints, left_values and right_values differ in length");
  }
  for (double b : breakpoints) {
    if (!(b >= 0.0 && b <= 1.0)) {
      throw InvalidArgument("BVFunction: breakpoint " + std::to_string(b) + " outside [0, 1]");
    }
  }
  std::vector<std::size_t> order(breakpoints.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return breakpoints[a] < breakpoints[b]; });

  for (std::size_t idx : order) {
    const double b = breakpoints[idx];
    if (!breakpoints_.empty() && b - breakpoints_.back() <= kMergeTol) {
      right_.back() = right_values[idx];
      continue;
    }
    breakpoints_.push_back(b);
    left_.push_back(left_values[idx]);
    right_.push_back(right_values[idx]);
  }
  if (breakpoints_.empty()) {
    breakpoints_ = {0.0, 1.0};
    left_ = {0.0, 0.0};
    right_ = {0.0, 0.0};
  }
  if (breakpoints_.front() > 0.0) {
    const double v = left_.front();
    breakpoints_.insert(breakpoints_.begin(), 0.0);
    left_.insert(left_.begin(), v);
    right_.insert(right_.begin(), v);
  }
  if (breakpoints_.back() < 1.0) {
    const double v = right_.back();
    breakpoints_.push_back(1.0);
    left_.push_back(v);
    right_.push_back(v);
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (std::abs(right_[i] - left_[i]) < kMergeTol) right_[i] = left_[i];
  }
}

BVFunction BVFunction::linear(double slope) { return BVFunction({0.0, 1.0}, {0.0, slope}, {0.0, slope}); }

BVFunction BVFunction::step(double at, double height) {
  return BVFunction({at}, {0.0}, {height});
}

BVFunction BVFunction::from_density(std::function<double(double)> density, std::string source) {
  return BVFunction({}, {}, {}, Density{std::move(density), std::move(source)});
}

double BVFunction::segment_slope(std::size_t i) const noexcept {
  const double len = breakpoints_[i + 1] - breakpoints_[i];
  return (left_[i + 1] - right_[i]) / len;
}

double total_variation(const BVFunction& a) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.breakpoints().size(); ++i) tv += std::abs(a.jump(i));
  if (!a.density()) {
    for (std::size_t i = 0; i < a.n_segments(); ++i) {
      tv += std::abs(a.left_values()[i + 1] - a.right_values()[i]);
    }
    return tv;
  }
  const auto& fn = a.density()->fn;
  const auto& bps = a.breakpoints();
  for (std::size_t i = 0; i < a.n_segments(); ++i) {
    const double len = bps[i + 1] - bps[i];
    if (len <= 0.0) continue;
    const double slope = a.segment_slope(i);
    const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len * kDensityPieces)));
    tv += integrate([&](double t) { return std::abs(slope + fn(t)); }, bps[i], bps[i + 1], pieces);
  }
  return tv;
}

double stieltjes_integral(const std::function<double(double)>& f, const BVFunction& a,
                          const Grid& partition, QuadratureRule rule) {
  const auto& bps = a.breakpoints();
  std::vector<double> cuts = partition.nodes();
  cuts.insert(cuts.end(), bps.begin(), bps.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return y - x <= kMergeTol; }),
             cuts.end());

  const auto& q = cell_quadrature(rule);
  const auto* density = a.density() ? &a.density()->fn : nullptr;

  double sum = 0.0;
  std::size_t seg = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const double mid = 0.5 * (lo + hi);
    while (seg + 1 < a.n_segments() && bps[seg + 1] <= mid) ++seg;
    const double slope = a.segment_slope(seg);
    double piece = 0.0;
    for (std::size_t g = 0; g < q.weights.size(); ++g) {
      const double t = lo + q.abscissae[g] * (hi - lo);
      const double da = density ? slope + (*density)(t) : slope;
      piece += q.weights[g] * f(t) * da;
    }
    sum += piece * (hi - lo);
  }
  for (std::size_t i = 0; i < bps.size(); ++i) {
    if (a.jump(i) != 0.0) sum += f(bps[i]) * a.jump(i);
  }
  return sum;
}

double stieltjes_integral(const GridFunction& f, const BVFunction& a, QuadratureRule rule) {
  return stieltjes_integral([&](double t) { return f(t); }, a, f.grid(), rule);
}

}  // namespace hybridbvp
