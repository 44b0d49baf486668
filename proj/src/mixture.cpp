#include "rdeq/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rdeq/errors.hpp"

namespace rdeq {

namespace {

constexpr double kWeightSumTol = 1e-12;

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

MixtureDensity1D::MixtureDensity1D(std::vector<GaussianComponent> components,
                                   std::optional<double> support_floor)
    : components_(std::move(components)), support_floor_(support_floor) {
  if (components_.empty()) {
    throw std::invalid_argument("mixture needs at least one component");
  }
  double weight_sum = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) {
      throw std::invalid_argument("mixture weights must be positive");
    }
    if (!(c.stddev > 0.0)) {
      throw std::invalid_argument("mixture stddevs must be positive");
    }
    weight_sum += c.weight;
  }
  if (std::abs(weight_sum - 1.0) > kWeightSumTol) {
    throw std::invalid_argument("mixture weights must sum to 1, got " +
                                std::to_string(weight_sum));
  }
  double max_std = 0.0;
  double min_mean = components_.front().mean;
  double max_mean = components_.front().mean;
  for (const auto& c : components_) {
    max_std = std::max(max_std, c.stddev);
    min_mean = std::min(min_mean, c.mean);
    max_mean = std::max(max_mean, c.mean);
  }
  lower_bracket_ = min_mean - 10.0 * max_std;
  upper_bracket_ = max_mean + 10.0 * max_std;
}

double MixtureDensity1D::pdf(double t) const {
  double acc = 0.0;
  for (const auto& c : components_) {
    acc += c.weight * normal_pdf((t - c.mean) / c.stddev) / c.stddev;
  }
  return acc;
}

double MixtureDensity1D::cdf(double t) const {
  double acc = 0.0;
  for (const auto& c : components_) {
    acc += c.weight * normal_cdf((t - c.mean) / c.stddev);
  }
  return acc;
}

double MixtureDensity1D::inverse_cdf(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("inverse_cdf requires 0 < p < 1");
  }
  double lo = lower_bracket_;
  double hi = upper_bracket_;
  // The 10-sigma bracket covers p down to ~7.6e-24 per tail; widen for
  // anything more extreme.
  for (int i = 0; i < 64 && cdf(lo) >= p; ++i) lo -= (hi - lo);
  for (int i = 0; i < 64 && cdf(hi) <= p; ++i) hi += (hi - lo);

  constexpr double kTol = 1e-12;
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    mid = 0.5 * (lo + hi);
    const double f = cdf(mid);
    if (std::abs(f - p) <= kTol || mid == lo || mid == hi) break;
    if (f < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

ParameterLaw::ParameterLaw(std::vector<MixtureDensity1D> marginals)
    : marginals_(std::move(marginals)) {
  if (marginals_.empty()) {
    throw std::invalid_argument("parameter law needs at least one marginal");
  }
}

}  // namespace rdeq
