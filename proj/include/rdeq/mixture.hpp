#pragma once

#include <optional>
#include <vector>

namespace rdeq {

struct GaussianComponent {
  double weight;
  double mean;
  double stddev;
};

/// One scalar parameter's law: a convex combination of Gaussians, with an
/// optional lower truncation bound enforced at sampling time (the pdf/cdf
/// describe the untruncated mixture).
class MixtureDensity1D {
 public:
  explicit MixtureDensity1D(std::vector<GaussianComponent> components,
                            std::optional<double> support_floor = std::nullopt);

  const std::vector<GaussianComponent>& components() const { return components_; }
  std::optional<double> support_floor() const { return support_floor_; }

  double pdf(double t) const;
  double cdf(double t) const;

  /// Quantile by bisection; |cdf(result) - p| <= 1e-10. Throws
  /// std::domain_error unless 0 < p < 1.
  double inverse_cdf(double p) const;

  /// Bracket [min mean - 10 std, max mean + 10 std] used to seed the
  /// quantile search; widened automatically when a target lies outside.
  double lower_bracket() const { return lower_bracket_; }
  double upper_bracket() const { return upper_bracket_; }

 private:
  std::vector<GaussianComponent> components_;
  std::optional<double> support_floor_;
  double lower_bracket_ = 0.0;
  double upper_bracket_ = 0.0;
};

/// Joint law of the parameter vector: independent marginals, one per entry.
class ParameterLaw {
 public:
  explicit ParameterLaw(std::vector<MixtureDensity1D> marginals);

  std::size_t dim() const { return marginals_.size(); }
  const MixtureDensity1D& marginal(std::size_t k) const { return marginals_.at(k); }
  const std::vector<MixtureDensity1D>& marginals() const { return marginals_; }

 private:
  std::vector<MixtureDensity1D> marginals_;
};

}  // namespace rdeq
