#include "rdeq/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "rdeq/errors.hpp"

namespace rdeq {

namespace {

constexpr int kRedrawBudget = 1000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

// Uniform in [0,1) with 53 random bits.
double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection, no modulo bias.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (-bound) % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r < threshold);
  return r % bound;
}

// Within-stratum uniforms are kept away from the stratum edges so that
// floor(p * n) recovers the stratum index exactly in floating point.
double clamp_unit(double u) { return std::clamp(u, 1e-9, 1.0 - 1e-9); }

}  // namespace

SampleMatrix SampleMatrix::from_values(std::vector<double> values, std::size_t cols,
                                       std::uint64_t seed) {
  if (cols == 0 || values.size() % cols != 0) {
    throw std::invalid_argument("sample values must form an N x K matrix");
  }
  SampleMatrix m;
  m.rows_ = values.size() / cols;
  m.cols_ = cols;
  m.seed_ = seed;
  m.values_ = std::move(values);
  return m;
}

SampleMatrix SampleMatrix::permuted(std::span<const std::size_t> order) const {
  if (order.size() != rows_) {
    throw std::invalid_argument("permutation length must equal the row count");
  }
  SampleMatrix m;
  m.rows_ = rows_;
  m.cols_ = cols_;
  m.seed_ = seed_;
  m.values_.resize(values_.size());
  if (!uniforms_.empty()) m.uniforms_.resize(uniforms_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    const std::size_t src = order[r];
    for (std::size_t k = 0; k < cols_; ++k) {
      m.values_[r * cols_ + k] = values_[src * cols_ + k];
      if (!uniforms_.empty()) m.uniforms_[r * cols_ + k] = uniforms_[src * cols_ + k];
    }
  }
  return m;
}

SampleMatrix lhs_sample(const ParameterLaw& law, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  const std::size_t cols = law.dim();

  SampleMatrix m;
  m.rows_ = n;
  m.cols_ = cols;
  m.seed_ = seed;
  m.values_.resize(n * cols);
  m.uniforms_.resize(n * cols);

  std::vector<std::size_t> strata(n);
  for (std::size_t k = 0; k < cols; ++k) {
    const MixtureDensity1D& marginal = law.marginal(k);
    std::mt19937_64 rng(stream_seed(seed, k));

    std::iota(strata.begin(), strata.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = bounded(rng, i + 1);
      std::swap(strata[i], strata[j]);
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double s = static_cast<double>(strata[r]);
      double p = 0.0;
      double value = 0.0;
      bool ok = false;
      for (int attempt = 0; attempt <= kRedrawBudget; ++attempt) {
        p = (s + clamp_unit(canonical(rng))) * inv_n;
        value = marginal.inverse_cdf(p);
        if (!marginal.support_floor() || value > *marginal.support_floor()) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        throw SamplingError("support floor redraw budget exhausted for marginal " +
                            std::to_string(k) + " in stratum " +
                            std::to_string(strata[r]));
      }
      m.values_[r * cols + k] = value;
      m.uniforms_[r * cols + k] = p;
    }
  }
  return m;
}

SampleMatrix plain_sample(const ParameterLaw& law, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  const std::size_t cols = law.dim();

  SampleMatrix m;
  m.rows_ = n;
  m.cols_ = cols;
  m.seed_ = seed;
  m.values_.resize(n * cols);

  std::mt19937_64 rng(stream_seed(seed, 0x706c61696eULL));  // "plain"
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      const MixtureDensity1D& marginal = law.marginal(k);
      double value = 0.0;
      bool ok = false;
      for (int attempt = 0; attempt <= kRedrawBudget; ++attempt) {
        const double pick = canonical(rng);
        double cum = 0.0;
        const GaussianComponent* chosen = &marginal.components().back();
        for (const auto& c : marginal.components()) {
          cum += c.weight;
          if (pick < cum) {
            chosen = &c;
            break;
          }
        }
        double u1 = canonical(rng);
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = canonical(rng);
        const double z =
            std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        value = chosen->mean + chosen->stddev * z;
        if (!marginal.support_floor() || value > *marginal.support_floor()) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        throw SamplingError("support floor redraw budget exhausted for marginal " +
                            std::to_string(k));
      }
      m.values_[r * cols + k] = value;
    }
  }
  return m;
}

bool lhs_stratification_ok(const SampleMatrix& samples) {
  if (!samples.has_uniforms()) return false;
  const std::size_t n = samples.rows();
  std::vector<bool> seen(n);
  for (std::size_t k = 0; k < samples.cols(); ++k) {
    std::fill(seen.begin(), seen.end(), false);
    for (std::size_t r = 0; r < n; ++r) {
      const double p = samples.uniform(r, k);
      if (!(p >= 0.0 && p < 1.0)) return false;
      const auto stratum = static_cast<std::size_t>(p * static_cast<double>(n));
      if (stratum >= n || seen[stratum]) return false;
      seen[stratum] = true;
    }
  }
  return true;
}

}  // namespace rdeq
