#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rdeq/mixture.hpp"

namespace rdeq {

/// N x K matrix of parameter draws. Row n is the n-th sampled parameter
/// vector. For latin hypercube draws the pre-transform uniforms are kept
/// alongside the values so the stratification can be audited afterwards.
class SampleMatrix {
 public:
  static SampleMatrix from_values(std::vector<double> values, std::size_t cols,
                                  std::uint64_t seed = 0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t seed() const { return seed_; }

  double value(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const { return values_; }

  bool has_uniforms() const { return !uniforms_.empty(); }
  double uniform(std::size_t row, std::size_t col) const { return uniforms_[row * cols_ + col]; }

  SampleMatrix permuted(std::span<const std::size_t> order) const;

 private:
  friend SampleMatrix lhs_sample(const ParameterLaw&, std::size_t, std::uint64_t);
  friend SampleMatrix plain_sample(const ParameterLaw&, std::size_t, std::uint64_t);

  SampleMatrix() = default;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> values_;    // row-major
  std::vector<double> uniforms_;  // row-major, empty unless latin hypercube
};

/// Latin hypercube sample: per column, one uniform per stratum [i/n,(i+1)/n),
/// stratum order permuted independently per column, mapped through the
/// marginal quantile. Entries at or below a marginal's support floor are
/// redrawn within their stratum. Deterministic given the seed; each column
/// draws from its own PRNG stream so adding a column never perturbs the
/// earlier ones.
SampleMatrix lhs_sample(const ParameterLaw& law, std::size_t n, std::uint64_t seed);

/// Plain independent sampling (component choice + Box-Muller), used by the
/// verification paths so they stay methodologically independent of the
/// stratified sampler and the quantile bisection.
SampleMatrix plain_sample(const ParameterLaw& law, std::size_t n, std::uint64_t seed);

/// True iff the matrix carries pre-transform uniforms and, per column, they
/// occupy each of the n equal strata exactly once.
bool lhs_stratification_ok(const SampleMatrix& samples);

}  // namespace rdeq
