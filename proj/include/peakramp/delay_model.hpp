#pragma once

// Simulated prosumer compute times. Each computation draws an independent
// lognormal delay around the prosumer's median; draws are clipped to
// [median / sqrt(max_ratio), median * sqrt(max_ratio)] so that, for equal
// medians, no delay exceeds max_ratio times another.

#include <cstdint>
#include <random>
#include <vector>

namespace peakramp {

struct DelayModel {
  std::vector<double> medians;  // per prosumer; empty means 1.0 for everyone
  double default_median = 1.0;
  double sigma = 0.5;
  double max_ratio = 10.0;
  std::uint64_t seed = 1;

  double median(int prosumer) const;

  /// Throws InvalidInput on non-positive medians or ratio, negative sigma, or
  /// a medians list whose length is neither 0 nor `prosumers`.
  void validate(int prosumers) const;
};

class DelaySampler {
 public:
  explicit DelaySampler(const DelayModel& model);

  /// Next delay for `prosumer`; strictly positive. With sigma = 0 every draw
  /// equals the median.
  double draw(int prosumer);

 private:
  const DelayModel& model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace peakramp
