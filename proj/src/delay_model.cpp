#include "peakramp/delay_model.hpp"

#include "peakramp/model.hpp"

#include <algorithm>
#include <cmath>

namespace peakramp {

double DelayModel::median(int prosumer) const {
  return medians.empty() ? default_median : medians.at(static_cast<std::size_t>(prosumer));
}

void DelayModel::validate(int prosumers) const {
  if (!medians.empty() && static_cast<int>(medians.size()) != prosumers)
    throw InvalidInput("delay model: expected " + std::to_string(prosumers) + " medians");
  if (!(default_median > 0.0)) throw InvalidInput("delay model: median must be positive");
  for (double m : medians)
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("delay model: median must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("delay model: sigma must be >= 0");
  if (!(max_ratio >= 1.0) || !std::isfinite(max_ratio))
    throw InvalidInput("delay model: max_ratio must be >= 1");
}

DelaySampler::DelaySampler(const DelayModel& model) : model_(model), rng_(model.seed) {}

double DelaySampler::draw(int prosumer) {
  const double median = model_.median(prosumer);
  // Always consume one normal so the stream does not depend on sigma.
  const double z = normal_(rng_);
  if (model_.sigma == 0.0) return median;
  const double half_span = 0.5 * std::log(model_.max_ratio);
  const double log_delay = std::clamp(model_.sigma * z, -half_span, half_span);
  return median * std::exp(log_delay);
}

}  // namespace peakramp
