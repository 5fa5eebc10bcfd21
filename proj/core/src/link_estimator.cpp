#include "sleepsched/link_estimator.hpp"

#include <algorithm>
#include <stdexcept>

namespace sleepsched {

LinkEstimator::LinkEstimator(double prior_antenna_time, double prior_successes,
                             double prior_attempts)
    : attempts_(prior_attempts), successes_(prior_successes), rtt_sum_(prior_antenna_time) {
  if (prior_antenna_time < 0.0) throw std::invalid_argument("prior antenna time must be >= 0");
  if (!(prior_attempts > 0.0) || prior_successes < 0.0 || prior_successes > prior_attempts)
    throw std::invalid_argument("link prior needs 0 <= successes <= attempts, attempts > 0");
}

void LinkEstimator::record(bool acked, double antenna_time) {
  attempts_ += 1.0;
  if (!acked) return;
  successes_ += 1.0;
  rtt_sum_ += antenna_time;
  rtt_count_ += 1.0;
}

double LinkEstimator::success_rate() const {
  return std::clamp(successes_ / attempts_, 0.01, 0.99);
}

}  // namespace sleepsched
