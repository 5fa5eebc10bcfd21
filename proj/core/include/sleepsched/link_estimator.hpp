#pragma once

namespace sleepsched {

/// Running success-rate and round-trip estimates from the device's own
/// transmission attempts. Starts with pseudo-counts so the estimates are
/// defined before the first attempt.
class LinkEstimator {
 public:
  /// `prior_antenna_time` seeds the mean antenna time of acknowledged
  /// attempts (transmit time plus round trip), typically T_tx.
  explicit LinkEstimator(double prior_antenna_time = 0.064, double prior_successes = 1.0,
                         double prior_attempts = 2.0);

  /// One attempt; `antenna_time` is only used when acked.
  void record(bool acked, double antenna_time);

  double attempts() const { return attempts_; }
  double successes() const { return successes_; }
  double rtt_sum() const { return rtt_sum_; }
  double rtt_count() const { return rtt_count_; }

  /// successes / attempts, clamped to [0.01, 0.99].
  double success_rate() const;
  double mean_antenna_time() const { return rtt_sum_ / rtt_count_; }

 private:
  double attempts_;
  double successes_;
  double rtt_sum_;
  double rtt_count_ = 1.0;
};

}  // namespace sleepsched
