#ifndef RHQ_SIMULATE_HPP
#define RHQ_SIMULATE_HPP

#include <cstdint>
#include <vector>

#include "rhq/market.hpp"
#include "rhq/sensitivity.hpp"
#include "rhq/wardrop.hpp"

namespace rhq {

/// Point estimate with a 95% batch-means half-width (32 batches after a 10%
/// warm-up discard).
struct Estimate {
  double value = 0.0;
  double half_width = 0.0;
};

struct SimEstimates {
  Estimate u;        // empty-queue fraction seen by passenger arrivals (PASTA);
                     // falls back to the time average when there are no arrivals
  Estimate u_time;   // time-average empty-queue probability
  Estimate b;        // blocked fraction of passenger arrivals (no driver or price refused)
  Estimate revenue;  // accumulated price of accepted matches per unit time
  std::vector<double> n_marginal;  // time-weighted distribution of waiting drivers
  // Waiting-driver counts observed by every 25th passenger arrival, kept
  // nearly independent for goodness-of-fit testing.
  std::vector<std::uint64_t> n_sampled_counts;
  std::uint64_t events = 0;
  double horizon = 0.0;
  // Raised when the waiting queue drifts upward between the two halves of the
  // run; expected when abandon_rate == 0 and drivers outpace matches.
  bool transient_warning = false;
};

/// Event-driven simulation of one platform over `horizon` time units.
/// Deterministic given (params, lambda, phi, horizon, seed).
SimEstimates simulate_platform(const MarketParams& params, const PriceModel& model,
                               double lambda, double phi, double horizon,
                               std::uint64_t seed);

struct CouplingReport {
  std::uint64_t events = 0;
  std::uint64_t violations = 0;  // epochs where the dominance order broke
  double horizon = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
};

/// Runs two platforms on shared randomness: the high-rate system sees every
/// accepting passenger, the low-rate one an independent thinning; driver
/// arrivals, patience clocks, ride clocks and rejoin flags are shared
/// whenever both systems carry the matching driver. Reports violations of
/// n_hi <= n_lo and (n+r)_hi <= (n+r)_lo checked at every event epoch.
CouplingReport simulate_coupled(const MarketParams& params, const PriceModel& model,
                                double lambda_lo, double lambda_hi, double phi,
                                double horizon, std::uint64_t seed);

struct DuopolySimResult {
  SimEstimates platform1;
  SimEstimates platform2;
  WardropSplit split;   // the analytic split the arrivals were divided by
  double sim_qos_gap = 0.0;  // |Q1 - Q2| recomputed from the simulated estimates
  QosMetric metric = QosMetric::Blocking;
};

/// Splits demand by the Wardrop solver, then simulates the two platforms
/// independently on derived sub-streams of `seed`.
DuopolySimResult simulate_duopoly(const MarketParams& params, const PriceModel& model,
                                  double phi1, double phi2, QosMetric metric, double horizon,
                                  std::uint64_t seed);

/// Sub-stream derivation used throughout: a splitmix64 hash of (seed, id)
/// seeding an independent mt19937_64.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream_id);

}  // namespace rhq

#endif
