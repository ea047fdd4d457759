#ifndef RHQ_DYNAMICS_HPP
#define RHQ_DYNAMICS_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "rhq/market.hpp"
#include "rhq/sensitivity.hpp"
#include "rhq/wardrop.hpp"

namespace rhq {

struct BRResult {
  double price = 0.0;
  double payoff = 0.0;
  // Set when the payoff was zero over every probe (degenerate market); the
  // returned price is then 0 by convention.
  bool flat = false;
};

/// Grid argmax of own revenue against a fixed opponent price, with the split
/// recomputed per candidate. abandon_rate > 0 gives true best responses; at
/// the limit this is the grid supremum (a best response need not exist),
/// ties resolved toward the larger price. `extra_probes` join the candidate
/// set, so a caller can guarantee the current price is never beaten by the
/// response it replaces.
BRResult best_response(const MarketParams& params, const PriceModel& model, QosMetric metric,
                       double phi_opp, double beta, double alpha,
                       const std::vector<double>& extra_probes = {});

struct BRPoint {
  int iteration = 0;  // 1-based
  int player = 0;     // 1 on odd iterations, 2 on even
  double price = 0.0;
  double payoff = 0.0;
};

struct BRTrajectory {
  std::vector<BRPoint> points;
  QosMetric metric = QosMetric::Blocking;
  double beta = 0.0;
  double alpha = 0.0;
};

/// Alternating best-response dynamics from an initial price pair;
/// deterministic given its inputs.
BRTrajectory alternating_br(const MarketParams& params, const PriceModel& model,
                            QosMetric metric, std::pair<double, double> init, int iters,
                            double beta, double alpha);

struct Classification {
  bool converged = false;
  double point = 0.0;  // post-burn-in mean when converged
  double lo = 0.0;     // oscillation range otherwise
  double hi = 0.0;
  int period = 0;  // autocorrelation peak lag when oscillating
};

/// Converged when the post-burn-in price range is below tol, otherwise
/// oscillating with an autocorrelation-based period estimate.
Classification classify_trajectory(const BRTrajectory& traj, std::size_t burn_in, double tol);

}  // namespace rhq

#endif
