#ifndef RHQ_QUEUEING_HPP
#define RHQ_QUEUEING_HPP

#include <cstddef>

#include "rhq/market.hpp"
#include "rhq/numeric.hpp"
#include "rhq/sensitivity.hpp"

namespace rhq {

/// Sum of the normalizing series of the waiting-driver birth-death factor.
/// `value` may overflow to +inf for extreme parameters; `log_value` stays
/// finite and is what downstream probabilities are computed from.
struct SeriesResult {
  bool divergent = false;   // only possible when abandon_rate == 0
  double value = 0.0;       // sum, or meaningless when divergent
  double log_value = 0.0;   // log of the sum
  double tail_bound = 0.0;  // certified bound on the truncated remainder
  std::size_t terms_used = 0;
};

/// Normalizing series sum_n prod_{a<=n} e/(lambda f(phi) + a beta).
SeriesResult mu_series(const MarketParams& params, const PriceModel& model, double lambda,
                       double phi, double rel_tol = 1e-12);

/// Stationary probability that no driver is waiting.
double unavailability(const MarketParams& params, const PriceModel& model, double lambda,
                      double phi);

/// Long-run fraction of arriving passengers that get no ride, from driver
/// unavailability or price rejection combined.
double blocking(const MarketParams& params, const PriceModel& model, double lambda,
                double phi);

/// Scaled expected pick-up time: blocking plus the short-wait correction
/// alpha * f(phi) * E[1{1<=n<=cutoff}/n].
double pickup_delay_qos(const MarketParams& params, const PriceModel& model, double lambda,
                        double phi);

/// Long-run revenue per unit time from completed matches.
double revenue_rate(const MarketParams& params, const PriceModel& model, double lambda,
                    double phi);

/// Default truncation size for joint-distribution work.
std::size_t default_truncation(const MarketParams& params);

/// Product-form joint stationary distribution pi(n, r) on a truncation
/// [0, n_max] x [0, r_max]. Requires abandon_rate > 0 and throws
/// TruncationError when the certified omitted mass exceeds 1e-10.
Matrix joint_stationary(const MarketParams& params, const PriceModel& model, double lambda,
                        double phi, std::size_t n_max, std::size_t r_max);

/// Independent cross-check: stationary vector of the truncated generator of
/// the same chain (transitions out of the box redirected to stay), computed
/// by a dense linear solve. Requires abandon_rate > 0.
Matrix ctmc_oracle(const MarketParams& params, const PriceModel& model, double lambda,
                   double phi, std::size_t n_max, std::size_t r_max);

/// Max-norm residual of global balance, ||pi Q||_inf, for a distribution on
/// the truncated generator. Exposed so tests can assert stationarity.
double global_balance_residual(const MarketParams& params, const PriceModel& model,
                               double lambda, double phi, const Matrix& pi);

}  // namespace rhq

#endif
