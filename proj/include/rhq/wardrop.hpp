#ifndef RHQ_WARDROP_HPP
#define RHQ_WARDROP_HPP

#include <string>
#include <utility>

#include "rhq/market.hpp"
#include "rhq/sensitivity.hpp"

namespace rhq {

/// Quality-of-service metric that governs the passenger split.
enum class QosMetric { Unavailability, Blocking, Delay };

std::string to_string(QosMetric metric);
QosMetric qos_metric_from_string(const std::string& name);

/// Passenger split across the two platforms: lambda1 + lambda2 equals the
/// aggregate passenger rate exactly. `gap` is the achieved |Q1 - Q2|;
/// `boundary` marks the one-signed cases where all traffic goes to one side.
struct WardropSplit {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gap = 0.0;
  bool boundary = false;
};

/// QoS value of one platform under the chosen metric.
double qos_value(const MarketParams& params, const PriceModel& model, QosMetric metric,
                 double lambda, double phi);

/// Equalizing split for abandon_rate > 0, by bisection on the QoS gap.
/// Strict monotonicity of the metric in lambda is spot-checked; a violation
/// beyond tolerance signals a metric bug and throws MonotonicityError.
WardropSplit solve_we(const MarketParams& params, const PriceModel& model, QosMetric metric,
                      double phi1, double phi2, double tol = 1e-10);

/// Closed-form split in the patient-driver limit (abandon_rate treated as 0
/// regardless of params). The Delay metric minimizes the squared gap of its
/// limit form by golden section.
WardropSplit we_limit(const MarketParams& params, const PriceModel& model, QosMetric metric,
                    double phi1, double phi2);

/// Pick-up-metric threshold on alpha below which the dearer platform keeps
/// zero share even past the price-out point. Requires phi1 > phi2 and
/// f(phi2) != driver_passenger_ratio.
double alpha_bar(const MarketParams& params, const PriceModel& model, double phi1,
                 double phi2);

/// Both platforms' revenue rates at the solved (abandon_rate > 0) or
/// closed-form (abandon_rate == 0) split.
std::pair<double, double> payoffs_at_we(const MarketParams& params, const PriceModel& model,
                                        QosMetric metric, double phi1, double phi2);

/// Revenue rate of the platform pricing at `phi_own` against `phi_opp` in the
/// patient-driver limit; the piecewise payoff behind the duopoly analysis.
double limit_payoff(const MarketParams& params, const PriceModel& model, QosMetric metric,
                  double phi_own, double phi_opp);

}  // namespace rhq

#endif
