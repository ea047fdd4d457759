#include "rhq/wardrop.hpp"

#include <cmath>

#include "rhq/errors.hpp"
#include "rhq/numeric.hpp"
#include "rhq/queueing.hpp"

namespace rhq {

namespace {

MarketParams with_zero_abandon(MarketParams params) {
  params.abandon_rate = 0.0;
  return params;
}

void require_delay_alpha(const MarketParams& params, QosMetric metric) {
  if (metric == QosMetric::Delay && !(params.pickup_alpha > 0.0))
    throw RegimeError("Delay metric requires pickup_alpha in (0, 1)");
}

WardropSplit finish_split(const MarketParams& params, const PriceModel& model,
                          QosMetric metric, double phi1, double phi2, double lambda1) {
  WardropSplit s;
  s.lambda1 = lambda1;
  s.lambda2 = params.passenger_rate - lambda1;
  s.gap = std::fabs(qos_value(params, model, metric, s.lambda1, phi1) -
                    qos_value(params, model, metric, s.lambda2, phi2));
  s.boundary = (s.lambda1 <= 0.0 || s.lambda2 <= 0.0);
  return s;
}

}  // namespace

std::string to_string(QosMetric metric) {
  switch (metric) {
    case QosMetric::Unavailability: return "unavailability";
    case QosMetric::Blocking: return "blocking";
    case QosMetric::Delay: return "delay";
  }
  return "?";
}

QosMetric qos_metric_from_string(const std::string& name) {
  if (name == "unavailability") return QosMetric::Unavailability;
  if (name == "blocking") return QosMetric::Blocking;
  if (name == "delay") return QosMetric::Delay;
  throw ConfigError("unknown QoS metric: " + name);
}

double qos_value(const MarketParams& params, const PriceModel& model, QosMetric metric,
                 double lambda, double phi) {
  switch (metric) {
    case QosMetric::Unavailability: return unavailability(params, model, lambda, phi);
    case QosMetric::Blocking: return blocking(params, model, lambda, phi);
    case QosMetric::Delay: return pickup_delay_qos(params, model, lambda, phi);
  }
  return 0.0;
}

WardropSplit solve_we(const MarketParams& params, const PriceModel& model, QosMetric metric,
                      double phi1, double phi2, double tol) {
  if (!(params.abandon_rate > 0.0))
    throw RegimeError("solve_we requires abandon_rate > 0; use we_limit for the limit");
  if (!(tol > 0.0)) throw std::domain_error("solve_we needs tol > 0");
  require_delay_alpha(params, metric);
  const double total = params.passenger_rate;

  // Symmetric prices balance exactly; mirrored prices reuse the same
  // bisection with the roles flipped, so permuting inputs swaps the split
  // bit for bit.
  if (phi1 == phi2) return finish_split(params, model, metric, phi1, phi2, total / 2.0);
  if (phi1 < phi2) {
    const WardropSplit mirrored = solve_we(params, model, metric, phi2, phi1, tol);
    return finish_split(params, model, metric, phi1, phi2, mirrored.lambda2);
  }

  auto gap = [&](double lambda1) {
    return qos_value(params, model, metric, lambda1, phi1) -
           qos_value(params, model, metric, total - lambda1, phi2);
  };

  // The metric must be strictly increasing in own load; sample a few points
  // so a broken metric fails loudly instead of silently mis-bisecting.
  {
    double prev = gap(0.0);
    for (int k = 1; k <= 4; ++k) {
      const double cur = gap(total * k / 4.0);
      if (cur < prev - 1e-9)
        throw MonotonicityError("solve_we: QoS gap decreased along the split axis");
      prev = cur;
    }
  }

  const double g0 = gap(0.0);
  const double g1 = gap(total);
  double lambda1;
  if (g0 >= 0.0)
    lambda1 = 0.0;
  else if (g1 <= 0.0)
    lambda1 = total;
  else
    lambda1 = bisect_root(gap, 0.0, total, tol);
  return finish_split(params, model, metric, phi1, phi2, lambda1);
}

WardropSplit we_limit(const MarketParams& params_in, const PriceModel& model, QosMetric metric,
                    double phi1, double phi2) {
  const MarketParams params = with_zero_abandon(params_in);
  require_delay_alpha(params, metric);
  const double total = params.passenger_rate;
  const double e = params.effective_driver_rate();
  const double rho = params.driver_passenger_ratio();

  if (metric == QosMetric::Unavailability) {
    const double f1 = model.f(phi1);
    const double f2 = model.f(phi2);
    return finish_split(params, model, metric, phi1, phi2, total * f2 / (f1 + f2));
  }

  if (phi1 == phi2)
    return finish_split(params, model, metric, phi1, phi2, total / 2.0);

  const bool first_is_dear = phi1 > phi2;
  const double dear = first_is_dear ? phi1 : phi2;
  const double cheap = first_is_dear ? phi2 : phi1;
  double lambda_dear = 0.0;

  if (metric == QosMetric::Blocking) {
    const double thr_half = model.f_inverse(2.0 * rho);
    const double thr_full = model.f_inverse(rho);
    if (dear < thr_half)
      lambda_dear = total / 2.0;
    else if (dear < thr_full)
      lambda_dear = total - e / model.f(dear);
    else
      lambda_dear = 0.0;
  } else {
    // Pick-up metric. When both platforms price out the whole market the
    // gap is a positive constant and every split is equalizing; take the
    // continuity selection (all demand to the cheap side). Otherwise the gap
    // is nondecreasing with a unique sign change, so the squared gap has a
    // unique minimizer; that argmin already encodes the alpha threshold at
    // which the dear platform starts receiving traffic.
    if (model.f(dear) <= rho && model.f(cheap) <= rho) {
      lambda_dear = 0.0;
    } else {
      auto sq_gap = [&](double lambda) {
        const double d = qos_value(params, model, metric, lambda, dear) -
                         qos_value(params, model, metric, total - lambda, cheap);
        return d * d;
      };
      lambda_dear = golden_section_min(sq_gap, 0.0, total, 1e-10);
      if (lambda_dear < 1e-9) lambda_dear = 0.0;
    }
  }

  const double lambda1 = first_is_dear ? lambda_dear : total - lambda_dear;
  return finish_split(params, model, metric, phi1, phi2, lambda1);
}

double alpha_bar(const MarketParams& params, const PriceModel& model, double phi1,
                 double phi2) {
  if (!(phi1 > phi2)) throw std::domain_error("alpha_bar requires phi1 > phi2");
  const double rho = params.driver_passenger_ratio();
  const double f1 = model.f(phi1);
  const double f2 = model.f(phi2);
  if (f2 == rho)
    throw NumericalError("alpha_bar: division by zero, f(phi2) equals the driver ratio");
  const double u = rho / f2;
  double series = 0.0;
  double un = 1.0;
  for (int n = 1; n <= params.pickup_cutoff; ++n) {
    un *= u;
    series += un / static_cast<double>(n);
  }
  return (rho - f1) / ((rho - f2) * series);
}

std::pair<double, double> payoffs_at_we(const MarketParams& params, const PriceModel& model,
                                        QosMetric metric, double phi1, double phi2) {
  const WardropSplit split = params.abandon_rate > 0.0
                                 ? solve_we(params, model, metric, phi1, phi2)
                                 : we_limit(params, model, metric, phi1, phi2);
  return {revenue_rate(params, model, split.lambda1, phi1),
          revenue_rate(params, model, split.lambda2, phi2)};
}

double limit_payoff(const MarketParams& params_in, const PriceModel& model, QosMetric metric,
                  double phi_own, double phi_opp) {
  const MarketParams params = with_zero_abandon(params_in);
  const WardropSplit split = we_limit(params, model, metric, phi_own, phi_opp);
  return revenue_rate(params, model, split.lambda1, phi_own);
}

}  // namespace rhq
