#include "rhq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rhq/equilibria.hpp"
#include "rhq/errors.hpp"
#include "rhq/numeric.hpp"
#include "rhq/queueing.hpp"

namespace rhq {

namespace {
constexpr std::size_t kBrGrid = 2000;
constexpr double kTieTol = 1e-12;
}  // namespace

BRResult best_response(const MarketParams& params, const PriceModel& model, QosMetric metric,
                       double phi_opp, double beta, double alpha,
                       const std::vector<double>& extra_probes) {
  MarketParams p = params;
  p.abandon_rate = beta;
  p.pickup_alpha = alpha;

  auto payoff = [&](double own) {
    if (p.abandon_rate > 0.0) {
      const WardropSplit s = solve_we(p, model, metric, own, phi_opp);
      return revenue_rate(p, model, s.lambda1, own);
    }
    return limit_payoff(p, model, metric, own, phi_opp);
  };

  // Candidate prices: uniform grid plus the kink locations of the limiting
  // payoff, so the argmax cannot fall between grid points at a spike.
  std::vector<double> probes = linspace(0.0, model.price_cap(), kBrGrid);
  probes.push_back(phi_opp);
  for (double x : extra_probes)
    if (x >= 0.0 && x <= model.price_cap()) probes.push_back(x);
  const double rho = params.driver_passenger_ratio();
  probes.push_back(model.f_inverse(2.0 * rho));
  probes.push_back(model.f_inverse(rho));
  probes.push_back(threshold_root(ThresholdKind::Monopoly, model));
  probes.push_back(threshold_root(ThresholdKind::BlockingDuopoly, model));
  try {
    const auto [lo, hi] = ec_endpoints(params, model);
    probes.push_back(lo);
    probes.push_back(hi);
  } catch (const RegimeError&) {
  }

  std::vector<double> values(probes.size());
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    values[i] = payoff(probes[i]);
    best_val = std::max(best_val, values[i]);
  }
  double best_arg = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (values[i] >= best_val - kTieTol) best_arg = std::max(best_arg, probes[i]);
  }

  const double step = model.price_cap() / static_cast<double>(kBrGrid - 1);
  const double refined =
      golden_section_max(payoff, std::max(0.0, best_arg - step),
                         std::min(model.price_cap(), best_arg + step), 1e-9);
  const double refined_val = payoff(refined);
  if (refined_val > best_val + kTieTol) {
    best_val = refined_val;
    best_arg = refined;
  }

  if (best_val <= 1e-15) return {0.0, 0.0, true};
  return {best_arg, best_val, false};
}

BRTrajectory alternating_br(const MarketParams& params, const PriceModel& model,
                            QosMetric metric, std::pair<double, double> init, int iters,
                            double beta, double alpha) {
  if (iters < 2) throw std::domain_error("alternating_br needs iters >= 2");
  BRTrajectory traj;
  traj.metric = metric;
  traj.beta = beta;
  traj.alpha = alpha;
  traj.points.reserve(static_cast<std::size_t>(iters));

  double price1 = init.first;
  double price2 = init.second;
  for (int it = 1; it <= iters; ++it) {
    const bool first_moves = (it % 2 == 1);
    const double opp = first_moves ? price2 : price1;
    const double own = first_moves ? price1 : price2;
    const BRResult br = best_response(params, model, metric, opp, beta, alpha, {own});
    (first_moves ? price1 : price2) = br.price;
    traj.points.push_back({it, first_moves ? 1 : 2, br.price, br.payoff});
  }
  return traj;
}

Classification classify_trajectory(const BRTrajectory& traj, std::size_t burn_in,
                                   double tol) {
  if (burn_in + 2 > traj.points.size())
    throw std::domain_error("classify_trajectory: trajectory shorter than burn-in");
  std::vector<double> prices;
  for (std::size_t i = burn_in; i < traj.points.size(); ++i)
    prices.push_back(traj.points[i].price);

  Classification out;
  const auto [lo_it, hi_it] = std::minmax_element(prices.begin(), prices.end());
  out.lo = *lo_it;
  out.hi = *hi_it;

  double mean = 0.0;
  for (double x : prices) mean += x;
  mean /= static_cast<double>(prices.size());

  if (out.hi - out.lo < tol) {
    out.converged = true;
    out.point = mean;
    return out;
  }

  // Period = lag of the highest autocorrelation peak, smallest lag wins ties.
  double denom = 0.0;
  for (double x : prices) denom += (x - mean) * (x - mean);
  double best_corr = -std::numeric_limits<double>::infinity();
  for (std::size_t lag = 1; lag <= prices.size() / 2; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < prices.size(); ++t)
      acc += (prices[t] - mean) * (prices[t + lag] - mean);
    const double corr = acc / denom;
    if (corr > best_corr + 1e-12) {
      best_corr = corr;
      out.period = static_cast<int>(lag);
    }
  }
  return out;
}

}  // namespace rhq
