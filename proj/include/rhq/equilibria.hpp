#ifndef RHQ_EQUILIBRIA_HPP
#define RHQ_EQUILIBRIA_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rhq/market.hpp"
#include "rhq/sensitivity.hpp"
#include "rhq/wardrop.hpp"

namespace rhq {

/// The three first-order margins of the pricing analysis:
///   Monopoly:               f(phi) +   phi f'(phi)
///   BlockingDuopoly:        f(phi) + 2 phi f'(phi)
///   UnavailabilityDuopoly: 2 f(phi) +  phi f'(phi)
/// Each is strictly decreasing for a model satisfying the curve assumptions,
/// so its nonnegativity threshold is unique.
enum class ThresholdKind { Monopoly, BlockingDuopoly, UnavailabilityDuopoly };

double threshold_value(ThresholdKind kind, const PriceModel& model, double phi);

/// Largest price at which the margin is still nonnegative: the cap when the
/// margin stays nonnegative throughout, otherwise the unique zero.
double threshold_root(ThresholdKind kind, const PriceModel& model);

/// Revenue rate of a monopolist serving half the aggregate demand in the
/// patient-driver limit: min(e, (Lambda/2) f(phi)) * phi.
double monopoly_payoff_limit(const MarketParams& params, const PriceModel& model, double phi);

struct MonopolyResult {
  double price = 0.0;
  double payoff = 0.0;
};

/// Closed-form optimal monopoly price and payoff in the patient-driver limit.
MonopolyResult monopoly_optimal(const MarketParams& params, const PriceModel& model);

/// Numeric cross-check: argmax of the monopoly payoff on a uniform grid.
MonopolyResult monopoly_grid_argmax(const MarketParams& params, const PriceModel& model,
                                    std::size_t grid_n);

enum class Regime { DriverScarce, Intermediate, PassengerScarce, Saturated };
std::string to_string(Regime regime);

/// Driver-passenger-ratio band the market falls in, which determines the
/// kind of blocking-duopoly equilibrium.
Regime classify_regime(const MarketParams& params, const PriceModel& model);

struct PureNE {
  double price = 0.0;
};

/// Closed-form symmetric mixed equilibrium, supported on [lo, hi].
struct MixedNE {
  double lo = 0.0;
  double hi = 0.0;
  double mean_payoff = 0.0;
};

struct EpsNE {
  double price = 0.0;
  double eps = 0.0;
  // The admissible near-zero price is not unique; this is the largest one
  // found on a grid plus bisection refinement.
  bool price_nonunique = true;
};

struct EquilibriumResult {
  std::variant<PureNE, MixedNE, EpsNE> strategy;
  Regime regime = Regime::DriverScarce;
};

/// Symmetric equilibrium of the unavailability-driven duopoly.
PureNE duopoly_u_ne(const MarketParams& params, const PriceModel& model);

/// Symmetric equilibrium of the blocking-driven duopoly: pure, mixed, or an
/// eps-equilibrium near zero depending on the regime.
EquilibriumResult duopoly_b_equilibrium(const MarketParams& params, const PriceModel& model,
                                        double eps);

/// (Lambda f(phi) - e) phi: the payoff of the dearer platform in the middle
/// price band; strictly concave.
double high_band_payoff(const MarketParams& params, const PriceModel& model, double phi);

/// Endpoints of the mixed-equilibrium support / equilibrium cycle:
/// hi maximizes the high-band payoff, lo = payoff(hi) / e.
/// Requires f(phi_b)/2 < rho < 1.
std::pair<double, double> ec_endpoints(const MarketParams& params, const PriceModel& model);

MixedNE mixed_ne(const MarketParams& params, const PriceModel& model);

/// CDF of the mixed equilibrium at phi in [lo, hi]; exactly 0 and 1 at the
/// support endpoints.
double mixed_ne_cdf(const MarketParams& params, const PriceModel& model, const MixedNE& sigma,
                    double phi);

/// Expected payoff of playing phi against the mixed equilibrium, evaluated
/// through the closed-form CDF (constant on the support).
double mixed_payoff(const MarketParams& params, const PriceModel& model, double phi,
                    const MixedNE& sigma);

/// Max-min payoff each platform can guarantee, and the price achieving it.
std::pair<double, double> security_value(const MarketParams& params, const PriceModel& model);

struct CycleWitness {
  double opponent = 0.0;
  double own = 0.0;
  double deviation = 0.0;
  std::string note;
};

struct SubIntervalResult {
  double lo = 0.0;
  double hi = 0.0;
  bool refuted = false;
  CycleWitness witness;
};

/// Grid verification report for the equilibrium-cycle conditions:
/// stability (i), cyclicity (ii), and minimality (iii) via refutation of a
/// finite family of strict sub-intervals.
struct CycleReport {
  bool stability = false;
  bool cyclicity = false;
  bool minimality = false;
  CycleWitness stability_witness;
  CycleWitness cyclicity_witness;
  std::vector<SubIntervalResult> subintervals;
  bool all_pass() const { return stability && cyclicity && minimality; }
};

/// Checks the cycle conditions for `interval` on a grid, with patient-driver
/// limit payoffs under the blocking metric.
CycleReport verify_ec(const MarketParams& params, const PriceModel& model,
                      std::pair<double, double> interval, std::size_t grid_n);

/// Same conditions with the eps-shrunk opponent range and eps-expanded
/// outside range, using abandon_rate = beta payoffs from the Wardrop solver.
CycleReport verify_eps_ec(const MarketParams& params, const PriceModel& model,
                          std::pair<double, double> interval, double eps, double beta,
                          std::size_t grid_n);

using Strategy = std::variant<double, MixedNE>;  // pure price or the mixed equilibrium

struct EpsReport {
  bool pass = false;
  double eps = 0.0;
  double candidate_payoff = 0.0;
  double max_gain = 0.0;        // largest unilateral improvement found
  double best_deviation = 0.0;  // price achieving it
};

/// Largest unilateral deviation gain against the candidate strategy over a
/// deviation grid plus golden-section refinement. Mixed opponents are
/// integrated through the closed-form CDF (512 midpoint cells when
/// abandon_rate > 0, exact closed form in the limit).
EpsReport verify_eps_ne(const MarketParams& params, const PriceModel& model, QosMetric metric,
                        const Strategy& candidate, double eps, double beta, double alpha,
                        std::size_t grid_n = 2000);

struct ComparisonRow {
  std::string scenario;
  double price_lo = 0.0;  // == price_hi except for the mixed support
  double price_hi = 0.0;
  double payoff = 0.0;  // per platform
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // monopoly, duopoly_u, duopoly_b, cooperative
  bool price_b_le_monopoly = false;
  bool monopoly_le_price_u = false;
  bool payoff_b_le_monopoly = false;
  bool payoff_u_le_monopoly = false;
  bool cooperative_matches_monopoly = false;
  bool dominance_ok() const {
    return price_b_le_monopoly && monopoly_le_price_u && payoff_b_le_monopoly &&
           payoff_u_le_monopoly;
  }
};

/// One row per market scenario in the patient-driver limit, with the price
/// and payoff dominance flags. Blocking-duopoly entries are zero in the
/// saturated regime by convention.
ComparisonTable compare_regimes(const MarketParams& params, const PriceModel& model);

}  // namespace rhq

#endif
