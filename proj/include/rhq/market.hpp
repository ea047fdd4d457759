#ifndef RHQ_MARKET_HPP
#define RHQ_MARKET_HPP

#include <json.hpp>

namespace rhq {

/// Rates and behavioural parameters of one symmetric market.
/// All rates are plain positive reals per unit time; no unit system is
/// enforced beyond this documentation. abandon_rate == 0 selects the
/// infinitely-patient-driver limit in the analytic operations.
struct MarketParams {
  double passenger_rate = 1.0;  // aggregate arrival rate of passengers
  double driver_rate = 0.5;     // arrival rate of fresh drivers
  double rejoin_prob = 0.0;     // probability a driver re-enters the queue after a ride
  double ride_rate = 1.0;       // ride/break completion rate
  double abandon_rate = 0.0;    // per-driver queue abandonment rate
  double price_cap = 9.0;       // largest admissible price
  double pickup_alpha = 0.0;    // no-ride disutility parameter for the pick-up metric
  int pickup_cutoff = 50;       // waiting-driver count beyond which pick-up time ~ 0

  // Effective driver inflow: fresh arrivals plus geometric rejoins.
  double effective_driver_rate() const { return driver_rate / (1.0 - rejoin_prob); }
  // Ratio of effective driver inflow to aggregate passenger inflow.
  double driver_passenger_ratio() const { return effective_driver_rate() / passenger_rate; }

  void validate() const;

  nlohmann::json to_json() const;
  static MarketParams from_json(const nlohmann::json& j);
};

}  // namespace rhq

#endif
