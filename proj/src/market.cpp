#include "rhq/market.hpp"

#include "rhq/errors.hpp"

namespace rhq {

void MarketParams::validate() const {
  if (!(passenger_rate >= 0.0)) throw ConfigError("passenger_rate must be >= 0");
  if (!(driver_rate > 0.0)) throw ConfigError("driver_rate must be > 0");
  if (!(rejoin_prob >= 0.0 && rejoin_prob < 1.0))
    throw ConfigError("rejoin_prob must lie in [0, 1)");
  if (!(ride_rate > 0.0)) throw ConfigError("ride_rate must be > 0");
  if (!(abandon_rate >= 0.0)) throw ConfigError("abandon_rate must be >= 0");
  if (!(price_cap > 0.0)) throw ConfigError("price_cap must be > 0");
  if (!(pickup_alpha >= 0.0 && pickup_alpha < 1.0))
    throw ConfigError("pickup_alpha must lie in [0, 1)");
  if (pickup_cutoff < 1) throw ConfigError("pickup_cutoff must be >= 1");
}

nlohmann::json MarketParams::to_json() const {
  return nlohmann::json{{"Lambda", passenger_rate}, {"eta", driver_rate},
                        {"p", rejoin_prob},         {"nu", ride_rate},
                        {"beta", abandon_rate},     {"phi_h", price_cap},
                        {"alpha", pickup_alpha},    {"N_bar", pickup_cutoff}};
}

MarketParams MarketParams::from_json(const nlohmann::json& j) {
  MarketParams p;
  p.passenger_rate = j.at("Lambda").get<double>();
  p.driver_rate = j.at("eta").get<double>();
  p.rejoin_prob = j.value("p", 0.0);
  p.ride_rate = j.value("nu", 1.0);
  p.abandon_rate = j.value("beta", 0.0);
  p.price_cap = j.at("phi_h").get<double>();
  p.pickup_alpha = j.value("alpha", 0.0);
  p.pickup_cutoff = j.value("N_bar", 50);
  p.validate();
  return p;
}

}  // namespace rhq
