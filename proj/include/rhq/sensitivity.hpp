#ifndef RHQ_SENSITIVITY_HPP
#define RHQ_SENSITIVITY_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace rhq {

/// Outcome of one numeric check of a price-sensitivity curve.
struct ValidationCheck {
  std::string name;
  bool pass = true;
  double violating_phi = 0.0;  // first grid point that failed, when !pass
  double violating_value = 0.0;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const ValidationCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Price-sensitivity curve: the probability that a quoted price is accepted.
/// Expected to be strictly decreasing and strictly concave with f(0) = 1 and
/// 0 < f <= 1 on [0, price_cap]; `validate` checks this numerically instead
/// of assuming it, so empirical (tabulated) curves can be plugged in.
///
/// Immutable after construction; safe for concurrent shared reads.
class PriceModel {
 public:
  enum class Family { Quadratic, Linear, Sqrt, Tabulated };

  // f(phi) = 1 - (a*phi)^2
  static PriceModel quadratic(double a, double price_cap);
  // f(phi) = 1 - slope*phi
  static PriceModel linear(double slope, double price_cap);
  // f(phi) = sqrt(1 - scale*phi), scale * price_cap < 1
  static PriceModel sqrt_family(double scale, double price_cap);
  // Monotone cubic through (phi_k, f_k); knots must start at 0 and end at
  // price_cap.
  static PriceModel tabulated(std::vector<double> phi_knots, std::vector<double> f_knots);

  Family family() const { return family_; }
  double price_cap() const { return price_cap_; }

  /// Acceptance probability at a price in [0, price_cap].
  double f(double phi) const;

  /// Derivative of f. Analytic for closed-form families; centered finite
  /// differences for tabulated curves.
  double f_prime(double phi) const;

  /// phi * f'(phi) with the phi -> 0 limit (0 for every supported family)
  /// taken explicitly; total even for curves with steep one-sided slope at 0.
  double phi_f_prime(double phi) const;

  /// Extended inverse: price_cap for x below f(price_cap), the unique
  /// preimage for x in [f(price_cap), 1], and 0 for x > 1. Total for x >= 0.
  double f_inverse(double x) const;

  /// Checks positivity/upper bound, f(0)=1, strict decrease and strict
  /// concavity on a uniform grid. Failures are report entries, not errors.
  ValidationReport validate(std::size_t grid_points = 1000) const;

  nlohmann::json to_json() const;
  static PriceModel from_json(const nlohmann::json& j);

 private:
  PriceModel(Family family, double price_cap) : family_(family), price_cap_(price_cap) {}

  void check_domain(double phi) const;
  double interp(double phi) const;

  Family family_;
  double price_cap_;
  double a_ = 0.0;      // quadratic coefficient
  double slope_ = 0.0;  // linear slope
  double scale_ = 0.0;  // sqrt scale
  std::vector<double> knots_x_;
  std::vector<double> knots_y_;
  std::vector<double> knots_m_;  // Fritsch-Carlson tangents
};

}  // namespace rhq

#endif
