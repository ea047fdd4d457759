#include "rhq/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rhq/errors.hpp"
#include "rhq/numeric.hpp"

namespace rhq {

namespace {
constexpr double kStrictTol = 1e-12;  // slack when testing strict inequalities on a grid
}

PriceModel PriceModel::quadratic(double a, double price_cap) {
  if (a <= 0.0 || price_cap <= 0.0)
    throw std::invalid_argument("quadratic model needs a > 0 and price_cap > 0");
  PriceModel m(Family::Quadratic, price_cap);
  m.a_ = a;
  return m;
}

PriceModel PriceModel::linear(double slope, double price_cap) {
  if (slope <= 0.0 || price_cap <= 0.0)
    throw std::invalid_argument("linear model needs slope > 0 and price_cap > 0");
  PriceModel m(Family::Linear, price_cap);
  m.slope_ = slope;
  return m;
}

PriceModel PriceModel::sqrt_family(double scale, double price_cap) {
  if (scale <= 0.0 || price_cap <= 0.0 || scale * price_cap >= 1.0)
    throw std::invalid_argument("sqrt model needs scale > 0 and scale * price_cap < 1");
  PriceModel m(Family::Sqrt, price_cap);
  m.scale_ = scale;
  return m;
}

PriceModel PriceModel::tabulated(std::vector<double> phi_knots, std::vector<double> f_knots) {
  if (phi_knots.size() < 3 || phi_knots.size() != f_knots.size())
    throw std::invalid_argument("tabulated model needs >= 3 matching knots");
  if (phi_knots.front() != 0.0)
    throw std::invalid_argument("tabulated knots must start at phi = 0");
  for (std::size_t i = 1; i < phi_knots.size(); ++i)
    if (phi_knots[i] <= phi_knots[i - 1])
      throw std::invalid_argument("tabulated knots must be strictly increasing");

  PriceModel m(Family::Tabulated, phi_knots.back());
  const std::size_t n = phi_knots.size();

  // Fritsch-Carlson tangents: shape preserving, so monotone data stays
  // monotone between knots.
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    d[i] = (f_knots[i + 1] - f_knots[i]) / (phi_knots[i + 1] - phi_knots[i]);
  std::vector<double> t(n);
  t[0] = d[0];
  t[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0)
      t[i] = 0.0;
    else
      t[i] = 2.0 / (1.0 / d[i - 1] + 1.0 / d[i]);  // harmonic mean
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      t[i] = t[i + 1] = 0.0;
      continue;
    }
    const double alpha = t[i] / d[i];
    const double beta = t[i + 1] / d[i];
    const double r = alpha * alpha + beta * beta;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      t[i] = tau * alpha * d[i];
      t[i + 1] = tau * beta * d[i];
    }
  }

  m.knots_x_ = std::move(phi_knots);
  m.knots_y_ = std::move(f_knots);
  m.knots_m_ = std::move(t);
  return m;
}

void PriceModel::check_domain(double phi) const {
  if (!(phi >= 0.0 && phi <= price_cap_))
    throw std::domain_error("price outside [0, price_cap]");
}

double PriceModel::interp(double phi) const {
  const auto& x = knots_x_;
  const auto& y = knots_y_;
  const auto& t = knots_m_;
  auto it = std::upper_bound(x.begin(), x.end(), phi);
  std::size_t i = (it == x.begin()) ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  if (i + 1 >= x.size()) i = x.size() - 2;
  const double h = x[i + 1] - x[i];
  const double s = (phi - x[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y[i] + h10 * h * t[i] + h01 * y[i + 1] + h11 * h * t[i + 1];
}

double PriceModel::f(double phi) const {
  check_domain(phi);
  switch (family_) {
    case Family::Quadratic: {
      const double ap = a_ * phi;
      return 1.0 - ap * ap;
    }
    case Family::Linear:
      return 1.0 - slope_ * phi;
    case Family::Sqrt:
      return std::sqrt(1.0 - scale_ * phi);
    case Family::Tabulated:
      return interp(phi);
  }
  return 0.0;  // unreachable
}

double PriceModel::f_prime(double phi) const {
  check_domain(phi);
  switch (family_) {
    case Family::Quadratic:
      return -2.0 * a_ * a_ * phi;
    case Family::Linear:
      return -slope_;
    case Family::Sqrt:
      return -scale_ / (2.0 * std::sqrt(1.0 - scale_ * phi));
    case Family::Tabulated: {
      const double h = std::max(1e-6 * price_cap_, 1e-9);
      const double lo = std::max(0.0, phi - h);
      const double hi = std::min(price_cap_, phi + h);
      return (interp(hi) - interp(lo)) / (hi - lo);
    }
  }
  return 0.0;  // unreachable
}

double PriceModel::phi_f_prime(double phi) const {
  check_domain(phi);
  if (phi == 0.0) return 0.0;
  return phi * f_prime(phi);
}

double PriceModel::f_inverse(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("f_inverse needs x >= 0");
  if (x > 1.0) return 0.0;
  const double f_cap = f(price_cap_);
  if (x < f_cap) return price_cap_;
  switch (family_) {
    case Family::Quadratic:
      return std::min(price_cap_, std::sqrt(std::max(0.0, 1.0 - x)) / a_);
    case Family::Linear:
      return std::min(price_cap_, (1.0 - x) / slope_);
    case Family::Sqrt:
      return std::min(price_cap_, (1.0 - x * x) / scale_);
    case Family::Tabulated: {
      if (x >= f(0.0)) return 0.0;
      if (x <= f_cap) return price_cap_;
      return bisect_root([this, x](double p) { return f(p) - x; }, 0.0, price_cap_, 1e-13);
    }
  }
  return 0.0;  // unreachable
}

ValidationReport PriceModel::validate(std::size_t grid_points) const {
  if (grid_points < 3) throw std::invalid_argument("validate needs grid_points >= 3");
  const auto grid = linspace(0.0, price_cap_, grid_points);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);

  ValidationReport rep;

  ValidationCheck pos{"positivity"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(vals[i] > 0.0 && vals[i] <= 1.0 + kStrictTol)) {
      pos.pass = false;
      pos.violating_phi = grid[i];
      pos.violating_value = vals[i];
      break;
    }
  }
  rep.checks.push_back(pos);

  ValidationCheck unit{"f(0)=1"};
  if (std::fabs(vals[0] - 1.0) > kStrictTol) {
    unit.pass = false;
    unit.violating_phi = 0.0;
    unit.violating_value = vals[0];
  }
  rep.checks.push_back(unit);

  ValidationCheck dec{"strict_decrease"};
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(vals[i + 1] - vals[i] < -kStrictTol)) {
      dec.pass = false;
      dec.violating_phi = grid[i + 1];
      dec.violating_value = vals[i + 1] - vals[i];
      break;
    }
  }
  rep.checks.push_back(dec);

  ValidationCheck conc{"strict_concavity"};
  for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
    const double second = vals[i + 2] - 2.0 * vals[i + 1] + vals[i];
    if (!(second < -kStrictTol * std::max(1.0, std::fabs(vals[i])))) {
      conc.pass = false;
      conc.violating_phi = grid[i + 1];
      conc.violating_value = second;
      break;
    }
  }
  rep.checks.push_back(conc);

  return rep;
}

nlohmann::json PriceModel::to_json() const {
  nlohmann::json j;
  j["phi_h"] = price_cap_;
  switch (family_) {
    case Family::Quadratic:
      j["family"] = "quadratic";
      j["a"] = a_;
      break;
    case Family::Linear:
      j["family"] = "linear";
      j["slope"] = slope_;
      break;
    case Family::Sqrt:
      j["family"] = "sqrt";
      j["scale"] = scale_;
      break;
    case Family::Tabulated:
      j["family"] = "tabulated";
      j["phi"] = knots_x_;
      j["f"] = knots_y_;
      break;
  }
  return j;
}

PriceModel PriceModel::from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "quadratic")
    return quadratic(j.at("a").get<double>(), j.at("phi_h").get<double>());
  if (family == "linear")
    return linear(j.at("slope").get<double>(), j.at("phi_h").get<double>());
  if (family == "sqrt")
    return sqrt_family(j.at("scale").get<double>(), j.at("phi_h").get<double>());
  if (family == "tabulated")
    return tabulated(j.at("phi").get<std::vector<double>>(),
                     j.at("f").get<std::vector<double>>());
  throw ConfigError("unknown price model family: " + family);
}

}  // namespace rhq
