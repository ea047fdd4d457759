#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rhq/numeric.hpp"
#include "rhq/sensitivity.hpp"

using namespace rhq;

namespace {

// Independent inverse: plain bisection on f itself, no shortcuts.
double inverse_oracle(const PriceModel& m, double x) {
  double lo = 0.0, hi = m.price_cap();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (m.f(mid) > x ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double fd_slope(const PriceModel& m, double phi, double h = 1e-6) {
  const double lo = std::max(0.0, phi - h);
  const double hi = std::min(m.price_cap(), phi + h);
  return (m.f(hi) - m.f(lo)) / (hi - lo);
}

PriceModel tabulated_from_quadratic(double a, double cap, std::size_t knots) {
  std::vector<double> xs = linspace(0.0, cap, knots);
  std::vector<double> ys;
  ys.reserve(knots);
  for (double x : xs) ys.push_back(1.0 - (a * x) * (a * x));
  return PriceModel::tabulated(xs, ys);
}

}  // namespace

TEST_CASE("acceptance probability examples") {
  auto m = PriceModel::quadratic(0.1, 9.0);
  CHECK(m.f(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.f(5.0) == doctest::Approx(0.75).epsilon(1e-14));

  // A cap of 10 drives f to 0 at the top of the range: usable pointwise but
  // flagged invalid by validation.
  auto wide = PriceModel::quadratic(0.1, 10.0);
  CHECK(wide.f(10.0) == doctest::Approx(0.0));
  CHECK_FALSE(wide.validate(1000).find("positivity")->pass);

  CHECK_THROWS_AS(m.f(-0.5), std::domain_error);
  CHECK_THROWS_AS(m.f(9.5), std::domain_error);
}

TEST_CASE("extended inverse branches") {
  auto m = PriceModel::quadratic(0.1, 9.0);
  CHECK(m.f_inverse(1.0) == doctest::Approx(0.0));
  CHECK(m.f_inverse(1.5) == 0.0);
  CHECK(m.f_inverse(0.05) == 9.0);  // below f(9) = 0.19
  // oracle: solve 1 - (0.1 phi)^2 = 0.4 -> sqrt(60)
  const double oracle = inverse_oracle(m, 0.4);
  CHECK(oracle == doctest::Approx(7.7459666924).epsilon(1e-9));
  CHECK(m.f_inverse(0.4) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK_THROWS_AS(m.f_inverse(-0.1), std::domain_error);
}

TEST_CASE("derivatives match finite differences") {
  auto quad = PriceModel::quadratic(0.1, 9.0);
  CHECK(quad.f_prime(5.0) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(quad.f_prime(5.0) == doctest::Approx(fd_slope(quad, 5.0)).epsilon(1e-6));
  CHECK(quad.f_prime(0.0) == 0.0);

  auto lin = PriceModel::linear(0.08, 9.0);
  CHECK(lin.f_prime(3.7) == doctest::Approx(-0.08));
  CHECK(lin.f_prime(0.0) == doctest::Approx(-0.08));

  auto sq = PriceModel::sqrt_family(0.09, 9.0);
  for (double phi : {0.0, 0.5, 2.0, 7.0})
    CHECK(sq.f_prime(phi) == doctest::Approx(fd_slope(sq, phi)).epsilon(1e-6));
  CHECK(sq.phi_f_prime(0.0) == 0.0);
}

TEST_CASE("validation report") {
  CHECK(PriceModel::quadratic(0.1, 9.0).validate(1000).all_pass());
  CHECK(PriceModel::sqrt_family(0.09, 9.0).validate(1000).all_pass());

  auto wide = PriceModel::quadratic(0.1, 10.5).validate(1000);
  const auto* pos = wide.find("positivity");
  REQUIRE(pos != nullptr);
  CHECK_FALSE(pos->pass);
  CHECK(pos->violating_phi > 9.9);

  // Linear curves decrease strictly but are not strictly concave.
  auto lin = PriceModel::linear(0.05, 9.0).validate(500);
  CHECK(lin.find("strict_decrease")->pass);
  CHECK_FALSE(lin.find("strict_concavity")->pass);

  // Convex tabulated data must fail concavity.
  auto convex = PriceModel::tabulated({0.0, 1.0, 2.0, 3.0, 4.0},
                                      {1.0, 0.6, 0.35, 0.2, 0.1});
  CHECK_FALSE(convex.validate(200).find("strict_concavity")->pass);

  CHECK_THROWS_AS(PriceModel::quadratic(0.1, 9.0).validate(2), std::invalid_argument);
}

TEST_CASE("tabulated interpolation tracks its source curve") {
  auto quad = PriceModel::quadratic(0.1, 9.0);
  auto tab = tabulated_from_quadratic(0.1, 9.0, 41);
  for (double phi : linspace(0.0, 9.0, 173))
    CHECK(tab.f(phi) == doctest::Approx(quad.f(phi)).epsilon(5e-4));
  auto rep = tab.validate(400);
  CHECK(rep.find("positivity")->pass);
  CHECK(rep.find("f(0)=1")->pass);
  CHECK(rep.find("strict_decrease")->pass);
  for (double phi : {1.0, 4.5, 8.0})
    CHECK(tab.f_prime(phi) == doctest::Approx(quad.f_prime(phi)).epsilon(5e-3));
}

TEST_CASE("inverse round trip and monotonicity on random models") {
  std::mt19937 gen(20240817);
  std::uniform_real_distribution<double> ad(0.02, 0.105);
  for (int rep = 0; rep < 20; ++rep) {
    const double a = ad(gen);
    const double cap = std::min(9.0, 0.95 / a);
    PriceModel m = (rep % 3 == 0) ? PriceModel::sqrt_family(0.9 / cap, cap)
                                  : PriceModel::quadratic(a, cap);
    if (rep % 5 == 4) m = tabulated_from_quadratic(a, cap, 60);
    REQUIRE(m.validate(300).find("strict_decrease")->pass);

    const double f_cap = m.f(m.price_cap());
    double prev = std::numeric_limits<double>::infinity();
    for (double x : linspace(f_cap, 1.0, 97)) {
      const double phi = m.f_inverse(x);
      CHECK(m.f(phi) == doctest::Approx(x).epsilon(1e-10));
      CHECK(phi <= prev + 1e-12);  // inverse non-increasing in x
      prev = phi;
    }
  }
}

TEST_CASE("json round trip") {
  auto m = PriceModel::quadratic(0.1, 9.0);
  auto j = m.to_json();
  CHECK(j["family"] == "quadratic");
  CHECK(j["a"] == doctest::Approx(0.1));
  auto back = PriceModel::from_json(j);
  CHECK(back.f(5.0) == m.f(5.0));

  auto tab = tabulated_from_quadratic(0.1, 9.0, 12);
  auto tab2 = PriceModel::from_json(tab.to_json());
  CHECK(tab2.f(4.321) == doctest::Approx(tab.f(4.321)).epsilon(1e-14));
}
