#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rhq/errors.hpp"
#include "rhq/queueing.hpp"

using namespace rhq;

namespace {

MarketParams base_params(double total, double e, double beta, double nu = 1.0,
                         double p = 0.5) {
  MarketParams m;
  m.passenger_rate = total;
  m.rejoin_prob = p;
  m.driver_rate = e * (1.0 - p);
  m.ride_rate = nu;
  m.abandon_rate = beta;
  m.price_cap = 9.0;
  m.validate();
  return m;
}

const PriceModel kModel = PriceModel::quadratic(0.1, 9.0);

}  // namespace

TEST_CASE("normalizing series closed cases") {
  // No accepted passengers, beta=1, e=1: sum_n e^n/(n! beta^n) = exp(1).
  auto r = mu_series(base_params(2.0, 1.0, 1.0), kModel, 0.0, 5.0);
  CHECK_FALSE(r.divergent);
  CHECK(r.value == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
  CHECK(r.tail_bound <= 1e-12 * r.value);

  // Patient drivers, accepted rate 2 vs e = 1: geometric sum 2.
  auto g = mu_series(base_params(2.0, 1.0, 0.0), kModel, 2.0, 0.0);
  CHECK_FALSE(g.divergent);
  CHECK(g.value == doctest::Approx(2.0).epsilon(1e-14));

  // Balanced rates diverge (ties resolved as divergent).
  CHECK(mu_series(base_params(2.0, 1.0, 0.0), kModel, 1.0, 0.0).divergent);
  CHECK(mu_series(base_params(2.0, 1.0, 0.0), kModel, 0.5, 0.0).divergent);

  CHECK_THROWS_AS(mu_series(base_params(2.0, 1.0, 1.0), kModel, -1.0, 5.0),
                  std::domain_error);
}

TEST_CASE("series tail bound certified on random parameters") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int rep = 0; rep < 40; ++rep) {
    auto params = base_params(2.0, u(gen), u(gen));
    auto r = mu_series(params, kModel, u(gen), u(gen));
    CHECK(r.tail_bound <= 1e-12 * r.value);
    CHECK(r.terms_used >= 1);
  }
}

TEST_CASE("unavailability limit formulas") {
  // 1 - e/(lambda f) when the queue is positive recurrent.
  CHECK(unavailability(base_params(2.0, 1.0, 0.0), kModel, 2.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // Zero when drivers accumulate without bound.
  CHECK(unavailability(base_params(2.0, 1.0, 0.0), kModel, 1.0, 0.0) == 0.0);
  CHECK(unavailability(base_params(2.0, 1.0, 0.0), kModel, 0.0, 5.0) == 0.0);
}

TEST_CASE("unavailability matches the truncated-generator oracle") {
  auto params = base_params(2.0, 1.0, 0.05);
  const double u = unavailability(params, kModel, 2.0, 5.0);  // f(5) = 0.75
  auto pi = ctmc_oracle(params, kModel, 2.0, 5.0, 50, 25);
  double u_oracle = 0.0;
  for (std::size_t r = 0; r < pi.cols(); ++r) u_oracle += pi(0, r);
  CHECK(u == doctest::Approx(u_oracle).epsilon(1e-8));
}

TEST_CASE("blocking identity and examples") {
  // B = U when every price is accepted.
  CHECK(blocking(base_params(2.0, 1.0, 0.0), kModel, 2.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // Price-only blocking when drivers saturate.
  CHECK(blocking(base_params(2.0, 1.0, 0.0), kModel, 1.0, 5.0) ==
        doctest::Approx(1.0 - 0.75).epsilon(1e-14));
  // Patient-driver case: B = 1 - e/lambda in the recurrent band.
  CHECK(blocking(base_params(2.0, 1.0, 0.0), kModel, 2.0, 5.0) ==
        doctest::Approx(0.5).epsilon(1e-14));

  // Algebraic recombination across random parameters.
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int rep = 0; rep < 40; ++rep) {
    auto params = base_params(2.0, u(gen), rep % 4 == 0 ? 0.0 : u(gen));
    const double lambda = u(gen);
    const double phi = 3.0 * u(gen);
    const double fp = kModel.f(phi);
    const double lhs = blocking(params, kModel, lambda, phi);
    const double rhs = 1.0 - fp + fp * unavailability(params, kModel, lambda, phi);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    CHECK(lhs >= 1.0 - fp - 1e-14);
    CHECK(lhs <= 1.0 + 1e-14);
  }
}

TEST_CASE("pick-up delay metric") {
  // alpha = 0 collapses to blocking, both regimes.
  for (double beta : {0.0, 0.7}) {
    auto params = base_params(2.0, 1.0, beta);
    params.pickup_alpha = 0.0;
    CHECK(pickup_delay_qos(params, kModel, 2.0, 5.0) ==
          blocking(params, kModel, 2.0, 5.0));
  }

  // Driver overflow: metric reduces to price-only blocking.
  auto params = base_params(2.0, 1.0, 0.0);
  params.pickup_alpha = 0.5;
  CHECK(pickup_delay_qos(params, kModel, 1.0, 5.0) == doctest::Approx(0.25).epsilon(1e-14));

  // Finite-sum closed form, checked term by term: ratio = e/(lambda f) = 2/3.
  params.pickup_cutoff = 3;
  const double r = 1.0 / 1.5;
  const double harmonic = r + r * r / 2.0 + r * r * r / 3.0;
  const double expected = 0.25 + 0.75 * (1.0 - r) * (1.0 + 0.5 * harmonic);
  CHECK(pickup_delay_qos(params, kModel, 2.0, 5.0) ==
        doctest::Approx(expected).epsilon(1e-12));

  // Impatient-driver form agrees with its own limit as beta -> 0.
  params.pickup_cutoff = 50;
  auto small = params;
  small.abandon_rate = 1e-5;
  CHECK(pickup_delay_qos(small, kModel, 2.0, 5.0) ==
        doctest::Approx(pickup_delay_qos(params, kModel, 2.0, 5.0)).epsilon(1e-3));
}

TEST_CASE("revenue rate") {
  // min(e phi, lambda f phi) in the patient-driver limit.
  CHECK(revenue_rate(base_params(2.0, 1.0, 0.0), kModel, 2.0, 5.0) ==
        doctest::Approx(5.0).epsilon(1e-14));
  CHECK(revenue_rate(base_params(2.0, 1.0, 0.0), kModel, 0.0, 5.0) == 0.0);
  // Saturated side: lambda f phi.
  CHECK(revenue_rate(base_params(2.0, 2.0, 0.0), kModel, 1.0, 5.0) ==
        doctest::Approx(0.75 * 5.0).epsilon(1e-14));
}

TEST_CASE("monotonicity of U and B in the arrival rate") {
  auto params = base_params(2.0, 1.0, 0.5);
  double prev_u = -1.0, prev_b = -1.0;
  for (int i = 0; i < 50; ++i) {
    const double lambda = 0.05 + 2.0 * i / 49.0;
    const double u = unavailability(params, kModel, lambda, 4.0);
    const double b = blocking(params, kModel, lambda, 4.0);
    CHECK(u > prev_u);
    CHECK(b > prev_b);
    prev_u = u;
    prev_b = b;
  }
}

TEST_CASE("revenue continuous at the patient-driver limit") {
  auto limit = base_params(2.5, 1.0, 0.0);
  const double m0 = revenue_rate(limit, kModel, 2.5, 2.0);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double beta : {1.0, 0.1, 0.01, 0.001, 1e-4}) {
    auto params = base_params(2.5, 1.0, beta);
    const double gap = std::fabs(revenue_rate(params, kModel, 2.5, 2.0) - m0);
    CHECK(gap < prev_gap + 1e-12);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-3);

  // Divergent-side limit: revenue tends to lambda f phi.
  auto sat = base_params(2.0, 1.5, 0.0);
  const double m0s = revenue_rate(sat, kModel, 1.0, 2.0);
  auto satb = base_params(2.0, 1.5, 1e-4);
  CHECK(std::fabs(revenue_rate(satb, kModel, 1.0, 2.0) - m0s) < 1e-2);
}

TEST_CASE("joint stationary distribution") {
  auto params = base_params(2.0, 1.0, 0.5);
  const double lambda = 1.0;
  const double phi = 0.0;  // f = 1
  auto pi = joint_stationary(params, kModel, lambda, phi, 30, 30);

  double mass = 0.0;
  for (double v : pi.data()) mass += v;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

  // Empty-queue row recovers the unavailability probability.
  double row0 = 0.0;
  for (std::size_t r = 0; r <= 30; ++r) row0 += pi(0, r);
  CHECK(row0 == doctest::Approx(unavailability(params, kModel, lambda, phi)).epsilon(1e-10));

  // Ride-station marginal is Poisson(e/nu).
  const double mean = params.effective_driver_rate() / params.ride_rate;
  double log_pmf = -mean;
  for (std::size_t r = 0; r <= 10; ++r) {
    double marg = 0.0;
    for (std::size_t n = 0; n <= 30; ++n) marg += pi(n, r);
    CHECK(marg == doctest::Approx(std::exp(log_pmf)).epsilon(1e-9));
    log_pmf += std::log(mean / static_cast<double>(r + 1));
  }

  // Factorization against the independent generator solve.
  auto oracle = ctmc_oracle(params, kModel, lambda, phi, 30, 30);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < pi.data().size(); ++i)
    max_diff = std::max(max_diff, std::fabs(pi.data()[i] - oracle.data()[i]));
  CHECK(max_diff <= 1e-8);

  CHECK(global_balance_residual(params, kModel, lambda, phi, oracle) <= 1e-12);

  CHECK_THROWS_AS(joint_stationary(params, kModel, lambda, phi, 3, 3), TruncationError);
  CHECK_THROWS_AS(joint_stationary(base_params(2.0, 1.0, 0.0), kModel, lambda, phi, 30, 30),
                  RegimeError);
}

TEST_CASE("default truncation scales with the slow station") {
  auto params = base_params(2.0, 1.0, 0.05);
  CHECK(default_truncation(params) >= 200);
  CHECK(default_truncation(base_params(2.0, 1.0, 2.0)) >= 100);
}
