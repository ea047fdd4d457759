#include "rhq/queueing.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "rhq/errors.hpp"

namespace rhq {

namespace {

constexpr std::size_t kMaxSeriesTerms = 50'000'000;

// Log-space pass over the series, optionally capturing the first `capture`
// log-terms (for the pick-up metric). Returned pair: (log of the full sum,
// log terms vector).
struct SeriesScan {
  double log_sum = 0.0;
  double tail_bound = 0.0;
  std::size_t terms = 0;
  std::vector<double> head_log_terms;  // log mu_n for n = 0..capture
};

SeriesScan scan_series(double effective, double accepted, double beta, double rel_tol,
                       std::size_t capture) {
  SeriesScan out;
  out.head_log_terms.reserve(capture + 1);
  out.head_log_terms.push_back(0.0);  // mu_0 = 1

  // Linear-space accumulation with explicit rescaling; terms can dwarf the
  // double range before the factorial decay kicks in.
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  std::size_t n = 0;
  while (true) {
    ++n;
    if (n > kMaxSeriesTerms)
      throw NumericalError("mu_series: term budget exhausted (abandon_rate too small)");
    const double ratio = effective / (accepted + static_cast<double>(n) * beta);
    term *= ratio;
    sum += term;
    if (sum > 1e280) {
      sum *= 1e-280;
      term *= 1e-280;
      log_scale += 280.0 * std::log(10.0);
    }
    if (n <= capture) out.head_log_terms.push_back(std::log(term) + log_scale);

    const double next_ratio = effective / (accepted + static_cast<double>(n + 1) * beta);
    if (next_ratio < 1.0 && n >= capture) {
      // Remaining terms are dominated by a geometric series with ratio
      // next_ratio, giving a certified remainder bound.
      const double tail = term * next_ratio / (1.0 - next_ratio);
      if (tail < rel_tol * sum) {
        out.tail_bound = tail * std::exp(log_scale);
        break;
      }
    }
  }
  out.log_sum = std::log(sum) + log_scale;
  out.terms = n + 1;  // counting mu_0
  return out;
}

}  // namespace

SeriesResult mu_series(const MarketParams& params, const PriceModel& model, double lambda,
                       double phi, double rel_tol) {
  if (!(lambda >= 0.0)) throw std::domain_error("mu_series needs lambda >= 0");
  if (!(rel_tol > 0.0)) throw std::domain_error("mu_series needs rel_tol > 0");
  const double accepted = lambda * model.f(phi);
  const double e = params.effective_driver_rate();
  SeriesResult res;

  if (params.abandon_rate == 0.0) {
    // Geometric series; diverges at ratio >= 1 (ties resolved as divergent,
    // where both branch expressions for downstream quantities coincide).
    if (accepted > e) {
      const double r = e / accepted;
      res.value = 1.0 / (1.0 - r);
      res.log_value = -std::log1p(-r);
      res.tail_bound = 0.0;
      res.terms_used = 0;
    } else {
      res.divergent = true;
      res.value = std::numeric_limits<double>::infinity();
      res.log_value = std::numeric_limits<double>::infinity();
    }
    return res;
  }

  const auto scan = scan_series(e, accepted, params.abandon_rate, rel_tol, 0);
  res.value = std::exp(scan.log_sum);
  res.log_value = scan.log_sum;
  res.tail_bound = scan.tail_bound;
  res.terms_used = scan.terms;
  return res;
}

double unavailability(const MarketParams& params, const PriceModel& model, double lambda,
                      double phi) {
  const SeriesResult s = mu_series(params, model, lambda, phi);
  if (s.divergent) return 0.0;
  return std::exp(-s.log_value);
}

double blocking(const MarketParams& params, const PriceModel& model, double lambda,
                double phi) {
  const double fp = model.f(phi);
  return (1.0 - fp) + fp * unavailability(params, model, lambda, phi);
}

double pickup_delay_qos(const MarketParams& params, const PriceModel& model, double lambda,
                        double phi) {
  const double fp = model.f(phi);
  const double alpha = params.pickup_alpha;
  if (alpha == 0.0) return blocking(params, model, lambda, phi);
  const double e = params.effective_driver_rate();
  const std::size_t cutoff = static_cast<std::size_t>(params.pickup_cutoff);
  const double accepted = lambda * fp;

  if (params.abandon_rate == 0.0) {
    // Closed form in the patient-driver limit, with the indicator that the
    // waiting queue is positive-recurrent.
    if (accepted > e) {
      const double r = e / accepted;
      double harmonic = 0.0;
      double rn = 1.0;
      for (std::size_t n = 1; n <= cutoff; ++n) {
        rn *= r;
        harmonic += rn / static_cast<double>(n);
      }
      return (1.0 - fp) + fp * (1.0 - r) * (1.0 + alpha * harmonic);
    }
    return 1.0 - fp;
  }

  const auto scan = scan_series(e, accepted, params.abandon_rate, 1e-12, cutoff);
  double weighted = 0.0;  // sum_{n=1..cutoff} mu_n / n, relative to the full sum
  for (std::size_t n = 1; n < scan.head_log_terms.size(); ++n)
    weighted += std::exp(scan.head_log_terms[n] - scan.log_sum) / static_cast<double>(n);
  const double u = std::exp(-scan.log_sum);
  return (1.0 - fp) + fp * u + alpha * fp * weighted;
}

double revenue_rate(const MarketParams& params, const PriceModel& model, double lambda,
                    double phi) {
  const double accepted = lambda * model.f(phi);
  if (accepted == 0.0) return 0.0;
  return accepted * phi * (1.0 - unavailability(params, model, lambda, phi));
}

std::size_t default_truncation(const MarketParams& params) {
  const double e = params.effective_driver_rate();
  const double by_ride = e / params.ride_rate;
  const double by_patience = e / (params.abandon_rate + 1e-9);
  const double scale = std::max({by_ride, by_patience, 10.0});
  return static_cast<std::size_t>(std::ceil(10.0 * scale));
}

Matrix joint_stationary(const MarketParams& params, const PriceModel& model, double lambda,
                        double phi, std::size_t n_max, std::size_t r_max) {
  if (params.abandon_rate <= 0.0)
    throw RegimeError("joint_stationary requires abandon_rate > 0");
  const double e = params.effective_driver_rate();
  const double accepted = lambda * model.f(phi);
  const double beta = params.abandon_rate;
  const double ride_mean = e / params.ride_rate;  // Poisson parameter of the ride station

  const SeriesResult series = mu_series(params, model, lambda, phi);

  // Certified omitted mass: geometric bound past n_max plus a Poisson tail
  // bound past r_max.
  const double ratio_n = e / (accepted + static_cast<double>(n_max + 1) * beta);
  double log_mu = 0.0;
  std::vector<double> log_mu_row(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    log_mu += std::log(e / (accepted + static_cast<double>(n) * beta));
    log_mu_row[n] = log_mu;
  }
  double n_tail = std::numeric_limits<double>::infinity();
  if (ratio_n < 1.0) {
    const double log_next = log_mu + std::log(ratio_n);
    n_tail = std::exp(log_next - std::log1p(-ratio_n) - series.log_value);
  }

  const double ratio_r = ride_mean / static_cast<double>(r_max + 1);
  double r_tail = std::numeric_limits<double>::infinity();
  double log_poi = -ride_mean;  // log of e^-m m^r / r! at r=0
  std::vector<double> log_poi_row(r_max + 1);
  log_poi_row[0] = log_poi;
  for (std::size_t r = 1; r <= r_max; ++r) {
    log_poi += std::log(ride_mean / static_cast<double>(r));
    log_poi_row[r] = log_poi;
  }
  if (ratio_r < 1.0)
    r_tail = std::exp(log_poi + std::log(ratio_r) - std::log1p(-ratio_r));

  const double omitted = n_tail + r_tail;
  if (!(omitted < 1e-10))
    throw TruncationError("joint_stationary: truncation too small for 1e-10 omitted mass",
                          omitted);

  Matrix pi(n_max + 1, r_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n)
    for (std::size_t r = 0; r <= r_max; ++r)
      pi(n, r) = std::exp(log_mu_row[n] - series.log_value + log_poi_row[r]);
  return pi;
}

namespace {

// Off-diagonal rates of the truncated chain; transitions leaving the box are
// dropped (the chain stays put).
template <typename Emit>
void for_each_transition(double eta, double accepted, double beta, double nu, double p,
                         std::size_t n_max, std::size_t r_max, std::size_t n, std::size_t r,
                         Emit&& emit) {
  if (n < n_max) emit(n + 1, r, eta);
  const double out1 = (n >= 1 ? accepted : 0.0) + static_cast<double>(n) * beta;
  if (out1 > 0.0 && r < r_max) emit(n - 1, r + 1, out1);
  if (r >= 1) {
    const double done = static_cast<double>(r) * nu;
    emit(n, r - 1, done * (1.0 - p));
    if (n < n_max) emit(n + 1, r - 1, done * p);
  }
}

}  // namespace

Matrix ctmc_oracle(const MarketParams& params, const PriceModel& model, double lambda,
                   double phi, std::size_t n_max, std::size_t r_max) {
  if (params.abandon_rate <= 0.0) throw RegimeError("ctmc_oracle requires abandon_rate > 0");
  const double accepted = lambda * model.f(phi);
  const std::size_t nr = r_max + 1;
  const std::size_t dim = (n_max + 1) * nr;
  auto idx = [nr](std::size_t n, std::size_t r) { return n * nr + r; };

  // A = Q^T with the last balance equation replaced by normalization.
  Matrix a(dim, dim, 0.0);
  for (std::size_t n = 0; n <= n_max; ++n) {
    for (std::size_t r = 0; r <= r_max; ++r) {
      const std::size_t from = idx(n, r);
      double diag = 0.0;
      for_each_transition(params.driver_rate, accepted, params.abandon_rate,
                          params.ride_rate, params.rejoin_prob, n_max, r_max, n, r,
                          [&](std::size_t tn, std::size_t tr, double rate) {
                            a(idx(tn, tr), from) += rate;
                            diag += rate;
                          });
      a(from, from) -= diag;
    }
  }
  std::vector<double> b(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) a(dim - 1, j) = 1.0;
  b[dim - 1] = 1.0;

  std::vector<double> x = solve_dense(std::move(a), std::move(b));

  Matrix pi(n_max + 1, r_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n)
    for (std::size_t r = 0; r <= r_max; ++r) pi(n, r) = x[idx(n, r)];
  return pi;
}

double global_balance_residual(const MarketParams& params, const PriceModel& model,
                               double lambda, double phi, const Matrix& pi) {
  const double accepted = lambda * model.f(phi);
  const std::size_t n_max = pi.rows() - 1;
  const std::size_t r_max = pi.cols() - 1;
  Matrix flow(pi.rows(), pi.cols(), 0.0);
  for (std::size_t n = 0; n <= n_max; ++n) {
    for (std::size_t r = 0; r <= r_max; ++r) {
      for_each_transition(params.driver_rate, accepted, params.abandon_rate,
                          params.ride_rate, params.rejoin_prob, n_max, r_max, n, r,
                          [&](std::size_t tn, std::size_t tr, double rate) {
                            flow(tn, tr) += rate * pi(n, r);
                            flow(n, r) -= rate * pi(n, r);
                          });
    }
  }
  double residual = 0.0;
  for (double v : flow.data()) residual = std::max(residual, std::fabs(v));
  return residual;
}

}  // namespace rhq
