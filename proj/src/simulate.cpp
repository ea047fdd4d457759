#include "rhq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "rhq/queueing.hpp"

namespace rhq {

namespace {

constexpr std::size_t kBatches = 32;
constexpr double kWarmupFraction = 0.1;
constexpr double kStudentT31 = 2.0395;  // two-sided 95%, 31 dof
constexpr std::size_t kHistCap = 4096;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Estimate batch_estimate(const std::vector<double>& batch_means) {
  Estimate est;
  std::vector<double> vals;
  for (double v : batch_means)
    if (std::isfinite(v)) vals.push_back(v);
  if (vals.empty()) return est;
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  est.value = mean;
  if (vals.size() < 2 || vals.size() < batch_means.size()) {
    est.half_width = std::numeric_limits<double>::infinity();
    return est;
  }
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
  est.half_width = kStudentT31 * sd / std::sqrt(static_cast<double>(vals.size()));
  return est;
}

// Per-batch raw tallies over the post-warm-up window.
struct Tallies {
  std::vector<double> empty_time;
  std::vector<double> arrivals;
  std::vector<double> arrivals_empty;
  std::vector<double> arrivals_blocked;
  std::vector<double> revenue;
  double batch_len = 0.0;
  double warmup = 0.0;

  explicit Tallies(double horizon)
      : empty_time(kBatches, 0.0),
        arrivals(kBatches, 0.0),
        arrivals_empty(kBatches, 0.0),
        arrivals_blocked(kBatches, 0.0),
        revenue(kBatches, 0.0) {
    warmup = kWarmupFraction * horizon;
    batch_len = (horizon - warmup) / static_cast<double>(kBatches);
  }

  int batch_of(double t) const {
    if (t < warmup) return -1;
    const int b = static_cast<int>((t - warmup) / batch_len);
    return std::min(b, static_cast<int>(kBatches) - 1);
  }

  // Distributes a holding interval [t0, t1) spent with the queue empty.
  void add_empty_time(double t0, double t1) {
    double t = std::max(t0, warmup);
    while (t < t1) {
      const int b = batch_of(t);
      const double edge = warmup + batch_len * static_cast<double>(b + 1);
      const double upto = std::min(t1, edge);
      empty_time[static_cast<std::size_t>(b)] += upto - t;
      t = upto;
    }
  }
};

}  // namespace

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1));
  return splitmix64(state);
}

SimEstimates simulate_platform(const MarketParams& params, const PriceModel& model,
                               double lambda, double phi, double horizon,
                               std::uint64_t seed) {
  const double accept_prob = model.f(phi);
  const double eta = params.driver_rate;
  const double nu = params.ride_rate;
  const double beta = params.abandon_rate;
  const double p = params.rejoin_prob;

  std::mt19937_64 rng(derive_stream(seed, 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto exp_draw = [&](double rate) { return -std::log1p(-unif(rng)) / rate; };

  Tallies tallies(horizon);
  std::vector<double> hist(kHistCap + 1, 0.0);
  std::vector<std::uint64_t> sampled;
  std::uint64_t arrivals_seen = 0;
  double n_time_first_half = 0.0;
  double n_time_second_half = 0.0;

  std::uint64_t n = 0;  // waiting drivers
  std::uint64_t r = 0;  // drivers riding or on a break
  double t = 0.0;
  std::uint64_t events = 0;

  while (t < horizon) {
    const double rate_arrival = lambda;
    const double rate_driver = eta;
    const double rate_abandon = static_cast<double>(n) * beta;
    const double rate_ride = static_cast<double>(r) * nu;
    const double total = rate_arrival + rate_driver + rate_abandon + rate_ride;

    const double dt = exp_draw(total);
    const double t_next = std::min(t + dt, horizon);

    if (n == 0) tallies.add_empty_time(t, t_next);
    if (t >= tallies.warmup) {
      const double held = t_next - t;
      hist[std::min<std::uint64_t>(n, kHistCap)] += held;
      const double mid = tallies.warmup + 0.5 * (horizon - tallies.warmup);
      (t < mid ? n_time_first_half : n_time_second_half) +=
          static_cast<double>(n) * held;
    }

    if (t + dt >= horizon) break;
    t = t_next;
    ++events;

    const double pick = unif(rng) * total;
    if (pick < rate_arrival) {
      const int b = tallies.batch_of(t);
      const bool empty = (n == 0);
      if (b >= 0 && arrivals_seen++ % 25 == 0) {
        const std::size_t slot = static_cast<std::size_t>(std::min<std::uint64_t>(n, kHistCap));
        if (sampled.size() <= slot) sampled.resize(slot + 1, 0);
        ++sampled[slot];
      }
      bool blocked = empty;
      if (!empty) {
        if (unif(rng) < accept_prob) {
          --n;
          ++r;
          if (b >= 0) tallies.revenue[static_cast<std::size_t>(b)] += phi;
        } else {
          blocked = true;  // price refused
        }
      }
      if (b >= 0) {
        auto bi = static_cast<std::size_t>(b);
        tallies.arrivals[bi] += 1.0;
        if (empty) tallies.arrivals_empty[bi] += 1.0;
        if (blocked) tallies.arrivals_blocked[bi] += 1.0;
      }
    } else if (pick < rate_arrival + rate_driver) {
      ++n;
    } else if (pick < rate_arrival + rate_driver + rate_abandon) {
      --n;
      ++r;  // break of the same duration law as a ride
    } else {
      --r;
      if (unif(rng) < p) ++n;
    }
  }

  SimEstimates out;
  out.events = events;
  out.horizon = horizon;

  std::vector<double> u_time(kBatches), u_arr(kBatches), b_arr(kBatches), rev(kBatches);
  for (std::size_t k = 0; k < kBatches; ++k) {
    u_time[k] = tallies.empty_time[k] / tallies.batch_len;
    u_arr[k] = tallies.arrivals[k] > 0.0 ? tallies.arrivals_empty[k] / tallies.arrivals[k]
                                         : std::numeric_limits<double>::quiet_NaN();
    b_arr[k] = tallies.arrivals[k] > 0.0
                   ? tallies.arrivals_blocked[k] / tallies.arrivals[k]
                   : std::numeric_limits<double>::quiet_NaN();
    rev[k] = tallies.revenue[k] / tallies.batch_len;
  }
  out.u_time = batch_estimate(u_time);
  out.u = batch_estimate(u_arr);
  out.b = batch_estimate(b_arr);
  out.revenue = batch_estimate(rev);
  if (lambda == 0.0) out.u = out.u_time;

  double hist_total = 0.0;
  for (double v : hist) hist_total += v;
  std::size_t top = hist.size();
  while (top > 1 && hist[top - 1] == 0.0) --top;
  out.n_marginal.assign(hist.begin(), hist.begin() + static_cast<std::ptrdiff_t>(top));
  if (hist_total > 0.0)
    for (double& v : out.n_marginal) v /= hist_total;
  out.n_sampled_counts = std::move(sampled);

  const double half_len = 0.5 * (horizon - tallies.warmup);
  const double mean1 = n_time_first_half / half_len;
  const double mean2 = n_time_second_half / half_len;
  out.transient_warning = mean2 > 1.5 * mean1 + 5.0;
  return out;
}

CouplingReport simulate_coupled(const MarketParams& params, const PriceModel& model,
                                double lambda_lo, double lambda_hi, double phi,
                                double horizon, std::uint64_t seed) {
  if (!(lambda_lo >= 0.0 && lambda_lo < lambda_hi))
    throw std::domain_error("simulate_coupled needs 0 <= lambda_lo < lambda_hi");
  if (!(params.abandon_rate > 0.0))
    throw std::domain_error("simulate_coupled needs abandon_rate > 0");

  // Only accepting passengers alter the state, so the arrival stream is
  // simulated pre-thinned by f(phi); the low-rate system keeps each arrival
  // with probability lambda_lo / lambda_hi.
  const double arrival_rate = lambda_hi * model.f(phi);
  const double keep_prob = lambda_lo / lambda_hi;
  const double eta = params.driver_rate;
  const double nu = params.ride_rate;
  const double beta = params.abandon_rate;
  const double p = params.rejoin_prob;

  std::mt19937_64 rng(derive_stream(seed, 1));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto exp_draw = [&](double rate) { return -std::log1p(-unif(rng)) / rate; };

  // State of the high-rate system (expected to hold fewer waiting drivers)
  // and the low-rate one.
  std::uint64_t n_hi = 0, r_hi = 0;
  std::uint64_t n_lo = 0, r_lo = 0;

  CouplingReport report;
  report.horizon = horizon;
  report.lambda_lo = lambda_lo;
  report.lambda_hi = lambda_hi;

  double t = 0.0;
  while (true) {
    const std::uint64_t shared_wait = std::min(n_hi, n_lo);
    const std::uint64_t extra_wait_hi = n_hi - shared_wait;
    const std::uint64_t extra_wait_lo = n_lo - shared_wait;
    const std::uint64_t shared_ride = std::min(r_hi, r_lo);
    const std::uint64_t extra_ride_hi = r_hi - shared_ride;
    const std::uint64_t extra_ride_lo = r_lo - shared_ride;

    const double rates[7] = {
        arrival_rate,
        eta,
        static_cast<double>(shared_wait) * beta,
        static_cast<double>(extra_wait_hi + extra_wait_lo) * beta,
        static_cast<double>(shared_ride) * nu,
        static_cast<double>(extra_ride_hi) * nu,
        static_cast<double>(extra_ride_lo) * nu,
    };
    double total = 0.0;
    for (double v : rates) total += v;

    t += exp_draw(total);
    if (t >= horizon) break;
    ++report.events;

    double pick = unif(rng) * total;
    int kind = 0;
    while (kind < 6 && pick >= rates[kind]) pick -= rates[kind++];

    switch (kind) {
      case 0: {  // accepting passenger; both systems see it, lo keeps a coin
        const bool lo_sees = unif(rng) < keep_prob;
        if (n_hi > 0) {
          --n_hi;
          ++r_hi;
        }
        if (lo_sees && n_lo > 0) {
          --n_lo;
          ++r_lo;
        }
        break;
      }
      case 1:  // driver arrival, shared
        ++n_hi;
        ++n_lo;
        break;
      case 2:  // a shared waiting driver loses patience in both systems
        --n_hi;
        ++r_hi;
        --n_lo;
        ++r_lo;
        break;
      case 3: {  // an unshared waiting driver loses patience
        const bool hi_side =
            unif(rng) * static_cast<double>(extra_wait_hi + extra_wait_lo) <
            static_cast<double>(extra_wait_hi);
        if (hi_side) {
          --n_hi;
          ++r_hi;
        } else {
          --n_lo;
          ++r_lo;
        }
        break;
      }
      case 4: {  // a shared riding driver finishes; rejoin flag shared
        const bool rejoin = unif(rng) < p;
        --r_hi;
        --r_lo;
        if (rejoin) {
          ++n_hi;
          ++n_lo;
        }
        break;
      }
      case 5: {  // unshared rider of the high-rate system finishes
        --r_hi;
        if (unif(rng) < p) ++n_hi;
        break;
      }
      default: {  // unshared rider of the low-rate system finishes
        --r_lo;
        if (unif(rng) < p) ++n_lo;
        break;
      }
    }

    if (n_hi > n_lo || n_hi + r_hi > n_lo + r_lo) ++report.violations;
  }
  return report;
}

DuopolySimResult simulate_duopoly(const MarketParams& params, const PriceModel& model,
                                  double phi1, double phi2, QosMetric metric, double horizon,
                                  std::uint64_t seed) {
  DuopolySimResult out;
  out.metric = metric;
  out.split = solve_we(params, model, metric, phi1, phi2);
  out.platform1 =
      simulate_platform(params, model, out.split.lambda1, phi1, horizon, derive_stream(seed, 11));
  out.platform2 =
      simulate_platform(params, model, out.split.lambda2, phi2, horizon, derive_stream(seed, 12));

  auto sim_qos = [&](const SimEstimates& est, double phi) {
    switch (metric) {
      case QosMetric::Unavailability: return est.u.value;
      case QosMetric::Blocking: return est.b.value;
      case QosMetric::Delay: {
        double short_wait = 0.0;
        const std::size_t cutoff = static_cast<std::size_t>(params.pickup_cutoff);
        for (std::size_t n = 1; n < est.n_marginal.size() && n <= cutoff; ++n)
          short_wait += est.n_marginal[n] / static_cast<double>(n);
        return est.b.value + params.pickup_alpha * model.f(phi) * short_wait;
      }
    }
    return 0.0;
  };
  out.sim_qos_gap = std::fabs(sim_qos(out.platform1, phi1) - sim_qos(out.platform2, phi2));
  return out;
}

}  // namespace rhq
