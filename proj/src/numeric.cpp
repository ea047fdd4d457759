#include "rhq/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "rhq/errors.hpp"

namespace rhq {

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out.push_back(lo + step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

double bisect_root(const std::function<double(double)>& fn, double lo, double hi,
                   double x_tol, int max_iter) {
  double flo = fn(lo);
  double fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw NumericalError("bisect_root: endpoints do not bracket a root");
  for (int i = 0; i < max_iter && (hi - lo) > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = fn(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_section_min(const std::function<double(double)>& fn, double lo, double hi,
                          double x_tol, int max_iter) {
  static const double inv_gr = (std::sqrt(5.0) - 1.0) / 2.0;  // 1/phi
  double a = lo;
  double b = hi;
  double c = b - (b - a) * inv_gr;
  double d = a + (b - a) * inv_gr;
  double fc = fn(c);
  double fd = fn(d);
  for (int i = 0; i < max_iter && (b - a) > x_tol; ++i) {
    // Ties shrink from the right so a flat stretch (weakly unimodal
    // objective) resolves to its smallest minimizer.
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_gr;
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_gr;
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw NumericalError("solve_dense: dimension mismatch");

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(a(perm[k], k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(a(perm[i], k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) throw NumericalError("solve_dense: singular matrix");
    std::swap(perm[k], perm[piv]);

    const std::size_t rk = perm[k];
    const double pivot = a(rk, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const std::size_t ri = perm[i];
      const double factor = a(ri, k) / pivot;
      if (factor == 0.0) continue;
      a(ri, k) = factor;
      for (std::size_t j = k + 1; j < n; ++j) a(ri, j) -= factor * a(rk, j);
      b[ri] -= factor * b[rk];
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t rk = perm[k];
    double acc = b[rk];
    for (std::size_t j = k + 1; j < n; ++j) acc -= a(rk, j) * x[j];
    x[k] = acc / a(rk, k);
  }
  return x;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers, n]() {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace rhq
