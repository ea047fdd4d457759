#ifndef RHQ_NUMERIC_HPP
#define RHQ_NUMERIC_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace rhq {

// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

std::vector<double> linspace(double lo, double hi, std::size_t n);

// Root of a continuous scalar function on [lo, hi] by bisection.
// Requires fn(lo) and fn(hi) of opposite (or zero) sign.
double bisect_root(const std::function<double(double)>& fn, double lo, double hi,
                   double x_tol = 1e-12, int max_iter = 200);

// Minimizer of a unimodal scalar function on [lo, hi].
double golden_section_min(const std::function<double(double)>& fn, double lo, double hi,
                          double x_tol = 1e-10, int max_iter = 400);

inline double golden_section_max(const std::function<double(double)>& fn, double lo,
                                 double hi, double x_tol = 1e-10, int max_iter = 400) {
  return golden_section_min([&fn](double x) { return -fn(x); }, lo, hi, x_tol, max_iter);
}

// Dense row-major matrix, just enough for stationary-distribution work.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Solves A x = b in place via LU with partial pivoting. Throws NumericalError
// on a numerically singular pivot.
std::vector<double> solve_dense(Matrix a, std::vector<double> b);

// Runs fn(i) for i in [0, n) on up to `threads` worker threads.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace rhq

#endif
