#include "pacmc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pacmc/error.hpp"

namespace pacmc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Kind { Lower, Upper, Pseudo, Fixed, Row };

struct Active {
  Kind kind;
  std::size_t index;  // variable or row
  double value;       // pseudo/fixed value
};

// Dense m x m inverse by Gauss-Jordan with partial pivoting.
bool invert(std::vector<double> m, std::size_t n, std::vector<double>& inv) {
  inv.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r * n + col]) > std::abs(m[piv * n + col])) piv = r;
    }
    const double p = m[piv * n + col];
    if (std::abs(p) < 1e-300) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(m[piv * n + c], m[col * n + c]);
        std::swap(inv[piv * n + c], inv[col * n + c]);
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      m[col * n + c] /= p;
      inv[col * n + c] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        m[r * n + c] -= f * m[col * n + c];
        inv[r * n + c] -= f * inv[col * n + c];
      }
    }
  }
  return true;
}

class Solver {
 public:
  Solver(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt), n_(lp.cols) {
    upper_ = lp.upper;
    upper_[n_ - 1] = kInf;
    max_iterations_ = opt.max_iterations ? opt.max_iterations : 50 * std::max<std::size_t>(lp.rows, 1);
    row_active_.assign(lp.rows, 0);
    row_norm_.resize(lp.rows);
    for (std::size_t r = 0; r < lp.rows; ++r) {
      double nrm = 0.0;
      for (std::size_t c = 0; c < n_; ++c) nrm = std::max(nrm, std::abs(lp.at(r, c)));
      row_norm_[r] = nrm;
    }
  }

  LpSolution run() {
    start();
    std::size_t iter = 0;
    std::size_t since_refactor = 0;
    while (true) {
      const std::size_t q = choose_release();
      if (q == kNone) break;
      if (iter >= max_iterations_) {
        throw SolverStall("simplex exceeded " + std::to_string(max_iterations_) + " iterations");
      }
      step(q);
      ++iter;
      if (++since_refactor >= opt_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
    }
    return finish(iter);
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  // Normal of working constraint q (in a.x <= rhs form).
  void normal(const Active& w, std::vector<double>& out) const {
    out.assign(n_, 0.0);
    switch (w.kind) {
      case Kind::Lower:
        out[w.index] = -1.0;
        break;
      case Kind::Upper:
      case Kind::Pseudo:
      case Kind::Fixed:
        out[w.index] = 1.0;
        break;
      case Kind::Row:
        for (std::size_t c = 0; c < n_; ++c) out[c] = lp_.at(w.index, c);
        break;
    }
  }

  double rhs(const Active& w) const {
    switch (w.kind) {
      case Kind::Lower:
        return -lp_.lower[w.index];
      case Kind::Upper:
        return upper_[w.index];
      case Kind::Pseudo:
      case Kind::Fixed:
        return w.value;
      case Kind::Row:
        return lp_.b[w.index];
    }
    return 0.0;
  }

  std::size_t global_index(const Active& w) const {
    return w.kind == Kind::Row ? n_ + w.index : w.index;
  }

  void start() {
    x_.assign(n_, 0.0);
    working_.clear();
    var_slot_.assign(n_, kNone);
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double lo = lp_.lower[i];
      const double hi = upper_[i];
      Active w{Kind::Pseudo, i, 0.0};
      if (lo == hi) {
        w = {Kind::Fixed, i, lo};
      } else if (0.0 <= lo) {
        w = {Kind::Lower, i, lo};
      } else if (0.0 >= hi) {
        w = {Kind::Upper, i, hi};
      }
      x_[i] = w.value;
      var_slot_[i] = working_.size();
      working_.push_back(w);
    }
    // xi = smallest value satisfying every row; the first row attaining it
    // becomes tight.
    std::size_t tight = kNone;
    double best = -kInf;
    for (std::size_t r = 0; r < lp_.rows; ++r) {
      double head = 0.0;
      for (std::size_t c = 0; c + 1 < n_; ++c) head += lp_.at(r, c) * x_[c];
      const double need = (head - lp_.b[r]) / -lp_.at(r, n_ - 1);
      if (need > best) {
        best = need;
        tight = r;
      }
    }
    if (tight == kNone || best < lp_.lower[n_ - 1]) {
      x_[n_ - 1] = lp_.lower[n_ - 1];
      working_.push_back({Kind::Lower, n_ - 1, lp_.lower[n_ - 1]});
      var_slot_[n_ - 1] = n_ - 1;
    } else {
      working_.push_back({Kind::Row, tight, 0.0});
      row_active_[tight] = 1;
    }
    refactor();
  }

  void refactor() {
    std::vector<double> bmat(n_ * n_);
    std::vector<double> nv;
    for (std::size_t q = 0; q < n_; ++q) {
      normal(working_[q], nv);
      std::copy(nv.begin(), nv.end(), bmat.begin() + static_cast<std::ptrdiff_t>(q * n_));
    }
    if (!invert(bmat, n_, binv_)) throw SolverStall("simplex working set became singular");
    // x = B^-1 rhs
    std::vector<double> r(n_);
    for (std::size_t q = 0; q < n_; ++q) r[q] = rhs(working_[q]);
    for (std::size_t i = 0; i < n_; ++i) {
      double v = 0.0;
      for (std::size_t q = 0; q < n_; ++q) v += binv_[i * n_ + q] * r[q];
      x_[i] = v;
    }
    slack_.resize(lp_.rows);
    for (std::size_t r2 = 0; r2 < lp_.rows; ++r2) {
      double v = 0.0;
      for (std::size_t c = 0; c < n_; ++c) v += lp_.at(r2, c) * x_[c];
      slack_[r2] = lp_.b[r2] - v;
    }
  }

  // Bland: lowest global index among constraints with a wrong-signed
  // multiplier. lambda_q = -(g^T B^-1)_q with g = e_last.
  std::size_t choose_release() {
    std::size_t best = kNone;
    std::size_t best_global = kNone;
    const double* lrow = &binv_[(n_ - 1) * n_];
    for (std::size_t q = 0; q < n_; ++q) {
      const Active& w = working_[q];
      if (w.kind == Kind::Fixed) continue;
      const double lambda = -lrow[q];
      const bool wrong = w.kind == Kind::Pseudo ? std::abs(lambda) > opt_.optimality_tol
                                                : lambda < -opt_.optimality_tol;
      if (!wrong) continue;
      const std::size_t g = global_index(w);
      if (g < best_global) {
        best_global = g;
        best = q;
      }
    }
    return best;
  }

  void step(std::size_t q) {
    const double lambda = -binv_[(n_ - 1) * n_ + q];
    const double sign = lambda < 0.0 ? -1.0 : 1.0;
    std::vector<double> d(n_);
    double dnorm = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      d[i] = sign * binv_[i * n_ + q];
      dnorm = std::max(dnorm, std::abs(d[i]));
    }

    // Ratio test.
    ad_.resize(lp_.rows);
    double alpha = kInf;
    for (std::size_t r = 0; r < lp_.rows; ++r) {
      double v = 0.0;
      for (std::size_t c = 0; c < n_; ++c) v += lp_.at(r, c) * d[c];
      ad_[r] = v;
      if (row_active_[r] || v <= opt_.pivot_tol * row_norm_[r] * dnorm) continue;
      alpha = std::min(alpha, std::max(0.0, slack_[r]) / v);
    }
    const Active& released = working_[q];
    auto bound_candidate = [&](std::size_t i, double& a, Kind& k) {
      a = kInf;
      if (var_slot_[i] != kNone && var_slot_[i] != q) return;
      if (d[i] > opt_.pivot_tol * dnorm && upper_[i] < kInf) {
        a = std::max(0.0, upper_[i] - x_[i]) / d[i];
        k = Kind::Upper;
      } else if (d[i] < -opt_.pivot_tol * dnorm && lp_.lower[i] > -kInf) {
        a = std::max(0.0, x_[i] - lp_.lower[i]) / -d[i];
        k = Kind::Lower;
      }
    };
    for (std::size_t i = 0; i < n_; ++i) {
      double a;
      Kind k;
      bound_candidate(i, a, k);
      alpha = std::min(alpha, a);
    }
    if (!(alpha < kInf)) throw SolverStall("simplex found an unbounded direction");

    // Smallest global index among (near-)ties: bounds first, then rows.
    const double cutoff = alpha + 1e-12 * std::max(1.0, alpha);
    Active enter{Kind::Row, kNone, 0.0};
    for (std::size_t i = 0; i < n_ && enter.index == kNone; ++i) {
      double a;
      Kind k = Kind::Lower;
      bound_candidate(i, a, k);
      if (a <= cutoff) enter = {k, i, 0.0};
    }
    for (std::size_t r = 0; r < lp_.rows && enter.index == kNone; ++r) {
      const double v = ad_[r];
      if (row_active_[r] || v <= opt_.pivot_tol * row_norm_[r] * dnorm) continue;
      if (std::max(0.0, slack_[r]) / v <= cutoff) enter = {Kind::Row, r, 0.0};
    }

    // Move.
    for (std::size_t i = 0; i < n_; ++i) x_[i] += alpha * d[i];
    for (std::size_t r = 0; r < lp_.rows; ++r) slack_[r] -= alpha * ad_[r];

    // Swap constraint q for `enter` and update B^-1 by column replacement.
    std::vector<double> a_new;
    normal(enter, a_new);
    std::vector<double> wv(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      double v = 0.0;
      for (std::size_t i = 0; i < n_; ++i) v += a_new[i] * binv_[i * n_ + j];
      wv[j] = v;
    }
    const double wp = wv[q];
    if (released.kind == Kind::Row) {
      row_active_[released.index] = 0;
    } else {
      var_slot_[released.index] = kNone;
    }
    working_[q] = enter;
    if (enter.kind == Kind::Row) {
      row_active_[enter.index] = 1;
      slack_[enter.index] = 0.0;
    } else {
      var_slot_[enter.index] = q;
      x_[enter.index] = enter.kind == Kind::Upper ? upper_[enter.index] : lp_.lower[enter.index];
    }
    if (std::abs(wp) < 1e-14) {
      refactor();
      return;
    }
    std::vector<double> bp(n_);
    for (std::size_t i = 0; i < n_; ++i) bp[i] = binv_[i * n_ + q];
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (j == q) {
          binv_[i * n_ + j] = bp[i] / wp;
        } else {
          binv_[i * n_ + j] -= bp[i] * wv[j] / wp;
        }
      }
    }
  }

  LpSolution finish(std::size_t iterations) {
    LpSolution sol;
    sol.iterations = iterations;
    sol.x = x_;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      sol.x[i] = std::clamp(sol.x[i], lp_.lower[i], upper_[i]);
    }
    double worst = -kInf;
    for (std::size_t r = 0; r < lp_.rows; ++r) {
      double head = 0.0;
      for (std::size_t c = 0; c + 1 < n_; ++c) head += lp_.at(r, c) * sol.x[c];
      worst = std::max(worst, (head - lp_.b[r]) / -lp_.at(r, n_ - 1));
    }
    if (lp_.rows == 0) worst = lp_.lower[n_ - 1];
    sol.max_residual = worst;
    sol.xi = std::max(worst, lp_.lower[n_ - 1]);
    sol.x[n_ - 1] = sol.xi;
    sol.status = sol.xi > lp_.upper[n_ - 1] ? LpStatus::BoundInfeasible : LpStatus::Optimal;
    return sol;
  }

  const LinearProgram& lp_;
  const LpOptions& opt_;
  const std::size_t n_;
  std::vector<double> upper_;
  std::size_t max_iterations_ = 0;
  std::vector<Active> working_;
  std::vector<std::size_t> var_slot_;
  std::vector<char> row_active_;
  std::vector<double> row_norm_;
  std::vector<double> binv_;  // n x n, column q belongs to working_[q]
  std::vector<double> x_;
  std::vector<double> slack_;
  std::vector<double> ad_;
};

}  // namespace

void LinearProgram::validate() const {
  if (cols < 1) throw ContractError("linear program needs at least one variable");
  if (a.size() != rows * cols || b.size() != rows) {
    throw ContractError("linear program matrix has inconsistent shape");
  }
  if (lower.size() != cols || upper.size() != cols) {
    throw ContractError("linear program bounds have wrong length");
  }
  for (std::size_t i = 0; i < cols; ++i) {
    if (!(lower[i] <= upper[i])) {
      throw ContractError("variable " + std::to_string(i) + " has empty bounds");
    }
  }
  if (!std::isfinite(lower[cols - 1])) throw ContractError("last variable needs a finite lower bound");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::isfinite(at(r, c))) {
        throw ContractError("row " + std::to_string(r) + " has a non-finite coefficient");
      }
    }
    if (!std::isfinite(b[r])) throw ContractError("row " + std::to_string(r) + " has a non-finite bound");
    if (!(at(r, cols - 1) < 0.0)) {
      throw ContractError("row " + std::to_string(r) + " must have a negative last coefficient");
    }
  }
}

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  return Solver(lp, options).run();
}

}  // namespace pacmc
