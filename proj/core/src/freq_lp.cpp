#include "dvfsim/freq_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dvfsim/errors.hpp"

namespace dvfsim {

namespace {

constexpr double kNegTol = 1e-12;  // candidate times >= -kNegTol are clamped to 0

double rel_tol(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

}  // namespace

TaskLP::TaskLP(std::vector<double> freqs, std::vector<double> powers, double cycles, double T)
    : freqs_(std::move(freqs)), powers_(std::move(powers)), cycles_(cycles), horizon_(T) {
  if (freqs_.size() != powers_.size()) {
    throw ParameterError("TaskLP: freqs and powers must have equal length");
  }
  if (freqs_.empty()) throw ParameterError("TaskLP: needs at least one level");
  if (horizon_ <= 0) throw ParameterError("TaskLP: T must be positive");
  for (double f : freqs_) {
    if (f <= 0) throw ParameterError("TaskLP: frequencies must be positive");
  }

  std::vector<std::size_t> order(freqs_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [this](std::size_t a, std::size_t b) { return freqs_[a] < freqs_[b]; });
  std::vector<double> f2(freqs_.size()), p2(freqs_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    f2[i] = freqs_[order[i]];
    p2[i] = powers_[order[i]];
  }
  freqs_ = std::move(f2);
  powers_ = std::move(p2);

  const double lo = freqs_.front() * horizon_;
  const double hi = freqs_.back() * horizon_;
  if (cycles_ < lo - rel_tol(lo)) {
    throw InfeasibleError("TaskLP infeasible: cycles " + std::to_string(cycles_) +
                          " below f_min*T = " + std::to_string(lo));
  }
  if (cycles_ > hi + rel_tol(hi)) {
    throw InfeasibleError("TaskLP infeasible: cycles " + std::to_string(cycles_) +
                          " above f_max*T = " + std::to_string(hi));
  }
  cycles_ = std::clamp(cycles_, lo, hi);
}

LPSolution solve(const TaskLP& lp) {
  const auto& f = lp.freqs();
  const auto& p = lp.powers();
  const std::size_t n = lp.n();
  const double K = lp.cycles();
  const double T = lp.T();

  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<double> best(n, 0.0);

  // single-level vertices: feasible only when f_i * T == K
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(f[i] * T - K) <= rel_tol(K)) {
      const double obj = p[i] * T;
      if (obj < best_obj) {
        best_obj = obj;
        std::fill(best.begin(), best.end(), 0.0);
        best[i] = T;
      }
    }
  }
  // pair vertices: t_i + t_j = T, f_i t_i + f_j t_j = K
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double df = f[j] - f[i];
      if (df <= 0) continue;  // duplicate frequency, no new vertex
      double ti = (f[j] * T - K) / df;
      double tj = (K - f[i] * T) / df;
      if (ti < -kNegTol || tj < -kNegTol) continue;
      ti = std::max(ti, 0.0);
      tj = std::max(tj, 0.0);
      const double obj = ti * p[i] + tj * p[j];
      if (obj < best_obj) {
        best_obj = obj;
        std::fill(best.begin(), best.end(), 0.0);
        best[i] = ti;
        best[j] = tj;
      }
    }
  }

  if (!std::isfinite(best_obj)) {
    throw InfeasibleError("TaskLP: no feasible vertex found");
  }
  return {std::move(best), best_obj};
}

LPSolution pair_enumerate(const TaskLP& lp) {
  const auto& f = lp.freqs();
  const auto& p = lp.powers();
  const std::size_t n = lp.n();
  const double K = lp.cycles();
  const double T = lp.T();

  struct Candidate {
    std::vector<double> times;
    double objective;
  };
  std::vector<Candidate> candidates;

  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(f[i] * T - K) <= rel_tol(K)) {
      std::vector<double> t(n, 0.0);
      t[i] = T;
      candidates.push_back({std::move(t), p[i] * T});
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // | 1   1  | |ti|   |T|
      // | f_i f_j| |tj| = |K|   solved by Cramer's rule
      const double det = f[j] - f[i];
      if (det == 0.0) continue;
      double ti = (T * f[j] - K) / det;
      double tj = (K - T * f[i]) / det;
      if (ti < -kNegTol || tj < -kNegTol) continue;
      ti = std::max(ti, 0.0);
      tj = std::max(tj, 0.0);
      std::vector<double> t(n, 0.0);
      t[i] = ti;
      t[j] = tj;
      candidates.push_back({std::move(t), ti * p[i] + tj * p[j]});
    }
  }

  if (candidates.empty()) {
    throw InfeasibleError("TaskLP: no feasible vertex found");
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    if (candidates[c].objective < candidates[best].objective) best = c;
  }
  return {std::move(candidates[best].times), candidates[best].objective};
}

EligibilityCoeffs eligibility_coeffs(const TaskLP& lp) {
  if (lp.n() != 4) {
    throw ParameterError("eligibility_coeffs: exactly 4 frequency levels required");
  }
  const auto& f = lp.freqs();
  const auto& p = lp.powers();
  const double d = f[1] - f[0];
  if (d == 0.0) {
    throw ParameterError("eligibility_coeffs: f_1 and f_2 must differ");
  }
  const double K = lp.cycles();
  const double T = lp.T();
  EligibilityCoeffs c;
  c.a0 = p[0] * (T * f[1] - K) / d + p[1] * (K - T * f[0]) / d;
  c.a1 = p[2] + p[0] * (f[2] - f[1]) / d - p[1] * (f[2] - f[0]) / d;
  c.a2 = p[3] + p[0] * (f[3] - f[1]) / d - p[1] * (f[3] - f[0]) / d;
  return c;
}

}  // namespace dvfsim
