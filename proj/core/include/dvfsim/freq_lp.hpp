#pragma once

#include <vector>

namespace dvfsim {

/// The per-task frequency-mix problem:
///
///   minimize    sum_i t_i * powers_i
///   subject to  sum_i t_i * freqs_i = cycles
///               sum_i t_i           = T
///               t_i >= 0
///
/// Construction canonicalizes the levels (sorted ascending by frequency,
/// powers permuted alongside) and checks feasibility of the equalities:
/// f_min * T <= cycles <= f_max * T. Throws InfeasibleError naming the
/// violated side, ParameterError for malformed inputs.
class TaskLP {
 public:
  TaskLP(std::vector<double> freqs, std::vector<double> powers, double cycles, double T);

  const std::vector<double>& freqs() const { return freqs_; }
  const std::vector<double>& powers() const { return powers_; }
  double cycles() const { return cycles_; }
  double T() const { return horizon_; }
  std::size_t n() const { return freqs_.size(); }

 private:
  std::vector<double> freqs_;
  std::vector<double> powers_;
  double cycles_;
  double horizon_;
};

struct LPSolution {
  std::vector<double> times;  ///< seconds per level, aligned with TaskLP::freqs
  double objective = 0.0;     ///< mJ
};

/// Exact solver via vertex enumeration: with two equality constraints every
/// basic solution has at most two positive times, so singles and pairs cover
/// all vertices. Deterministic; ties resolve toward the candidate generated
/// first (singles in level order, then pairs in lexicographic order).
LPSolution solve(const TaskLP& lp);

/// Independently coded oracle over the same candidate set (builds the full
/// list, solves each 2x2 system by Cramer's rule, then picks the minimum).
/// solve() and pair_enumerate() must agree; tests rely on it.
LPSolution pair_enumerate(const TaskLP& lp);

/// Coefficients of the reduced two-variable energy form for exactly four
/// levels, after eliminating t_1 and t_2 with the two equality constraints:
/// E = a0 + a1 * t_3 + a2 * t_4. Diagnostic only.
struct EligibilityCoeffs {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};
EligibilityCoeffs eligibility_coeffs(const TaskLP& lp);

}  // namespace dvfsim
