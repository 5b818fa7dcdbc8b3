#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dvfsim {

/// One discrete DVFS operating point.
struct FrequencyLevel {
  double freq_mhz = 0.0;
  double voltage_v = 0.0;
  double power_mw = 0.0;  ///< measured dynamic power at this level
};

/// Default frequency transition time (seconds), midpoint of the 30-150 us
/// range of real DVFS hardware. Only the eligibility filter uses it.
inline constexpr double kDefaultTransitionTime = 100e-6;

/// A DVFS-enabled processor: a sorted list of discrete frequency levels plus
/// the coefficients of the cubic dynamic-power law
///
///     P(f) = alpha * f^3 + gamma      [f in MHz, P in mW]
///
/// Units are fixed throughout: MHz, megacycles, seconds, mW, mJ. With these,
/// cycles / freq is directly seconds and power * time is directly mJ.
class ProcessorModel {
 public:
  /// Validates and stores the model. Levels must hold at least two strictly
  /// increasing frequencies; alpha > 0, gamma >= 0, p_idle >= 0,
  /// transition_time >= 0. Throws ParameterError otherwise.
  ProcessorModel(std::vector<FrequencyLevel> levels, double alpha, double gamma,
                 double p_idle_mw, double transition_time_s = kDefaultTransitionTime);

  const std::vector<FrequencyLevel>& levels() const { return levels_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double p_idle() const { return p_idle_; }
  double transition_time() const { return transition_time_; }

  double f_min() const { return levels_.front().freq_mhz; }
  double f_max() const { return levels_.back().freq_mhz; }

  /// Cubic-law dynamic power in mW at frequency f (MHz). f need not be one
  /// of the discrete levels; the continuous bound evaluates between them.
  double dynamic_power(double freq_mhz) const;

  /// Time in seconds to run `cycles` megacycles at frequency f (MHz).
  double exec_time(double cycles_mc, double freq_mhz) const;

  /// Energy in mJ of executing at frequency f for t seconds.
  double segment_energy(double freq_mhz, double seconds) const;

  /// Energy in mJ of idling for t seconds.
  double idle_energy(double seconds) const;

 private:
  std::vector<FrequencyLevel> levels_;
  double alpha_;
  double gamma_;
  double p_idle_;
  double transition_time_;
};

/// Built-in models of two real processors: "transmeta_crusoe" and
/// "intel_xscale". Levels and (alpha, gamma) are the published constants;
/// p_idle defaults to dynamic_power(f_min). Throws ParameterError for an
/// unrecognized name.
ProcessorModel preset(const std::string& name);

/// True if `name` is a recognized preset.
bool is_preset(const std::string& name);

/// Ordinary least squares of power against f^3 with intercept, over
/// (freq MHz, power mW) points. Returns (alpha, gamma). Requires at least
/// two points with distinct frequencies.
std::pair<double, double> fit_convex(const std::vector<std::pair<double, double>>& freq_power);

/// JSON persistence mirroring the ProcessorModel fields.
ProcessorModel load_model(const std::string& path);
void save_model(const ProcessorModel& model, const std::string& path);

}  // namespace dvfsim
