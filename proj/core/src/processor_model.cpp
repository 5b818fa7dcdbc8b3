#include "dvfsim/processor_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dvfsim/errors.hpp"
#include "json.hpp"

namespace dvfsim {

ProcessorModel::ProcessorModel(std::vector<FrequencyLevel> levels, double alpha,
                               double gamma, double p_idle_mw, double transition_time_s)
    : levels_(std::move(levels)),
      alpha_(alpha),
      gamma_(gamma),
      p_idle_(p_idle_mw),
      transition_time_(transition_time_s) {
  if (levels_.size() < 2) {
    throw ParameterError("processor model needs at least 2 frequency levels");
  }
  for (const auto& lv : levels_) {
    if (lv.freq_mhz <= 0 || lv.voltage_v <= 0 || lv.power_mw <= 0) {
      throw ParameterError("frequency level fields must be positive");
    }
  }
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    if (levels_[i].freq_mhz <= levels_[i - 1].freq_mhz) {
      throw ParameterError("frequency levels must be strictly increasing");
    }
  }
  if (alpha_ <= 0) throw ParameterError("alpha must be positive");
  if (gamma_ < 0) throw ParameterError("gamma must be non-negative");
  if (p_idle_ < 0) throw ParameterError("p_idle must be non-negative");
  if (transition_time_ < 0) throw ParameterError("transition_time must be non-negative");
}

double ProcessorModel::dynamic_power(double freq_mhz) const {
  if (freq_mhz <= 0) {
    throw ParameterError("dynamic_power: frequency must be positive");
  }
  return alpha_ * freq_mhz * freq_mhz * freq_mhz + gamma_;
}

double ProcessorModel::exec_time(double cycles_mc, double freq_mhz) const {
  if (freq_mhz <= 0) {
    throw ParameterError("exec_time: frequency must be positive");
  }
  if (cycles_mc < 0) {
    throw ParameterError("exec_time: cycles must be non-negative");
  }
  return cycles_mc / freq_mhz;
}

double ProcessorModel::segment_energy(double freq_mhz, double seconds) const {
  if (seconds < 0) {
    throw ParameterError("segment_energy: duration must be non-negative");
  }
  if (seconds == 0) return 0.0;
  return dynamic_power(freq_mhz) * seconds;
}

double ProcessorModel::idle_energy(double seconds) const {
  if (seconds < 0) {
    throw ParameterError("idle_energy: duration must be non-negative");
  }
  return p_idle_ * seconds;
}

namespace {

ProcessorModel make_preset(std::vector<FrequencyLevel> levels, double alpha, double gamma) {
  const double p_idle = alpha * levels.front().freq_mhz * levels.front().freq_mhz *
                            levels.front().freq_mhz +
                        gamma;
  return ProcessorModel(std::move(levels), alpha, gamma, p_idle);
}

}  // namespace

ProcessorModel preset(const std::string& name) {
  if (name == "transmeta_crusoe") {
    return make_preset({{300, 1.2, 1300},
                        {400, 1.225, 1900},
                        {533, 1.35, 3000},
                        {600, 1.5, 4200},
                        {667, 1.6, 5300}},
                       1.94e-5, 4.44);
  }
  if (name == "intel_xscale") {
    return make_preset({{150, 0.75, 80},
                        {400, 1.0, 170},
                        {600, 1.3, 400},
                        {800, 1.6, 900},
                        {1000, 1.8, 1600}},
                       1.55e-6, 60.0);
  }
  throw ParameterError("unknown processor preset: \"" + name + "\"");
}

bool is_preset(const std::string& name) {
  return name == "transmeta_crusoe" || name == "intel_xscale";
}

std::pair<double, double> fit_convex(const std::vector<std::pair<double, double>>& freq_power) {
  std::vector<double> xs;
  xs.reserve(freq_power.size());
  for (const auto& [f, p] : freq_power) {
    xs.push_back(f * f * f);
  }
  // at least two distinct frequencies, else the normal equations degenerate
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    throw ParameterError("fit_convex: need at least 2 points with distinct frequencies");
  }

  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += freq_power[i].second;
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (freq_power[i].second - mean_y);
  }
  const double alpha = sxy / sxx;
  const double gamma = mean_y - alpha * mean_x;
  return {alpha, gamma};
}

ProcessorModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open processor model file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("processor model: ") + e.what());
  }
  try {
    std::vector<FrequencyLevel> levels;
    for (const auto& lv : j.at("levels")) {
      levels.push_back({lv.at("freq").get<double>(), lv.at("voltage").get<double>(),
                        lv.at("power").get<double>()});
    }
    const double alpha = j.at("alpha").get<double>();
    const double gamma = j.at("gamma").get<double>();
    double p_idle;
    if (j.contains("p_idle")) {
      p_idle = j.at("p_idle").get<double>();
    } else {
      const double f1 = levels.empty() ? 0.0 : levels.front().freq_mhz;
      p_idle = alpha * f1 * f1 * f1 + gamma;
    }
    const double tt = j.value("transition_time", kDefaultTransitionTime);
    return ProcessorModel(std::move(levels), alpha, gamma, p_idle, tt);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("processor model field error in " + path + ": " + e.what());
  }
}

void save_model(const ProcessorModel& model, const std::string& path) {
  nlohmann::json j;
  j["alpha"] = model.alpha();
  j["gamma"] = model.gamma();
  j["p_idle"] = model.p_idle();
  j["transition_time"] = model.transition_time();
  j["levels"] = nlohmann::json::array();
  for (const auto& lv : model.levels()) {
    j["levels"].push_back({{"freq", lv.freq_mhz}, {"voltage", lv.voltage_v}, {"power", lv.power_mw}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write processor model file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace dvfsim
