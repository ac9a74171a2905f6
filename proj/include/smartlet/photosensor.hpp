#pragma once

// Face-integrated organic photodetector: steady-state output voltage from a
// digitized responsivity table, first-order asymmetric transients and the
// hysteretic comparator that produces Din.

#include <cmath>
#include <istream>
#include <string>
#include <vector>

namespace smartlet::photo {

inline constexpr double kSunWPerCm2 = 0.1;
/// 10-90 % times of the measured step response.
inline constexpr double kRise1090Us = 230.0;
inline constexpr double kFall9010Us = 1850.0;

/// Responsivity (A/W) over log-spaced intensities at a few bias points, plus
/// dark current density (A/cm^2) per bias.
class ResponsivityTable {
 public:
  ResponsivityTable(std::vector<double> biases_v, std::vector<double> dark_a_per_cm2,
                    std::vector<double> intensities_suns,
                    std::vector<std::vector<double>> responsivity);  // [intensity][bias]

  /// Built-in copy of assets/pd_responsivity.csv.
  static ResponsivityTable defaults();
  /// Parses the CSV layout of assets/pd_responsivity.csv. Throws ParseError.
  static ResponsivityTable from_csv(std::istream& in);
  static ResponsivityTable from_csv_file(const std::string& path);

  /// A/W, linear in log10(intensity) and linear in bias; clamped at the ends.
  double responsivity(double intensity_suns, double bias_v) const;
  double dark_current_density(double bias_v) const;
  /// Total current density in A/cm^2.
  double current_density(double intensity_suns, double bias_v) const;

 private:
  double interp_bias(const std::vector<double>& values, double bias_v) const;

  std::vector<double> biases_;
  std::vector<double> dark_;
  std::vector<double> intensities_;
  std::vector<std::vector<double>> resp_;
};

/// Light reaching one photodetector face.
struct Illumination {
  double ambient_suns = 0.0;      ///< isotropic global light
  double directional_suns = 0.0;  ///< laser, zones, LED
  double angle_deg = 90.0;        ///< incidence angle, 90 = normal to the PD
};

/// Lambertian weighting: 1 at normal incidence, 0 at grazing or from behind.
inline double angular_kernel(double angle_deg) {
  return std::max(0.0, std::sin(angle_deg * M_PI / 180.0));
}

inline double effective_suns(const Illumination& light) {
  return light.ambient_suns + light.directional_suns * angular_kernel(light.angle_deg);
}

struct PhotodiodeModel {
  ResponsivityTable table = ResponsivityTable::defaults();
  double area_cm2 = 1e-4;       ///< 100 x 100 um active area
  double load_ohm = 1e5;        ///< transimpedance of the readout
  double bias_v = -1.0;
  double tau_rise_us = kRise1090Us / std::log(9.0);
  double tau_fall_us = kFall9010Us / std::log(9.0);

  /// Output voltage for an effective intensity in suns. Throws
  /// InvalidParameter for negative intensity.
  double voltage(double intensity_suns) const;
  double voltage(double intensity_suns, double bias_v) const;
};

/// Steady-state output voltage for one face.
double steady_response(const PhotodiodeModel& model, const Illumination& light);

/// First-order relaxation state of the PD output.
class PdTransient {
 public:
  explicit PdTransient(const PhotodiodeModel& model, double initial_v = 0.0)
      : tau_rise_us_(model.tau_rise_us), tau_fall_us_(model.tau_fall_us), v_(initial_v) {}

  /// Relaxes toward `target_v` for `dt_us` using the exact exponential
  /// update, so the output never overshoots its target.
  double step(double target_v, double dt_us) {
    const double tau = target_v > v_ ? tau_rise_us_ : tau_fall_us_;
    v_ += (target_v - v_) * (1.0 - std::exp(-dt_us / tau));
    return v_;
  }
  double value() const { return v_; }
  void reset(double v) { v_ = v; }

 private:
  double tau_rise_us_;
  double tau_fall_us_;
  double v_;
};

/// Runs a sequence of target voltages (one per `dt_us`) through the
/// transient model, starting settled at the first target.
std::vector<double> transient(const PhotodiodeModel& model, const std::vector<double>& targets,
                              double dt_us);

/// 10-90 rise and 90-10 fall of a sampled step response, in microseconds,
/// with linear interpolation between samples. Returns NaN if not crossed.
double rise_time_10_90(const std::vector<double>& trace, double dt_us);
double fall_time_90_10(const std::vector<double>& trace, double dt_us);

struct Comparator {
  double threshold_v = 0.0;
  double hysteresis_v = 0.0;

  /// High above threshold + h/2, low below threshold - h/2, else unchanged.
  bool step(double value_v, bool prior) const {
    if (value_v > threshold_v + hysteresis_v / 2) return true;
    if (value_v < threshold_v - hysteresis_v / 2) return false;
    return prior;
  }
};

/// Threshold midway between the `low_suns` and `high_suns` operating points
/// with hysteresis `hysteresis_fraction` of their gap.
Comparator comparator_between(const PhotodiodeModel& model, double low_suns, double high_suns,
                              double hysteresis_fraction = 0.1);

/// 1 sun ambient reads low, 1 sun + 5 sun laser reads high.
Comparator default_comparator(const PhotodiodeModel& model);

}  // namespace smartlet::photo
