#include "smartlet/photosensor.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "smartlet/errors.hpp"

namespace smartlet::photo {

namespace {

// Mirrors assets/pd_responsivity.csv.
constexpr const char* kDefaultCsv =
    "intensity_suns,0,-1,-2\n"
    "dark,1.0e-9,1.0e-8,3.0e-8\n"
    "0.01,0.170,0.240,0.280\n"
    "0.1,0.168,0.238,0.278\n"
    "0.5,0.165,0.234,0.273\n"
    "1,0.162,0.230,0.268\n"
    "2,0.158,0.225,0.262\n"
    "5,0.152,0.216,0.252\n"
    "10,0.145,0.206,0.240\n";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    cells.push_back(cell);
  }
  return cells;
}

double to_double(const std::string& s, int line, int col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("responsivity table: '" + s + "' is not a number", line, col);
  }
}

// Index i such that xs[i] <= x <= xs[i+1] (xs ascending, size >= 2), and the
// interpolation weight of xs[i+1]; clamps outside the range.
std::pair<std::size_t, double> bracket(const std::vector<double>& xs, double x) {
  if (xs.size() == 1 || x <= xs.front()) return {0, 0.0};
  if (x >= xs.back()) return {xs.size() - 2, 1.0};
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  return {i, (x - xs[i]) / (xs[i + 1] - xs[i])};
}

}  // namespace

ResponsivityTable::ResponsivityTable(std::vector<double> biases_v,
                                     std::vector<double> dark_a_per_cm2,
                                     std::vector<double> intensities_suns,
                                     std::vector<std::vector<double>> responsivity) {
  if (biases_v.empty() || dark_a_per_cm2.size() != biases_v.size() ||
      intensities_suns.empty() || responsivity.size() != intensities_suns.size()) {
    throw InvalidParameter("responsivity table dimensions are inconsistent");
  }
  for (const auto& row : responsivity) {
    if (row.size() != biases_v.size()) {
      throw InvalidParameter("responsivity row width does not match bias count");
    }
  }
  for (double i : intensities_suns) {
    if (!(i > 0)) throw InvalidParameter("responsivity intensities must be positive");
  }
  // Store biases ascending.
  std::vector<std::size_t> order(biases_v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return biases_v[a] < biases_v[b]; });
  std::vector<std::size_t> rows(intensities_suns.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    return intensities_suns[a] < intensities_suns[b];
  });
  for (auto b : order) {
    biases_.push_back(biases_v[b]);
    dark_.push_back(dark_a_per_cm2[b]);
  }
  for (auto r : rows) {
    intensities_.push_back(std::log10(intensities_suns[r]));
    std::vector<double> row;
    for (auto b : order) row.push_back(responsivity[r][b]);
    resp_.push_back(std::move(row));
  }
}

ResponsivityTable ResponsivityTable::defaults() {
  static const ResponsivityTable table = [] {
    std::istringstream in(kDefaultCsv);
    return from_csv(in);
  }();
  return table;
}

ResponsivityTable ResponsivityTable::from_csv(std::istream& in) {
  std::vector<double> biases, dark, intensities;
  std::vector<std::vector<double>> resp;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto cells = split_csv(line);
    if (!have_header) {
      for (std::size_t c = 1; c < cells.size(); ++c) {
        biases.push_back(to_double(cells[c], line_no, static_cast<int>(c) + 1));
      }
      if (biases.empty()) throw ParseError("responsivity table has no bias columns", line_no, 1);
      have_header = true;
      continue;
    }
    if (cells.size() != biases.size() + 1) {
      throw ParseError("responsivity row has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(biases.size() + 1),
                       line_no, 1);
    }
    std::vector<double> values;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      values.push_back(to_double(cells[c], line_no, static_cast<int>(c) + 1));
    }
    if (cells[0] == "dark") {
      dark = std::move(values);
    } else {
      intensities.push_back(to_double(cells[0], line_no, 1));
      resp.push_back(std::move(values));
    }
  }
  if (dark.empty()) throw ParseError("responsivity table has no 'dark' row", line_no, 1);
  return ResponsivityTable(biases, dark, intensities, resp);
}

ResponsivityTable ResponsivityTable::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open responsivity table " + path);
  return from_csv(in);
}

double ResponsivityTable::interp_bias(const std::vector<double>& values, double bias_v) const {
  const auto [i, w] = bracket(biases_, bias_v);
  if (values.size() == 1) return values[0];
  return values[i] * (1 - w) + values[i + 1] * w;
}

double ResponsivityTable::responsivity(double intensity_suns, double bias_v) const {
  if (intensity_suns <= 0) intensity_suns = std::pow(10.0, intensities_.front());
  const auto [r, w] = bracket(intensities_, std::log10(intensity_suns));
  const double lo = interp_bias(resp_[r], bias_v);
  if (resp_.size() == 1) return lo;
  return lo * (1 - w) + interp_bias(resp_[r + 1], bias_v) * w;
}

double ResponsivityTable::dark_current_density(double bias_v) const {
  return interp_bias(dark_, bias_v);
}

double ResponsivityTable::current_density(double intensity_suns, double bias_v) const {
  const double photo =
      intensity_suns > 0 ? responsivity(intensity_suns, bias_v) * intensity_suns * kSunWPerCm2
                         : 0.0;
  return dark_current_density(bias_v) + photo;
}

double PhotodiodeModel::voltage(double intensity_suns, double bias) const {
  if (intensity_suns < 0 || !std::isfinite(intensity_suns)) {
    throw InvalidParameter("intensity must be a finite value >= 0");
  }
  return table.current_density(intensity_suns, bias) * area_cm2 * load_ohm;
}

double PhotodiodeModel::voltage(double intensity_suns) const {
  return voltage(intensity_suns, bias_v);
}

double steady_response(const PhotodiodeModel& model, const Illumination& light) {
  return model.voltage(effective_suns(light));
}

std::vector<double> transient(const PhotodiodeModel& model, const std::vector<double>& targets,
                              double dt_us) {
  std::vector<double> out;
  if (targets.empty()) return out;
  PdTransient pd(model, targets.front());
  out.reserve(targets.size());
  for (double t : targets) out.push_back(pd.step(t, dt_us));
  return out;
}

namespace {

// Time (us) at which `trace` first crosses `level` going in `rising`
// direction at or after index `from`, interpolated.
double crossing(const std::vector<double>& trace, double dt_us, double level, bool rising,
                std::size_t from = 0) {
  for (std::size_t i = std::max<std::size_t>(from, 1); i < trace.size(); ++i) {
    const double a = trace[i - 1], b = trace[i];
    const bool hit = rising ? (a < level && b >= level) : (a > level && b <= level);
    if (hit) return (static_cast<double>(i - 1) + (level - a) / (b - a)) * dt_us;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double rise_time_10_90(const std::vector<double>& trace, double dt_us) {
  if (trace.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
  const double span = *hi - *lo;
  return crossing(trace, dt_us, *lo + 0.9 * span, true) -
         crossing(trace, dt_us, *lo + 0.1 * span, true);
}

double fall_time_90_10(const std::vector<double>& trace, double dt_us) {
  if (trace.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
  const double span = *hi - *lo;
  return crossing(trace, dt_us, *lo + 0.1 * span, false) -
         crossing(trace, dt_us, *lo + 0.9 * span, false);
}

Comparator comparator_between(const PhotodiodeModel& model, double low_suns, double high_suns,
                              double hysteresis_fraction) {
  const double lo = model.voltage(low_suns);
  const double hi = model.voltage(high_suns);
  if (!(hi > lo)) throw InvalidParameter("comparator operating points are not separated");
  return Comparator{(lo + hi) / 2, hysteresis_fraction * (hi - lo)};
}

Comparator default_comparator(const PhotodiodeModel& model) {
  return comparator_between(model, 1.0, 6.0, 0.1);
}

}  // namespace smartlet::photo
