#include "smartlet/optical_link.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "smartlet/errors.hpp"

namespace smartlet::optical {

bool OpticalFrame::data_bit(std::size_t i) const {
  if (i < kCommandBits) return (command >> (kCommandBits - 1 - i)) & 1u;
  return vm::bit_at(payload, i - kCommandBits);
}

void OpticalFrame::set_data_bit(std::size_t i, bool v) {
  if (i < kCommandBits) {
    const auto mask = static_cast<std::uint8_t>(1u << (kCommandBits - 1 - i));
    command = v ? (command | mask) : (command & ~mask);
  } else {
    vm::set_bit_at(payload, i - kCommandBits, v);
  }
}

std::string to_hex(const OpticalFrame& frame) {
  std::string bits = "00";
  for (std::size_t i = 0; i < kFrameDataBits; ++i) bits += frame.data_bit(i) ? '1' : '0';
  std::string hex;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    const int nibble = std::stoi(bits.substr(i, 4), nullptr, 2);
    hex += "0123456789abcdef"[nibble];
  }
  return hex;
}

OpticalFrame frame_from_hex(std::string_view hex) {
  if (hex.size() != 17) {
    throw InvalidParameter("frame hex must be 17 digits, got " + std::to_string(hex.size()));
  }
  std::string bits;
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw InvalidParameter(std::string("invalid hex digit '") + c + "'");
    for (int b = 3; b >= 0; --b) bits += ((v >> b) & 1) ? '1' : '0';
  }
  if (bits[0] != '0' || bits[1] != '0') throw InvalidParameter("frame pad bits must be zero");
  OpticalFrame f;
  for (std::size_t i = 0; i < kFrameDataBits; ++i) f.set_data_bit(i, bits[2 + i] == '1');
  return f;
}

int Waveform::level_at(double t_ms) const {
  auto it = std::upper_bound(samples.begin(), samples.end(), t_ms,
                             [](double t, const Sample& s) { return t < s.t_ms; });
  if (it == samples.begin()) return 0;
  return std::prev(it)->level;
}

std::string to_text(const Waveform& w) {
  std::ostringstream out;
  out << std::setprecision(17);
  if (w.half_bit_ms > 0) out << "# half_bit_ms=" << w.half_bit_ms << '\n';
  for (const auto& s : w.samples) out << s.t_ms << ' ' << s.level << '\n';
  return out.str();
}

Waveform waveform_from_text(std::istream& in) {
  Waveform w;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# half_bit_ms=", 0) == 0) {
      w.half_bit_ms = std::stod(line.substr(14));
      continue;
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    Waveform::Sample s;
    if (!(ss >> s.t_ms >> s.level) || (s.level != 0 && s.level != 1)) {
      throw ParseError("expected 't_ms level' with level 0 or 1", line_no, 1);
    }
    if (!w.samples.empty() && s.t_ms < w.samples.back().t_ms) {
      throw ParseError("waveform times must be nondecreasing", line_no, 1);
    }
    w.samples.push_back(s);
  }
  return w;
}

Waveform manchester_encode(const OpticalFrame& frame, double half_bit_ms,
                           const LinkConfig& config) {
  if (!(half_bit_ms > 0) || !std::isfinite(half_bit_ms)) {
    throw InvalidParameter("half_bit_period must be > 0");
  }
  std::vector<int> half;
  half.reserve(kFrameHalfBits);
  for (std::size_t i = 0; i < kPreambleHalfBits; ++i) half.push_back(i % 2 == 0 ? 1 : 0);
  for (std::size_t i = 0; i < kStartHalfBits; ++i) half.push_back(0);
  const bool rising_one = config.convention == Convention::one_is_rising;
  for (std::size_t i = 0; i < kFrameDataBits; ++i) {
    const bool rising = frame.data_bit(i) == rising_one;
    half.push_back(rising ? 0 : 1);
    half.push_back(rising ? 1 : 0);
  }

  Waveform w;
  w.half_bit_ms = half_bit_ms;
  int level = 0;
  for (std::size_t i = 0; i < half.size(); ++i) {
    if (half[i] != level || i == 0) {
      w.samples.push_back({static_cast<double>(i) * half_bit_ms, half[i]});
      level = half[i];
    }
  }
  w.samples.push_back({static_cast<double>(half.size()) * half_bit_ms, 0});
  return w;
}

Waveform jitter_edges(const Waveform& waveform, double fraction, Rng& rng) {
  Waveform out = waveform;
  const double span = fraction * waveform.half_bit_ms;
  int level = 0;
  for (auto& s : out.samples) {
    if (s.level != level) {
      s.t_ms += rng.uniform(-span, span);
      level = s.level;
    }
  }
  // Offsets below half the edge spacing cannot reorder edges; guard anyway.
  for (std::size_t i = 1; i < out.samples.size(); ++i) {
    out.samples[i].t_ms = std::max(out.samples[i].t_ms, out.samples[i - 1].t_ms);
  }
  return out;
}

namespace {

struct Edge {
  double t;
  bool rising;
};

std::vector<Edge> edges_of(const Waveform& w) {
  std::vector<Edge> edges;
  int level = 0;
  for (const auto& s : w.samples) {
    if (s.level != level) {
      edges.push_back({s.t_ms, s.level == 1});
      level = s.level;
    }
  }
  return edges;
}

// Running least-squares fit of t = a + k*H.
struct ClockFit {
  double n = 0, sk = 0, skk = 0, st = 0, skt = 0;
  void add(double k, double t) {
    n += 1;
    sk += k;
    skk += k * k;
    st += t;
    skt += k * t;
  }
  double period() const { return (n * skt - sk * st) / (n * skk - sk * sk); }
  double offset() const { return (st - period() * sk) / n; }
  double at(double k) const { return offset() + period() * k; }
};

// Index range [s, s+16) is a plausible preamble: alternating edges starting
// with a rise, evenly spaced, followed by the start violation.
bool preamble_at(const std::vector<Edge>& e, std::size_t s, double& spacing) {
  if (s + kPreambleHalfBits > e.size() || !e[s].rising) return false;
  std::vector<double> d;
  for (std::size_t k = 0; k + 1 < kPreambleHalfBits; ++k) d.push_back(e[s + k + 1].t - e[s + k].t);
  // Mean over the span: highs come out of the PD longer than lows, and the
  // median of 8 highs and 7 lows would land on a stretched high.
  const double m = (e[s + kPreambleHalfBits - 1].t - e[s].t) / static_cast<double>(d.size());
  if (!(m > 0)) return false;
  for (double x : d) {
    if (x < 0.5 * m || x > 1.5 * m) return false;
  }
  if (s > 0 && e[s].t - e[s - 1].t < 1.5 * m) return false;
  const std::size_t next = s + kPreambleHalfBits;
  if (next < e.size() && e[next].t - e[next - 1].t < 2.4 * m) return false;
  spacing = m;
  return true;
}

OpticalFrame decode_from(const std::vector<Edge>& e, std::size_t s, const LinkConfig& config) {
  ClockFit fit;
  for (std::size_t k = 0; k < kPreambleHalfBits; ++k) fit.add(static_cast<double>(k), e[s + k].t);
  const bool rising_one = config.convention == Convention::one_is_rising;

  OpticalFrame frame;
  std::size_t last = s + kPreambleHalfBits - 1;
  for (std::size_t j = 0; j < kFrameDataBits; ++j) {
    const double h = fit.period();
    const double idx = static_cast<double>(kPreambleHalfBits + kStartHalfBits + 1 + 2 * j);
    const double expected = fit.at(idx);
    std::size_t best = e.size();
    double best_err = 0.5 * h;
    for (std::size_t i = last + 1; i < e.size() && e[i].t <= expected + 0.5 * h; ++i) {
      const double err = std::abs(e[i].t - expected);
      if (err <= best_err) {
        best = i;
        best_err = err;
      }
    }
    if (best == e.size()) {
      throw FramingError("missing mid-bit transition at data bit " + std::to_string(j), j);
    }
    const std::size_t between = best - last - 1;
    if (between > 1) {
      throw FramingError("extra transitions before data bit " + std::to_string(j), j);
    }
    if (between == 1 && std::abs(e[last + 1].t - (expected - h)) > 0.5 * h) {
      throw FramingError("misplaced bit-boundary transition at data bit " + std::to_string(j), j);
    }
    frame.set_data_bit(j, e[best].rising == rising_one);
    fit.add(idx, e[best].t);
    last = best;
  }
  return frame;
}

}  // namespace

OpticalFrame manchester_decode(const Waveform& waveform, const LinkConfig& config) {
  const auto e = edges_of(waveform);
  std::optional<FramingError> first_error;
  for (std::size_t s = 0; s + kPreambleHalfBits <= e.size(); ++s) {
    double spacing = 0;
    if (!preamble_at(e, s, spacing)) continue;
    try {
      return decode_from(e, s, config);
    } catch (const FramingError& err) {
      if (!first_error) first_error = err;
    }
  }
  if (first_error) throw *first_error;
  throw NoFrame("no preamble found in waveform");
}

Waveform pd_samples_to_levels(const PdTrace& trace, const photo::Comparator& comparator) {
  Waveform w;
  bool level = false;
  w.samples.push_back({trace.t0_ms, 0});
  for (std::size_t i = 0; i < trace.volts.size(); ++i) {
    const bool next = comparator.step(trace.volts[i], level);
    if (next != level) {
      level = next;
      w.samples.push_back({trace.t0_ms + static_cast<double>(i) * trace.dt_ms, level ? 1 : 0});
    }
  }
  const double end = trace.t0_ms + static_cast<double>(trace.volts.size()) * trace.dt_ms;
  if (end > w.samples.back().t_ms) w.samples.push_back({end, level ? 1 : 0});
  return w;
}

PdTrace illuminate(const Waveform& waveform, const photo::PhotodiodeModel& model,
                   double ambient_suns, double led_suns, double dt_ms, double tail_ms) {
  PdTrace trace;
  trace.dt_ms = dt_ms;
  trace.t0_ms = waveform.samples.empty() ? 0.0 : std::min(0.0, waveform.samples.front().t_ms);
  const double end = waveform.duration_ms() + tail_ms;
  const double v_off = model.voltage(ambient_suns);
  const double v_on = model.voltage(ambient_suns + led_suns);
  photo::PdTransient pd(model, v_off);
  const auto n = static_cast<std::size_t>(std::ceil((end - trace.t0_ms) / dt_ms));
  trace.volts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = trace.t0_ms + static_cast<double>(i) * dt_ms;
    trace.volts.push_back(pd.step(waveform.level_at(t) ? v_on : v_off, dt_ms * 1000.0));
  }
  return trace;
}

void FrameReceiver::sample(double t_ms, int level) {
  if (level == level_) return;
  if (edges_.empty()) edges_.push_back({t_ms, 0});
  edges_.push_back({t_ms, level});
  level_ = level;
}

std::optional<FrameReceiver::Result> FrameReceiver::poll(double now_ms) {
  if (edges_.empty() || now_ms - edges_.back().t_ms < idle_ms_) return std::nullopt;
  Waveform w;
  w.samples = edges_;
  w.samples.push_back({now_ms, level_});
  const std::size_t n_edges = edges_.size() - 1;
  edges_.clear();
  // Isolated level changes (zone entries, laser passes) are not frames.
  if (n_edges < kPreambleHalfBits) return std::nullopt;
  Result r;
  r.end_ms = now_ms;
  try {
    r.frame = manchester_decode(w, config_);
  } catch (const NoFrame& e) {
    r.error = e.what();
  } catch (const FramingError& e) {
    r.error = e.what();
  }
  return r;
}

void FrameReceiver::clear() {
  edges_.clear();
  level_ = 0;
}

}  // namespace smartlet::optical
