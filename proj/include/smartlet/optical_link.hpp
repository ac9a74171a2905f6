#pragma once

// Optical programming channel: Manchester framing of an 8-bit command plus a
// 58-bit payload, waveform text I/O, and clock-recovering decoding of
// comparator output.
//
// Frame on the line, in half-bits of length H:
//   preamble  16 half-bits 1,0,1,0,...,1,0
//   start      2 half-bits 0,0 (a coding violation: three lows in a row)
//   data      66 bits x 2 half-bits (command MSB first, then payload bit 0..57)
// The line idles low. With the default convention a 1 is low then high.

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "smartlet/lablet_vm.hpp"
#include "smartlet/photosensor.hpp"
#include "smartlet/rng.hpp"

namespace smartlet::optical {

inline constexpr std::size_t kPreambleHalfBits = 16;
inline constexpr std::size_t kStartHalfBits = 2;
inline constexpr std::size_t kCommandBits = 8;
inline constexpr std::size_t kFrameDataBits = kCommandBits + vm::kRunCommandBits;
inline constexpr std::size_t kFrameHalfBits =
    kPreambleHalfBits + kStartHalfBits + 2 * kFrameDataBits;

enum class Convention : std::uint8_t {
  one_is_rising,   ///< 1 = low->high at mid-bit (default)
  one_is_falling,
};

struct OpticalFrame {
  std::uint8_t command = 0;
  vm::RunCommandBits payload;

  /// Data bit i of the frame (0..65): command MSB first, then payload.
  bool data_bit(std::size_t i) const;
  void set_data_bit(std::size_t i, bool v);

  friend bool operator==(const OpticalFrame&, const OpticalFrame&) = default;
};

/// 17 hex digits: two zero pad bits, the command, then the payload.
std::string to_hex(const OpticalFrame& frame);
/// Throws InvalidParameter on bad length, digits or nonzero pad bits.
OpticalFrame frame_from_hex(std::string_view hex);

/// Piecewise-constant light level: each sample holds from its time until the
/// next sample's time. The last sample marks the end of the waveform.
struct Waveform {
  struct Sample {
    double t_ms = 0.0;
    int level = 0;
    friend bool operator==(const Sample&, const Sample&) = default;
  };
  std::vector<Sample> samples;
  double half_bit_ms = 0.0;

  double duration_ms() const { return samples.empty() ? 0.0 : samples.back().t_ms; }
  /// Level at time t (0 before the first sample).
  int level_at(double t_ms) const;
};

/// Two-column text: optional `# half_bit_ms=H` header, then `t_ms level`.
std::string to_text(const Waveform& waveform);
Waveform waveform_from_text(std::istream& in);

struct LinkConfig {
  Convention convention = Convention::one_is_rising;
};

/// Throws InvalidParameter if half_bit_ms <= 0.
Waveform manchester_encode(const OpticalFrame& frame, double half_bit_ms,
                           const LinkConfig& config = {});

/// Moves every level change by an independent uniform offset in
/// [-fraction, +fraction] x half_bit_ms.
Waveform jitter_edges(const Waveform& waveform, double fraction, Rng& rng);

/// Throws NoFrame when no preamble is found and FramingError (with the data
/// bit index) when the data section breaks the Manchester code.
OpticalFrame manchester_decode(const Waveform& waveform, const LinkConfig& config = {});

/// Uniformly sampled PD output voltage.
struct PdTrace {
  double t0_ms = 0.0;
  double dt_ms = 0.05;
  std::vector<double> volts;
};

/// Binarizes a PD trace through the comparator (starting low).
Waveform pd_samples_to_levels(const PdTrace& trace, const photo::Comparator& comparator);

/// Light path of a waveform to the PD: LED adds `led_suns` on top of
/// `ambient_suns`, transient-filtered at `dt_ms` resolution, with `tail_ms`
/// of idle line appended.
PdTrace illuminate(const Waveform& waveform, const photo::PhotodiodeModel& model,
                   double ambient_suns, double led_suns, double dt_ms = 0.05,
                   double tail_ms = 20.0);

/// Incremental receiver fed with comparator edges. It attempts a decode once
/// the line has been idle for `idle_ms` after activity.
class FrameReceiver {
 public:
  struct Result {
    std::optional<OpticalFrame> frame;
    std::string error;  ///< set when a decode was attempted and failed
    double end_ms = 0.0;
  };

  explicit FrameReceiver(LinkConfig config = {}, double idle_ms = 60.0)
      : config_(config), idle_ms_(idle_ms) {}

  /// Records the comparator level at time t (only changes matter).
  void sample(double t_ms, int level);
  /// Attempts a decode if the line has been idle long enough.
  std::optional<Result> poll(double now_ms);
  void clear();

 private:
  LinkConfig config_;
  double idle_ms_;
  int level_ = 0;
  std::vector<Waveform::Sample> edges_;
};

}  // namespace smartlet::optical
