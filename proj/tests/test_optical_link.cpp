#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>

#include "smartlet/errors.hpp"
#include "smartlet/optical_link.hpp"
#include "test_support.hpp"

using namespace smartlet;
using namespace smartlet::optical;

namespace {

OpticalFrame random_frame(std::mt19937_64& rng) {
  OpticalFrame f;
  f.command = static_cast<std::uint8_t>(rng());
  for (std::size_t i = 0; i < vm::kRunCommandBits; ++i) vm::set_bit_at(f.payload, i, rng() & 1);
  return f;
}

OpticalFrame load_frame(std::mt19937_64& rng) {
  OpticalFrame f;
  f.command = static_cast<std::uint8_t>(vm::Opcode::load);
  f.payload = vm::encode_run_command(test_support::random_program(rng));
  return f;
}

// Full light path: LED on 1 sun ambient -> PD transient -> comparator.
Waveform through_pd(const Waveform& w) {
  photo::PhotodiodeModel pd;
  return pd_samples_to_levels(illuminate(w, pd, 1.0, 5.0), photo::default_comparator(pd));
}

}  // namespace

TEST(Frame, HexIsSeventeenDigitsWithZeroPad) {
  OpticalFrame f;
  f.command = 0xff;
  for (std::size_t i = 0; i < vm::kRunCommandBits; ++i) vm::set_bit_at(f.payload, i, true);
  EXPECT_EQ(to_hex(f), "3ffffffffffffffff");
  EXPECT_EQ(frame_from_hex("3ffffffffffffffff"), f);
  EXPECT_THROW(frame_from_hex("7ffffffffffffffff"), InvalidParameter);
  EXPECT_THROW(frame_from_hex("3fff"), InvalidParameter);
  OpticalFrame run;
  run.command = 0x02;
  EXPECT_EQ(to_hex(run), "00800000000000000");

  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_frame(rng);
    EXPECT_EQ(frame_from_hex(to_hex(g)), g);
  }
}

TEST(Encode, SingleOneBitIsLowThenHigh) {
  OpticalFrame f;
  f.set_data_bit(0, true);
  const auto w = manchester_encode(f, 1.0);
  const double data0 = kPreambleHalfBits + kStartHalfBits;
  EXPECT_EQ(w.level_at(data0 + 0.5), 0);
  EXPECT_EQ(w.level_at(data0 + 1.5), 1);
  // Bit 1 is a zero: high then low.
  EXPECT_EQ(w.level_at(data0 + 2.5), 1);
  EXPECT_EQ(w.level_at(data0 + 3.5), 0);

  LinkConfig flipped{Convention::one_is_falling};
  const auto w2 = manchester_encode(f, 1.0, flipped);
  EXPECT_EQ(w2.level_at(data0 + 0.5), 1);
  EXPECT_EQ(manchester_decode(w2, flipped), f);
}

TEST(Encode, FrameLengthStructure) {
  OpticalFrame f;
  const auto w = manchester_encode(f, 5.0);
  EXPECT_EQ(kFrameHalfBits, 2 * (9 + 66));
  EXPECT_DOUBLE_EQ(w.duration_ms(), 150 * 5.0);
  for (std::size_t i = 0; i < kPreambleHalfBits; ++i) {
    EXPECT_EQ(w.level_at(5.0 * i + 2.5), i % 2 == 0 ? 1 : 0);
  }
  EXPECT_EQ(w.level_at(16 * 5.0 + 2.5), 0);
  EXPECT_EQ(w.level_at(17 * 5.0 + 2.5), 0);
  EXPECT_THROW(manchester_encode(f, 0.0), InvalidParameter);
  EXPECT_THROW(manchester_encode(f, -1.0), InvalidParameter);
}

TEST(Decode, CleanRoundTrip) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    const auto f = random_frame(rng);
    EXPECT_EQ(manchester_decode(manchester_encode(f, 5.0)), f);
  }
}

TEST(Decode, JitterRoundTrip) {
  std::mt19937_64 rng(22);
  Rng jitter(99);
  for (int i = 0; i < 1000; ++i) {
    const auto f = random_frame(rng);
    const auto w = jitter_edges(manchester_encode(f, 5.0), 0.15, jitter);
    EXPECT_EQ(manchester_decode(w), f);
  }
}

TEST(Decode, ToleratesTwentyPercentJitter) {
  std::mt19937_64 rng(23);
  Rng jitter(7);
  for (int i = 0; i < 300; ++i) {
    const auto f = random_frame(rng);
    EXPECT_EQ(manchester_decode(jitter_edges(manchester_encode(f, 2.0), 0.2, jitter)), f);
  }
}

TEST(Decode, EmptyAndNoiseInputs) {
  EXPECT_THROW(manchester_decode(Waveform{}), NoFrame);
  Waveform flat;
  flat.samples = {{0.0, 0}, {100.0, 0}};
  EXPECT_THROW(manchester_decode(flat), NoFrame);

  Rng rng(12345);
  int emitted = 0;
  for (int i = 0; i < 100000; ++i) {
    Waveform w;
    const int n = static_cast<int>(rng.next() % 200);
    // Shorter than a 5 ms preamble: 80 ms.
    std::vector<double> times;
    for (int k = 0; k < n; ++k) times.push_back(rng.uniform(0.0, 80.0));
    std::sort(times.begin(), times.end());
    int level = 0;
    w.samples.push_back({0.0, 0});
    for (double t : times) w.samples.push_back({t, level ^= 1});
    try {
      manchester_decode(w);
      ++emitted;
    } catch (const NoFrame&) {
    } catch (const FramingError&) {
    }
  }
  EXPECT_EQ(emitted, 0);
}

TEST(Decode, TruncatedFrameIsFramingError) {
  OpticalFrame f;
  f.command = 0x01;
  auto w = manchester_encode(f, 5.0);
  w.samples.resize(w.samples.size() / 2);
  try {
    manchester_decode(w);
    FAIL();
  } catch (const FramingError& e) {
    EXPECT_GT(e.bit_index(), 0u);
    EXPECT_LT(e.bit_index(), kFrameDataBits);
  }
}

TEST(Decode, FlippedPayloadBitDecodesButFailsParity) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    auto f = load_frame(rng);
    const auto bit = kCommandBits + rng() % vm::kRunCommandBits;
    f.set_data_bit(bit, !f.data_bit(bit));
    const auto got = manchester_decode(manchester_encode(f, 5.0));
    EXPECT_EQ(got, f);
    EXPECT_THROW(vm::decode_run_command(got.payload), RejectedProgram);
  }
}

TEST(Pipeline, DarkTraceIsConstantLow) {
  PdTrace dark;
  dark.volts.assign(1000, 0.0);
  photo::PhotodiodeModel pd;
  const auto w = pd_samples_to_levels(dark, photo::default_comparator(pd));
  for (const auto& s : w.samples) EXPECT_EQ(s.level, 0);
}

TEST(Pipeline, FiveMsHalfBitSurvivesPhotodetector) {
  std::mt19937_64 rng(41);
  Rng jitter(42);
  for (int i = 0; i < 100; ++i) {
    const auto f = load_frame(rng);
    const auto w = jitter_edges(manchester_encode(f, 5.0), 0.15, jitter);
    EXPECT_EQ(manchester_decode(through_pd(w)), f);
  }
}

TEST(Decode, LateFallingEdgesKeepPreamble) {
  // The PD releases slowly: every high stretches and every low shrinks.
  std::mt19937_64 rng(46);
  for (int i = 0; i < 20; ++i) {
    const auto f = load_frame(rng);
    auto w = manchester_encode(f, 5.0);
    for (auto& s : w.samples) {
      if (s.level == 0 && s.t_ms > 0) s.t_ms += 0.9;
    }
    EXPECT_EQ(manchester_decode(w), f);
  }
}

TEST(Pipeline, OneMsHalfBitFails) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 20; ++i) {
    const auto f = load_frame(rng);
    const auto w = through_pd(manchester_encode(f, 1.0));
    bool failed = false;
    try {
      failed = manchester_decode(w) != f;
    } catch (const NoFrame&) {
      failed = true;
    } catch (const FramingError&) {
      failed = true;
    }
    EXPECT_TRUE(failed);
  }
}

TEST(Pipeline, MinimumUsableHalfBitExceedsFallTime) {
  std::mt19937_64 rng(44);
  Rng jitter(45);
  std::vector<OpticalFrame> frames;
  for (int i = 0; i < 30; ++i) frames.push_back(load_frame(rng));
  double minimum = 0;
  for (double h = 0.5; h <= 6.0; h += 0.25) {
    bool all = true;
    for (const auto& f : frames) {
      try {
        all = all && manchester_decode(through_pd(jitter_edges(manchester_encode(f, h), 0.15, jitter))) == f;
      } catch (const Error&) {
        all = false;
      }
      if (!all) break;
    }
    if (all) {
      minimum = h;
      break;
    }
  }
  std::printf("minimum usable half-bit with 15%% jitter: %.2f ms\n", minimum);
  EXPECT_GT(minimum, photo::kFall9010Us / 1000.0);
  EXPECT_LE(minimum, 5.0);
}

TEST(Waveform, TextRoundTrip) {
  std::mt19937_64 rng(51);
  Rng jitter(52);
  const auto w = jitter_edges(manchester_encode(random_frame(rng), 5.0), 0.1, jitter);
  std::istringstream in(to_text(w));
  const auto back = waveform_from_text(in);
  EXPECT_EQ(back.samples, w.samples);
  EXPECT_DOUBLE_EQ(back.half_bit_ms, 5.0);
  std::istringstream bad("0 0\n1 2\n");
  EXPECT_THROW(waveform_from_text(bad), ParseError);
}

TEST(Receiver, DecodesAfterIdleAndIgnoresIsolatedEdges) {
  std::mt19937_64 rng(61);
  const auto f = load_frame(rng);
  const auto w = manchester_encode(f, 5.0);
  FrameReceiver rx;
  const double start = 100.0;
  std::optional<FrameReceiver::Result> got;
  for (int t = 0; t < 1200 && !got; ++t) {
    rx.sample(t, t >= start ? w.level_at(t - start) : 0);
    got = rx.poll(t);
  }
  ASSERT_TRUE(got);
  ASSERT_TRUE(got->frame) << got->error;
  EXPECT_EQ(*got->frame, f);

  FrameReceiver zone;
  zone.sample(10, 1);
  EXPECT_FALSE(zone.poll(50));
  EXPECT_FALSE(zone.poll(200));
}
