// smartlet: headless simulator front end.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "smartlet/errors.hpp"
#include "smartlet/event_log.hpp"
#include "smartlet/optical_link.hpp"
#include "smartlet/program_text.hpp"
#include "smartlet/protocol.hpp"
#include "smartlet/scenario.hpp"
#include "smartlet/server.hpp"
#include "smartlet/summary.hpp"
#include "smartlet/world.hpp"

using namespace smartlet;

namespace {

// "path:line:col: ", or "path: " when the error has no position.
std::string where(const std::string& path, const ParseError& e) {
  if (e.line() <= 0) return path + ": ";
  return path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": ";
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void setup_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("SMARTLET_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(lvl));
  }
  spdlog::set_pattern("[%H:%M:%S.%e] [%l] %v");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"smartlet microrobot simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario headlessly");
  std::string scenario_path, out_path, summary_path;
  std::int64_t ticks = -1;
  std::optional<std::uint64_t> seed;
  run->add_option("--scenario", scenario_path, "Scenario YAML")->required();
  run->add_option("--ticks", ticks, "Ticks to simulate (default: scenario)");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_path, "Event log output (default stdout)");
  run->add_option("--summary", summary_path, "Summary JSON output");

  auto* assemble = app.add_subcommand("assemble", "Program text to 58-bit string");
  std::string in_path, asm_out;
  assemble->add_option("--in", in_path, "Program text ('-' for stdin)")->required();
  assemble->add_option("--out", asm_out, "Output (default stdout)");

  auto* disassemble = app.add_subcommand("disassemble", "58-bit string to program text");
  std::string dis_in, dis_out;
  disassemble->add_option("--in", dis_in, "Bit string file ('-' for stdin)")->required();
  disassemble->add_option("--out", dis_out, "Output (default stdout)");

  auto* verify = app.add_subcommand("verify", "Compare an event log with a golden log");
  std::string log_path, golden_path;
  verify->add_option("--log", log_path)->required();
  verify->add_option("--golden", golden_path)->required();

  auto* encode = app.add_subcommand("encode-frame", "Encode an optical frame");
  std::string cmd_hex, payload_bits, wave_out;
  double half_bit_ms = 5.0;
  encode->add_option("--command", cmd_hex, "Command byte, hex (01 LOAD, 02 RUN, ...)")->required();
  encode->add_option("--payload", payload_bits, "58-bit payload string (default zeros)");
  encode->add_option("--half-bit-ms", half_bit_ms, "Half-bit period for --waveform");
  encode->add_option("--waveform", wave_out, "Write the Manchester waveform here");

  auto* serve = app.add_subcommand("serve", "Run the session service");
  std::string bind = "127.0.0.1:8765";
  double snapshot_rate = 30.0;
  serve->add_option("--bind", bind, "HOST:PORT");
  serve->add_option("--snapshot-rate", snapshot_rate, "Snapshots per simulated second");

  auto* replay = app.add_subcommand("replay", "Replay a recorded session headlessly");
  std::string rec_path, replay_out;
  replay->add_option("--recording", rec_path, "Recording JSON")->required();
  replay->add_option("--out", replay_out, "Event log output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      world::Scenario sc;
      try {
        sc = world::load_scenario(scenario_path);
      } catch (const ParseError& e) {
        std::cerr << where(scenario_path, e) << e.what() << "\n";
        return 2;
      }
      if (seed) sc.seed = *seed;
      const std::int64_t n = ticks < 0 ? sc.ticks : ticks;
      spdlog::info("running {} for {} ticks (seed {})", sc.name, n, sc.seed);
      const auto t0 = std::chrono::steady_clock::now();
      log::EventLog log;
      try {
        log = world::run_scenario(sc, n);
      } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
      }
      const double wall =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      write_file(out_path, log.render(n, wall));
      if (!summary_path.empty()) {
        write_file(summary_path,
                   summary::to_json(summary::summarize(log.events(), n, sc.name, wall)));
      }
      spdlog::info("{} records in {:.1f} ms", log.events().size(), wall);
      return 0;
    }
    if (*assemble) {
      try {
        write_file(asm_out, vm::to_bit_string(vm::assemble(read_file(in_path))) + "\n");
      } catch (const ParseError& e) {
        std::cerr << where(in_path, e) << e.what() << "\n";
        return 2;
      }
      return 0;
    }
    if (*disassemble) {
      auto text = read_file(dis_in);
      while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
      write_file(dis_out, vm::disassemble(vm::parse_bit_string(text)));
      return 0;
    }
    if (*verify) {
      const auto r = log::verify(read_file(log_path), read_file(golden_path));
      if (r.pass) {
        std::cout << "PASS\n";
        return 0;
      }
      std::cout << "FAIL at line " << r.line << "\n  log:    " << r.log_line
                << "\n  golden: " << r.golden_line << "\n";
      return 1;
    }
    if (*encode) {
      optical::OpticalFrame f;
      const auto c = std::stoul(cmd_hex, nullptr, 16);
      if (c > 0xff) throw InvalidParameter("command must fit in one byte");
      f.command = static_cast<std::uint8_t>(c);
      if (!payload_bits.empty()) f.payload = vm::parse_bit_string(payload_bits);
      std::cout << optical::to_hex(f) << "\n";
      if (!wave_out.empty()) write_file(wave_out, optical::to_text(optical::manchester_encode(f, half_bit_ms)));
      return 0;
    }
    if (*serve) return server::serve(bind, snapshot_rate);
    if (*replay) {
      write_file(replay_out, proto::replay(proto::recording_from_json(
                                 nlohmann::json::parse(read_file(rec_path)))));
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << where("parse error", e) << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
