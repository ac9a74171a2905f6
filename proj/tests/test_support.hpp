#pragma once

#include <random>

#include "smartlet/lablet_vm.hpp"

namespace smartlet::test_support {

inline vm::LabletProgram random_program(std::mt19937_64& rng) {
  auto pick = [&](unsigned n) { return static_cast<std::uint8_t>(rng() % n); };
  vm::LabletProgram p;
  for (auto& ph : p.phases) {
    ph.act_mask = pick(8);
    ph.period_code = pick(16);
    ph.duty_code = pick(8);
    ph.timeout_code = pick(16);
  }
  p.sensor_condition = static_cast<vm::SensorCondition>(pick(8));
  p.transition_mode = static_cast<vm::TransitionMode>(pick(4));
  p.debounce_ticks = pick(8);
  p.reserved = pick(16);
  return vm::with_parity(p);
}

}  // namespace smartlet::test_support
