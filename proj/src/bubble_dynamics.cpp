#include "smartlet/bubble_dynamics.hpp"

#include <algorithm>

#include "smartlet/errors.hpp"

namespace smartlet::bubbles {

double BubbleParams::k_nuc_per_ms() const {
  const double per_bubble = M_PI * r_grown_um * r_grown_um;
  return packing_limit * face_area_um2() / per_bubble / fill_time_ms;
}

int BubbleParams::rows(double radius_um) const {
  if (radius_um <= 0) radius_um = r_grown_um;
  return std::max(1, static_cast<int>(std::floor(face_edge_mm * 1000.0 / (2.0 * radius_um))));
}

double laplace_pressure_mbar(double radius_um, double surface_tension) {
  if (!(radius_um > 0)) throw InvalidParameter("bubble radius must be > 0");
  return 2.0 * surface_tension / (radius_um * 1e-6) / 100.0;
}

double monolayer_buoyancy_uN(int count, double radius_um, double rho, double g) {
  const double r = radius_um * 1e-6;
  return count * rho * g * 4.0 / 3.0 * M_PI * r * r * r * 1e6;
}

double FaceInventory::fill_fraction(const BubbleParams& p) const {
  const double covered = count * M_PI * mean_radius_um * mean_radius_um;
  return std::min(covered / p.face_area_um2(), p.packing_limit);
}

int nucleate(FaceInventory& face, bool act_high, double dt_ms, const BubbleParams& p, Rng& rng) {
  if (!act_high) return 0;
  face.anchored = false;
  if (face.count == 0) face.mean_radius_um = p.r_nucleation_um;
  face.mean_radius_um = std::min(p.r_grown_um, face.mean_radius_um + p.growth_um_per_ms * dt_ms);

  const double jitter = 1.0 + rng.uniform(-p.rate_jitter, p.rate_jitter);
  face.nucleation_credit += p.k_nuc_per_ms() * jitter * dt_ms;
  int born = static_cast<int>(std::floor(face.nucleation_credit));
  // No room left in the monolayer: nucleation sites are covered.
  const double per_bubble = M_PI * face.mean_radius_um * face.mean_radius_um;
  const int capacity = static_cast<int>(std::floor(p.packing_limit * p.face_area_um2() / per_bubble));
  born = std::clamp(born, 0, std::max(0, capacity - face.count));
  face.nucleation_credit -= std::floor(face.nucleation_credit);
  face.count += born;
  return born;
}

bool merge_once(FaceInventory& face, const BubbleParams& p) {
  if (face.count < 2) return false;
  const int merged = (face.count + 1) / 2;
  const double r = face.mean_radius_um * std::cbrt(static_cast<double>(face.count) / merged);
  if (r > p.r_max_um) return false;
  face.mean_radius_um = r;
  face.count = merged;
  return true;
}

bool coalesce(FaceInventory& face, const BubbleParams& p) {
  const double covered = face.count * M_PI * face.mean_radius_um * face.mean_radius_um;
  if (covered / p.face_area_um2() <= p.critical_density()) return false;
  return merge_once(face, p);
}

void coalesce_fully(FaceInventory& face, const BubbleParams& p) {
  while (face.count > 1 && merge_once(face, p)) {
  }
}

ReleaseResult release(FaceInventory& face, bool gap_open, const BubbleParams& p) {
  ReleaseResult r;
  if (!gap_open || face.count == 0) return r;
  const int rows = p.rows(face.mean_radius_um);
  r.released = (face.count + rows - 1) / rows;
  r.released_volume_um3 = r.released * 4.0 / 3.0 * M_PI * std::pow(face.mean_radius_um, 3);
  face.count -= r.released;
  if (face.count == 0) face.mean_radius_um = 0.0;
  return r;
}

}  // namespace smartlet::bubbles
