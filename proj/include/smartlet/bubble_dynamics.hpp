#pragma once

// Per-face electrolytic bubble inventory: nucleation under actuation,
// monolayer packing, coalescence past a critical density, Laplace pressure,
// and release through the bottom gap when the cube tilts.
//
// A face's bubbles are tracked as a count plus a shared mean radius, so gas
// volume is count * 4/3 pi r^3.

#include <cmath>
#include <cstdint>
#include <vector>

#include "smartlet/rng.hpp"

namespace smartlet::bubbles {

inline constexpr double kWaterSurfaceTension = 0.07275;  // N/m
inline constexpr double kHexPacking = M_PI / (2.0 * std::sqrt(3.0));

struct BubbleParams {
  double surface_tension = kWaterSurfaceTension;
  double r_nucleation_um = 25.0;
  double r_grown_um = 75.0;
  double r_max_um = 150.0;
  double growth_um_per_ms = 1.0;
  double face_edge_mm = 1.0;
  double packing_limit = kHexPacking;
  double critical_fraction = 0.85;  ///< of packing_limit
  double fill_time_ms = 200.0;      ///< continuous actuation to pack a face
  double rate_jitter = 0.10;        ///< uniform relative jitter on k_nuc
  double linger_ms = 500.0;

  double face_area_um2() const { return face_edge_mm * face_edge_mm * 1e6; }
  double critical_density() const { return critical_fraction * packing_limit; }
  /// Bubbles per ms that pack a face with grown bubbles in fill_time_ms.
  double k_nuc_per_ms() const;
  /// Rows of grown bubbles that fit along a face edge.
  int rows(double radius_um) const;
};

/// Laplace pressure 2T/r in mbar. Throws InvalidParameter if r <= 0.
double laplace_pressure_mbar(double radius_um, double surface_tension = kWaterSurfaceTension);

/// Buoyancy of `count` bubbles of radius r in water, in uN.
double monolayer_buoyancy_uN(int count, double radius_um, double rho = 1000.0, double g = 9.8);

/// Bubbles that have left the cube and drift on the film until they expire.
struct ReleasedBatch {
  int count = 0;
  double radius_um = 0.0;
  double expires_ms = 0.0;
};

struct FaceInventory {
  int count = 0;
  double mean_radius_um = 0.0;
  /// Fractional bubbles carried between ticks.
  double nucleation_credit = 0.0;
  /// Residual bubbles pinned by local dewetting after actuation stops.
  bool anchored = false;

  double fill_fraction(const BubbleParams& p) const;
  double gas_volume_um3() const {
    return count * 4.0 / 3.0 * M_PI * std::pow(mean_radius_um, 3);
  }
  double pressure_mbar(const BubbleParams& p) const {
    return count > 0 ? laplace_pressure_mbar(mean_radius_um, p.surface_tension) : 0.0;
  }
  friend bool operator==(const FaceInventory&, const FaceInventory&) = default;
};

/// One tick of electrolysis. No change when `act_high` is false. Returns the
/// number of bubbles nucleated.
int nucleate(FaceInventory& face, bool act_high, double dt_ms, const BubbleParams& p, Rng& rng);

/// Pairwise merge of the whole population: n -> ceil(n/2) at constant gas
/// volume. Returns false (no change) if the merged radius would exceed
/// r_max or fewer than two bubbles exist.
bool merge_once(FaceInventory& face, const BubbleParams& p);

/// Merges once if fill fraction exceeds the critical density.
bool coalesce(FaceInventory& face, const BubbleParams& p);

/// Merges until a single bubble remains (or r_max blocks it).
void coalesce_fully(FaceInventory& face, const BubbleParams& p);

struct ReleaseResult {
  int released = 0;
  double released_volume_um3 = 0.0;
};

/// With the gap open, the lowest row (1/rows of the inventory, rounded up)
/// leaves the cube.
ReleaseResult release(FaceInventory& face, bool gap_open, const BubbleParams& p);

}  // namespace smartlet::bubbles
