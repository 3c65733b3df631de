#pragma once

// Stochastic 1FeFET-1C cell model: threshold voltage, storage capacitor and
// the ideal switch / source-follower pass behaviour of the access FeFET.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fecim/rng.hpp"

namespace fecim {

struct DeviceParams {
  double vth_lvt_mean = 0.3;   // V, stored '1'
  double vth_hvt_mean = 1.3;   // V, stored '0'
  double sigma_vth = 0.0;      // V
  double c_m_mean = 1e-15;     // F
  double sigma_cm_rel = 0.0;   // fraction of c_m_mean
  double on_off_ratio = 1e6;   // informational; the switch is ideal

  double memory_window() const noexcept { return vth_hvt_mean - vth_lvt_mean; }
  double state_mean(std::uint8_t bit) const noexcept {
    return bit ? vth_lvt_mean : vth_hvt_mean;
  }

  std::vector<std::string> diagnostics() const;
  void validate() const;
  bool valid() const noexcept;
};

/// Three gate levels used by the CAM and MAC schedules.
struct WordlineLevels {
  double v_wl0 = 0.0;
  double v_wl1 = 1.0;
  double v_wl2 = 2.0;

  /// Checks v_wl0 < vth_lvt < v_wl1 < vth_hvt < v_wl2.
  std::vector<std::string> diagnostics(const DeviceParams& device) const;
};

struct FeFetCell {
  std::uint8_t stored_bit = 0;  // 1 = LVT, 0 = HVT
  double vth_sampled = 0.0;
  double c_m_sampled = 0.0;

  bool operator==(const FeFetCell&) const = default;
};

enum class SwitchState { Off, On };

/// Capacitance samples at or below this fraction of the mean are redrawn.
inline constexpr double kCapTruncation = 0.1;

/// Draws one cell. Consumes exactly one normal for Vth followed by one normal
/// per capacitance attempt, so equal seeds with different sigmas give paired
/// samples (vth = mean + sigma * z with the same z).
FeFetCell sample_cell(const DeviceParams& params, std::uint8_t bit, RandomStream& rng);

/// On iff v_wl > vth_sampled. Ties are Off.
inline SwitchState switch_state(const FeFetCell& cell, double v_wl) noexcept {
  return v_wl > cell.vth_sampled ? SwitchState::On : SwitchState::Off;
}

/// Voltage a conducting cell passes from a driven bit line onto its capacitor:
/// min(v_drive, max(0, v_wl - vth)). Zero when the cell is off.
double pass_voltage(const FeFetCell& cell, double v_wl, double v_drive) noexcept;

/// Parses `key = value` lines (`#` comments) or a JSON object. Unknown keys are
/// rejected. Values may carry a unit suffix (mV, V, fF, F, %).
DeviceParams parse_device_params(std::string_view text);
DeviceParams load_device_params(const std::filesystem::path& path);

/// Parses "170mV", "0.17", "1fF", "5%" and similar into SI base units.
double parse_quantity(std::string_view text);

}  // namespace fecim
