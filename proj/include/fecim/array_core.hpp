#pragma once

// N x M 1FeFET-1C array with settled-state CAM (3-step) and MAC (2-step)
// schedules, plus a current-domain baseline over the same sampled devices.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fecim/device_model.hpp"

namespace fecim {

using BitVector = std::vector<std::uint8_t>;

/// Which summation physics a readout uses.
enum class Domain { Charge, Current };

std::string to_string(Domain d);
/// Accepts "charge" or "current".
Domain parse_domain(const std::string& text);

/// Row-major bit matrix. Entries are 0 or 1.
class BitGrid {
 public:
  BitGrid() = default;
  BitGrid(std::size_t rows, std::size_t cols, std::uint8_t fill = 0)
      : rows_(rows), cols_(cols), bits_(rows * cols, fill ? 1 : 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint8_t operator()(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, std::uint8_t v) { bits_[r * cols_ + c] = v ? 1 : 0; }
  BitVector column(std::size_t c) const;

  bool operator==(const BitGrid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  BitVector bits_;
};

struct ArrayConfig {
  std::size_t n_rows = 64;
  std::size_t m_cols = 8;
  double c_para = 5e-15;        // F per column
  double v_work = 0.5;          // V
  WordlineLevels wl_levels{};
  DeviceParams device{};
  double delta_offset = 0.02;   // V, remnant charge / injection offset
  double v_read = 0.8;          // V, current-domain read gate
  double g0 = 1e-5;             // A/V, current-domain overdrive transconductance

  std::vector<std::string> diagnostics() const;
  void validate() const;

  /// v_work * C_M / (N * C_M + C_para): the ideal bit-line step per charged cell.
  double unit_step() const noexcept;
  /// Ideal swing at N charged cells, excluding the offset.
  double full_scale() const noexcept { return unit_step() * static_cast<double>(n_rows); }
  /// Nominal current of one conducting LVT cell.
  double unit_current() const noexcept;

  /// A configuration whose wordline levels clear the Vth tails by more than
  /// 8 sigma at sigma_vth = 170 mV (3.3 V window), for robustness studies where
  /// the switch must never mis-fire.
  static ArrayConfig wide_window();
};

struct AnalogReadout {
  std::vector<double> v_bl;                 // per column
  std::size_t step_count = 0;
  std::vector<std::size_t> charged_cells;   // per column
};

/// sum(v_i * C_i) / (sum(C_i) + c_para).
double charge_share(std::span<const double> cap_voltages, std::span<const double> caps, double c_para);

class CimArray {
 public:
  static CimArray build(const ArrayConfig& config, const BitGrid& weights, std::uint64_t seed);
  /// Draws the cells from an existing stream (row-major).
  static CimArray build(const ArrayConfig& config, const BitGrid& weights, RandomStream& rng);
  /// Builds from explicitly supplied cells (row-major, n_rows * m_cols).
  static CimArray from_cells(const ArrayConfig& config, std::vector<FeFetCell> cells);

  const ArrayConfig& config() const noexcept { return config_; }
  std::size_t rows() const noexcept { return config_.n_rows; }
  std::size_t cols() const noexcept { return config_.m_cols; }

  const FeFetCell& cell(std::size_t r, std::size_t c) const { return cells_[r * cols() + c]; }
  void set_cell(std::size_t r, std::size_t c, const FeFetCell& cell) { cells_[r * cols() + c] = cell; }
  double cap_voltage(std::size_t r, std::size_t c) const { return cap_voltage_[r * cols() + c]; }
  bool is_reset() const noexcept { return !dirty_; }

  /// Grounds the bit lines with every wordline open: all capacitors to 0 V.
  void reset() noexcept;

  /// Step 1 charge (BL = v_work, WL = v_wl1 / v_wl2 for query 1 / 0), step 2
  /// discharge (BL = 0, WL = v_wl0 / v_wl1), step 3 share at v_wl2.
  AnalogReadout cam_search(std::span<const std::uint8_t> query);

  /// Step 1 charge (BL = v_work, WL = v_wl1 / v_wl0 for input 1 / 0), step 2
  /// share at v_wl2.
  AnalogReadout mac(std::span<const std::uint8_t> input);

  /// I[j] = sum_i input_i * stored_ij * g0 * max(0, v_read - vth_ij).
  std::vector<double> current_domain_mac(std::span<const std::uint8_t> input) const;

  /// Current-domain associative search: every matching cell conducts with its
  /// own overdrive g0 * max(0, v_read - lvt_mean - (vth - state_mean)), i.e.
  /// HVT cells are read with a gate raised by the memory window.
  std::vector<double> current_domain_cam(std::span<const std::uint8_t> query) const;

 private:
  CimArray(ArrayConfig config, std::vector<FeFetCell> cells);

  void check_ready(std::span<const std::uint8_t> bits, const char* op) const;
  /// Drives every conducting cell of row r at gate v_wl from a bit line held at v_bl.
  void drive_row(std::size_t r, double v_wl, double v_bl);
  AnalogReadout share_all(std::size_t steps);

  ArrayConfig config_;
  std::vector<FeFetCell> cells_;
  std::vector<double> cap_voltage_;
  bool dirty_ = false;
};

}  // namespace fecim
