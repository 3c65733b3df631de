#include "fecim/array_core.hpp"

#include <algorithm>
#include <utility>

#include <fmt/core.h>

#include "fecim/error.hpp"

namespace fecim {

std::string to_string(Domain d) { return d == Domain::Charge ? "charge" : "current"; }

Domain parse_domain(const std::string& text) {
  if (text == "charge") return Domain::Charge;
  if (text == "current") return Domain::Current;
  throw ParameterError({fmt::format("unknown domain '{}' (expected charge or current)", text)});
}

BitVector BitGrid::column(std::size_t c) const {
  BitVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<std::string> ArrayConfig::diagnostics() const {
  std::vector<std::string> out = device.diagnostics();
  if (n_rows < 1) out.push_back("n_rows must be >= 1");
  if (m_cols < 1) out.push_back("m_cols must be >= 1");
  if (!(c_para >= 0.0)) out.push_back("c_para must be >= 0");
  if (!(v_work > 0.0)) out.push_back(fmt::format("v_work must be > 0 (got {})", v_work));
  if (!(delta_offset >= 0.0)) out.push_back("delta_offset must be >= 0");
  if (!(g0 > 0.0)) out.push_back("g0 must be > 0");
  if (!(v_read > device.vth_lvt_mean))
    out.push_back("v_read must exceed vth_lvt_mean for a conducting current-domain cell");
  for (auto& d : wl_levels.diagnostics(device)) out.push_back(std::move(d));
  return out;
}

void ArrayConfig::validate() const { throw_if_invalid(diagnostics()); }

double ArrayConfig::unit_step() const noexcept {
  const double c = device.c_m_mean;
  return v_work * c / (static_cast<double>(n_rows) * c + c_para);
}

double ArrayConfig::unit_current() const noexcept { return g0 * (v_read - device.vth_lvt_mean); }

ArrayConfig ArrayConfig::wide_window() {
  ArrayConfig cfg;
  cfg.device.vth_lvt_mean = 0.3;
  cfg.device.vth_hvt_mean = 3.6;
  cfg.wl_levels = {-1.1, 2.2, 5.5};
  return cfg;
}

double charge_share(std::span<const double> cap_voltages, std::span<const double> caps, double c_para) {
  if (cap_voltages.size() != caps.size())
    throw DimensionError(fmt::format("charge_share: {} voltages vs {} capacitances", cap_voltages.size(),
                                     caps.size()));
  double charge = 0.0;
  double total = c_para;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (!(caps[i] > 0.0)) throw ParameterError({"charge_share: capacitances must be > 0"});
    charge += cap_voltages[i] * caps[i];
    total += caps[i];
  }
  return total > 0.0 ? charge / total : 0.0;
}

CimArray::CimArray(ArrayConfig config, std::vector<FeFetCell> cells)
    : config_(std::move(config)), cells_(std::move(cells)), cap_voltage_(cells_.size(), 0.0) {}

CimArray CimArray::build(const ArrayConfig& config, const BitGrid& weights, std::uint64_t seed) {
  RandomStream rng(seed);
  return build(config, weights, rng);
}

CimArray CimArray::build(const ArrayConfig& config, const BitGrid& weights, RandomStream& rng) {
  config.validate();
  if (weights.rows() != config.n_rows || weights.cols() != config.m_cols)
    throw DimensionError(fmt::format("weights are {}x{}, array is {}x{}", weights.rows(), weights.cols(),
                                     config.n_rows, config.m_cols));
  std::vector<FeFetCell> cells;
  cells.reserve(config.n_rows * config.m_cols);
  for (std::size_t r = 0; r < config.n_rows; ++r)
    for (std::size_t c = 0; c < config.m_cols; ++c) cells.push_back(sample_cell(config.device, weights(r, c), rng));
  return CimArray(config, std::move(cells));
}

CimArray CimArray::from_cells(const ArrayConfig& config, std::vector<FeFetCell> cells) {
  config.validate();
  if (cells.size() != config.n_rows * config.m_cols)
    throw DimensionError(fmt::format("expected {} cells, got {}", config.n_rows * config.m_cols, cells.size()));
  return CimArray(config, std::move(cells));
}

void CimArray::reset() noexcept {
  std::fill(cap_voltage_.begin(), cap_voltage_.end(), 0.0);
  dirty_ = false;
}

void CimArray::check_ready(std::span<const std::uint8_t> bits, const char* op) const {
  if (bits.size() != rows())
    throw DimensionError(fmt::format("{}: vector length {} != n_rows {}", op, bits.size(), rows()));
  if (dirty_) throw StateError(fmt::format("{}: array must be reset first", op));
}

void CimArray::drive_row(std::size_t r, double v_wl, double v_bl) {
  const std::size_t m = cols();
  for (std::size_t c = 0; c < m; ++c) {
    const FeFetCell& cell = cells_[r * m + c];
    if (switch_state(cell, v_wl) == SwitchState::Off) continue;
    double& v = cap_voltage_[r * m + c];
    // Above the line the cell discharges fully; below it charges up to the
    // source-follower limit.
    v = v > v_bl ? v_bl : std::max(v, pass_voltage(cell, v_wl, v_bl));
  }
}

AnalogReadout CimArray::share_all(std::size_t steps) {
  const std::size_t n = rows();
  const std::size_t m = cols();
  const double v_wl = config_.wl_levels.v_wl2;
  AnalogReadout out;
  out.step_count = steps;
  out.v_bl.resize(m);
  out.charged_cells.resize(m);

  std::vector<double> volts;
  std::vector<double> caps;
  volts.reserve(n);
  caps.reserve(n);
  for (std::size_t c = 0; c < m; ++c) {
    volts.clear();
    caps.clear();
    std::size_t charged = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t idx = r * m + c;
      if (cap_voltage_[idx] > 0.0) ++charged;
      if (switch_state(cells_[idx], v_wl) == SwitchState::Off) continue;
      volts.push_back(cap_voltage_[idx]);
      caps.push_back(cells_[idx].c_m_sampled);
    }
    // The line starts from ground, so C_para contributes capacitance only.
    const double shared = charge_share(volts, caps, config_.c_para);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t idx = r * m + c;
      if (switch_state(cells_[idx], v_wl) == SwitchState::On) cap_voltage_[idx] = shared;
    }
    out.v_bl[c] = std::clamp(shared + config_.delta_offset, 0.0, config_.v_work);
    out.charged_cells[c] = charged;
  }
  dirty_ = true;
  return out;
}

AnalogReadout CimArray::cam_search(std::span<const std::uint8_t> query) {
  check_ready(query, "cam_search");
  const auto& wl = config_.wl_levels;
  for (std::size_t r = 0; r < rows(); ++r) drive_row(r, query[r] ? wl.v_wl1 : wl.v_wl2, config_.v_work);
  for (std::size_t r = 0; r < rows(); ++r) drive_row(r, query[r] ? wl.v_wl0 : wl.v_wl1, 0.0);
  return share_all(3);
}

AnalogReadout CimArray::mac(std::span<const std::uint8_t> input) {
  check_ready(input, "mac");
  const auto& wl = config_.wl_levels;
  for (std::size_t r = 0; r < rows(); ++r) drive_row(r, input[r] ? wl.v_wl1 : wl.v_wl0, config_.v_work);
  return share_all(2);
}

std::vector<double> CimArray::current_domain_mac(std::span<const std::uint8_t> input) const {
  if (input.size() != rows())
    throw DimensionError(fmt::format("current_domain_mac: vector length {} != n_rows {}", input.size(), rows()));
  const std::size_t m = cols();
  std::vector<double> current(m, 0.0);
  for (std::size_t r = 0; r < rows(); ++r) {
    if (!input[r]) continue;
    for (std::size_t c = 0; c < m; ++c) {
      const FeFetCell& cell = cells_[r * m + c];
      if (!cell.stored_bit) continue;
      current[c] += config_.g0 * std::max(0.0, config_.v_read - cell.vth_sampled);
    }
  }
  return current;
}

std::vector<double> CimArray::current_domain_cam(std::span<const std::uint8_t> query) const {
  if (query.size() != rows())
    throw DimensionError(fmt::format("current_domain_cam: vector length {} != n_rows {}", query.size(), rows()));
  const std::size_t m = cols();
  const double overdrive = config_.v_read - config_.device.vth_lvt_mean;
  std::vector<double> current(m, 0.0);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      const FeFetCell& cell = cells_[r * m + c];
      if ((query[r] ? 1 : 0) != cell.stored_bit) continue;
      const double shift = cell.vth_sampled - config_.device.state_mean(cell.stored_bit);
      current[c] += config_.g0 * std::max(0.0, overdrive - shift);
    }
  }
  return current;
}

}  // namespace fecim
