#pragma once

// Analytical energy / latency model for charge-domain arrays.
//
//   v_work(n)  = v_work0 * max(1, n / n_knee)
//   E_col(n)   = alpha * n * C_M * v_work(n)^2   (+ read current for current-domain designs)
//   t_step(n)  = t_step0 * v_work(n) / v_work0
//   energy     = m * E_col(n) [+ m * e_adc]
//   latency    = steps * t_step(n) [+ ceil(m / mux) * t_adc]

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fecim/allocation.hpp"

namespace fecim::cost {

enum class Mode { Mac2Step, Cam3Step };

std::size_t step_count(Mode mode) noexcept;
std::string to_string(Mode mode);

/// Published GPU comparison points, kept for context only.
struct ReferenceRatios {
  double gpu_speedup_resnet18 = 2.5;
  double gpu_speedup_resnet34 = 4.0;
  double gpu_energy_ratio_resnet18 = 5000.0;
  double gpu_energy_ratio_resnet34 = 4000.0;
};

struct CostParams {
  double v_work0 = 0.5;            // V
  std::size_t n_knee = 64;
  double c_m = 1e-15;              // F
  double alpha = 1.0;              // charging efficiency
  double e_adc = 2e-13;            // J per conversion
  double t_step = 1e-9;            // s per schedule step at v_work0
  double t_adc = 4e-9;             // s per conversion
  std::size_t adc_mux_ratio = 8;
  Domain domain = Domain::Charge;
  double g0 = 1e-5;                // A/V, current-domain cells
  double v_overdrive = 0.5;        // V
  double v_read = 0.5;             // V across a conducting cell
  double activity = 0.5;           // conducting fraction in current-domain reads
  double e_shift_add = 5e-15;      // J per column per bit-cycle
  double t_shift_add = 0.5e-9;     // s per bit-cycle
  ReferenceRatios reference{};

  std::vector<std::string> diagnostics() const;
  void validate() const;
};

struct CostReport {
  double energy = 0.0;    // J
  double latency = 0.0;   // s
  double edp = 0.0;       // J s
  std::vector<std::pair<std::string, double>> energy_breakdown;
  std::vector<std::pair<std::string, double>> latency_breakdown;
  int adc_bits = 0;
};

double v_work_of(std::size_t n, const CostParams& params);
/// ceil(log2(n)), at least 1.
int adc_resolution_for(std::size_t n);

CostReport array_cost(std::size_t n, std::size_t m, Mode mode, bool include_adc, const CostParams& params);

struct Design {
  std::string name;
  double cell_area_f2 = 0.0;
  CostParams params{};
  Mode mode = Mode::Mac2Step;
};

/// Built-in comparison set: 1FeFET-1C plus charge-domain SRAM, RRAM, MRAM and a
/// current-domain FeFET array. Values are configuration, not measurements.
std::vector<Design> default_designs();
Design parse_design(const std::string& json_text);

struct EdpRow {
  std::size_t rank = 0;
  std::string name;
  double cell_area_f2 = 0.0;
  double energy = 0.0;
  double latency = 0.0;
  double edp = 0.0;
};

/// Evaluates every design on an n x m array (ADC excluded) and sorts by EDP.
std::vector<EdpRow> edp_compare(const std::vector<Design>& designs, std::size_t n = 64, std::size_t m = 64);

struct SystemCost {
  CostReport report;
  ReferenceRatios reference;
};

/// Slots run one after another; the ops inside a slot run in parallel.
SystemCost system_cost(const TileAllocation& alloc, const CostParams& params);

/// Cost of one op in a slot (all invocations and bit cycles).
CostReport op_cost(const TileAssignment& op, const ArrayConfig& array, const CostParams& params);

}  // namespace fecim::cost
