#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fecim/array_core.hpp"

namespace fecim {

struct AdcConfig {
  int resolution_bits = 6;
  double v_ref_low = 0.0;
  double v_ref_high = 1.0;
  std::size_t mux_ratio = 1;

  double lsb() const noexcept { return (v_ref_high - v_ref_low) / static_cast<double>(1u << resolution_bits); }
  int max_code() const noexcept { return (1 << resolution_bits) - 1; }

  std::vector<std::string> diagnostics() const;
  void validate() const;
};

/// ADC whose references span the ideal output ramp: v_ref_low = delta,
/// v_ref_high = delta + full scale, so code k sits on k charged cells when
/// 2^bits == n_rows.
AdcConfig ramp_aligned_adc(const ArrayConfig& config, int resolution_bits, std::size_t mux_ratio = 1);

/// Smallest resolution whose code range covers 0..n inclusive.
int covering_resolution(std::size_t n);

/// Smallest ramp-aligned ADC with one code per unit step that reads every
/// count 0..n_rows without saturating.
AdcConfig counting_adc(const ArrayConfig& config, std::size_t mux_ratio = 1);

/// Mid-tread quantizer: clamp(floor((v - v_ref_low) / lsb + 1/2), 0, 2^bits - 1).
int quantize(double v_bl, const AdcConfig& adc);

/// Charged-cell count represented by `code` on a ramp-aligned ADC over an
/// n-row column.
double code_to_count(int code, const AdcConfig& adc, const ArrayConfig& config);

struct MarginRow {
  int code_low = 0;
  double gap = 0.0;
  double sigma_low = 0.0;
  double sigma_high = 0.0;
  double margin = 0.0;
};

struct MarginReport {
  std::vector<MarginRow> rows;
  double margin = 0.0;          // min over rows
  std::size_t worst_row = 0;
  double k_sigma = 3.0;
};

/// For every pair of adjacent codes present in `populations`:
/// margin = (mean_{k+1} - mean_k) - k_sigma * (sigma_k + sigma_{k+1}).
/// Needs at least two adjacent codes with `min_samples` samples each.
MarginReport sense_margin(const std::map<int, std::vector<double>>& populations, double k_sigma = 3.0,
                          std::size_t min_samples = 100);

/// Mean and sample standard deviation. The deviations are taken about the
/// first sample, so a constant population yields exactly zero spread.
struct Moments {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};
Moments moments(const std::vector<double>& samples);

}  // namespace fecim
