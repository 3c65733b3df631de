#include "fecim/sensing.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "fecim/error.hpp"

namespace fecim {

std::vector<std::string> AdcConfig::diagnostics() const {
  std::vector<std::string> out;
  if (resolution_bits < 1 || resolution_bits > 24) out.push_back("resolution_bits must be in [1, 24]");
  if (!(v_ref_high > v_ref_low)) out.push_back("v_ref_high must exceed v_ref_low");
  if (mux_ratio < 1) out.push_back("mux_ratio must be >= 1");
  return out;
}

void AdcConfig::validate() const { throw_if_invalid(diagnostics()); }

AdcConfig ramp_aligned_adc(const ArrayConfig& config, int resolution_bits, std::size_t mux_ratio) {
  AdcConfig adc{resolution_bits, config.delta_offset, config.delta_offset + config.full_scale(), mux_ratio};
  adc.validate();
  return adc;
}

int covering_resolution(std::size_t n) {
  int bits = 1;
  while ((std::size_t{1} << bits) < n + 1) ++bits;
  return bits;
}

int quantize(double v_bl, const AdcConfig& adc) {
  const double x = std::floor((v_bl - adc.v_ref_low) / adc.lsb() + 0.5);
  if (!(x > 0.0)) return 0;
  return x >= adc.max_code() ? adc.max_code() : static_cast<int>(x);
}

AdcConfig counting_adc(const ArrayConfig& config, std::size_t mux_ratio) {
  const int bits = covering_resolution(config.n_rows);
  const double span = config.unit_step() * static_cast<double>(std::size_t{1} << bits);
  AdcConfig adc{bits, config.delta_offset, config.delta_offset + span, mux_ratio};
  adc.validate();
  return adc;
}

double code_to_count(int code, const AdcConfig& adc, const ArrayConfig& config) {
  return static_cast<double>(code) * adc.lsb() / config.unit_step();
}

Moments moments(const std::vector<double>& samples) {
  Moments m;
  m.count = samples.size();
  if (samples.empty()) return m;
  const double pivot = samples.front();
  double sum = 0.0;
  for (double x : samples) sum += x - pivot;
  const double mean_shift = sum / static_cast<double>(m.count);
  m.mean = pivot + mean_shift;
  if (m.count < 2) return m;
  double ss = 0.0;
  for (double x : samples) {
    const double d = (x - pivot) - mean_shift;
    ss += d * d;
  }
  m.std = std::sqrt(ss / static_cast<double>(m.count - 1));
  return m;
}

MarginReport sense_margin(const std::map<int, std::vector<double>>& populations, double k_sigma,
                          std::size_t min_samples) {
  MarginReport report;
  report.k_sigma = k_sigma;
  for (auto it = populations.begin(); it != populations.end(); ++it) {
    auto next = std::next(it);
    if (next == populations.end() || next->first != it->first + 1) continue;
    if (it->second.size() < min_samples || next->second.size() < min_samples)
      throw InsufficientSamplesError(fmt::format("sense_margin: codes {} and {} need >= {} samples each",
                                                 it->first, next->first, min_samples));
    const Moments lo = moments(it->second);
    const Moments hi = moments(next->second);
    MarginRow row{it->first, hi.mean - lo.mean, lo.std, hi.std, 0.0};
    row.margin = row.gap - k_sigma * (row.sigma_low + row.sigma_high);
    report.rows.push_back(row);
  }
  if (report.rows.empty())
    throw InsufficientSamplesError("sense_margin: need at least two adjacent code populations");
  for (std::size_t i = 0; i < report.rows.size(); ++i)
    if (report.rows[i].margin < report.rows[report.worst_row].margin) report.worst_row = i;
  report.margin = report.rows[report.worst_row].margin;
  return report;
}

}  // namespace fecim
