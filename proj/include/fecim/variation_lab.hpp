#pragma once

// Monte-Carlo studies: transfer curves, worst-case activation, sense margin
// and associative-retrieval quality loss. Every trial draws its own seed from
// derive_seed(plan.seed, ...), so results never depend on evaluation order.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fecim/array_core.hpp"
#include "fecim/hdc.hpp"
#include "fecim/sensing.hpp"

namespace fecim::lab {

struct McPlan {
  std::size_t trials = 1000;
  std::vector<double> sigma_vth_list{0.030, 0.054, 0.110, 0.170};
  std::vector<double> sigma_cm_list{0.0};
  std::size_t n_rows = 64;
  std::vector<double> activation_grid{};
  std::uint64_t seed = 1;

  std::vector<std::string> diagnostics() const;
  void validate() const;
};

/// Activation fractions lo, lo + step, ..., hi (inclusive, rounded to the step).
std::vector<double> uniform_grid(double lo, double hi, double step);

struct CodePoint {
  std::size_t code = 0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t samples = 0;
};

struct TransferCurve {
  Domain domain = Domain::Charge;
  double sigma_vth = 0.0;
  double sigma_cm = 0.0;
  std::vector<CodePoint> points;   // codes 0..n_rows
};

/// Trial weights/inputs for a column with exactly `active` AND-ones: the active
/// rows hold (1,1); the others are drawn from (0,0), (0,1), (1,0).
void active_pattern(std::size_t n_rows, std::size_t active, RandomStream& rng, BitVector& weights,
                    BitVector& inputs);

/// One curve per (sigma_vth, sigma_cm) pair in plan order. Charge-domain points
/// record v_bl; current-domain points record I_bl normalized to unit_current().
/// Trial t of code k uses seed derive_seed(plan.seed, k, t) for every sigma,
/// so sweeps are paired.
std::vector<TransferCurve> run_transfer_curve(const McPlan& plan, const ArrayConfig& base, Domain domain);

struct ActivationPoint {
  double fraction = 0.0;
  std::size_t active_cells = 0;
  double mean = 0.0;
  double std = 0.0;
  double std_error = 0.0;   // sigma / sqrt(2 (n - 1))
};

struct ActivationProfile {
  double sigma_cm = 0.0;
  std::vector<ActivationPoint> points;
  std::size_t argmax = 0;
  double argmax_fraction() const { return points.at(argmax).fraction; }
};

/// Bit-line spread versus activation fraction for the capacitor-weighted sum
/// v_bl = v_work sum(v_i C_i) / (sum C_i + C_para), with round(p N) active
/// cells at random positions. Trials share random numbers across fractions.
std::vector<ActivationProfile> worst_case_activation(const McPlan& plan, const ArrayConfig& base);

/// Full MAC-schedule populations for the given codes under one (sigma_vth,
/// sigma_cm) pair, ready for sense_margin.
std::map<int, std::vector<double>> code_populations(const McPlan& plan, const ArrayConfig& base,
                                                    double sigma_vth, double sigma_cm,
                                                    const std::vector<int>& codes);

/// Estimates NoiseModel::rel_sigma from transfer-curve spread in count units.
hdc::NoiseModel calibrate_noise_model(const TransferCurve& curve, const ArrayConfig& config);

struct QualityRow {
  Domain domain = Domain::Charge;
  double sigma_vth = 0.0;
  std::size_t dim = 0;
  std::size_t probes = 0;
  double ideal_accuracy = 0.0;   // percent
  double noisy_accuracy = 0.0;   // percent
  double loss = 0.0;             // percentage points
};

struct QualityStudyParams {
  std::vector<std::size_t> dims{512, 1024, 2048};
  std::vector<Domain> domains{Domain::Charge, Domain::Current};
  hdc::LevelTaskParams task{};
  int adc_bits = 0;              // 0: counting_adc
};

/// Retrieval accuracy through the simulated arrays versus the exact Hamming
/// oracle on the same probes. plan.trials fresh arrays per (domain, sigma, dim);
/// each trial answers task.probes probes. sigma_cm is plan.sigma_cm_list[0].
std::vector<QualityRow> quality_loss_study(const McPlan& plan, const ArrayConfig& base,
                                           const QualityStudyParams& params);

}  // namespace fecim::lab
