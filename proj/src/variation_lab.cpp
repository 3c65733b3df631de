#include "fecim/variation_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "fecim/error.hpp"

namespace fecim::lab {
namespace {

// Stream tags keep the derived seeds of different studies apart.
constexpr std::uint64_t kTransferTag = 0x7472616e73666572ULL;
constexpr std::uint64_t kActivationTag = 0x6163746976617465ULL;
constexpr std::uint64_t kQualityTag = 0x7175616c69747921ULL;

ArrayConfig column_config(const ArrayConfig& base, std::size_t n_rows, double sigma_vth, double sigma_cm) {
  ArrayConfig cfg = base;
  cfg.n_rows = n_rows;
  cfg.m_cols = 1;
  cfg.device.sigma_vth = sigma_vth;
  cfg.device.sigma_cm_rel = sigma_cm;
  cfg.validate();
  return cfg;
}

/// One single-column trial with exactly `active` AND-ones.
double column_trial(const ArrayConfig& cfg, Domain domain, std::size_t active, std::uint64_t seed) {
  RandomStream rng(seed);
  BitVector weights;
  BitVector inputs;
  active_pattern(cfg.n_rows, active, rng, weights, inputs);
  BitGrid grid(cfg.n_rows, 1);
  for (std::size_t r = 0; r < cfg.n_rows; ++r) grid.set(r, 0, weights[r]);
  CimArray array = CimArray::build(cfg, grid, rng);
  if (domain == Domain::Charge) return array.mac(inputs).v_bl[0];
  return array.current_domain_mac(inputs)[0] / cfg.unit_current();
}

}  // namespace

std::vector<std::string> McPlan::diagnostics() const {
  std::vector<std::string> out;
  if (trials < 1) out.push_back("trials must be >= 1");
  if (n_rows < 1) out.push_back("n_rows must be >= 1");
  for (double s : sigma_vth_list)
    if (!(s >= 0.0)) out.push_back(fmt::format("sigma_vth {} must be >= 0", s));
  for (double s : sigma_cm_list)
    if (!(s >= 0.0 && s <= 1.0)) out.push_back(fmt::format("sigma_cm {} must be in [0, 1]", s));
  for (double p : activation_grid)
    if (!(p >= 0.0 && p <= 1.0)) out.push_back(fmt::format("activation fraction {} must be in [0, 1]", p));
  return out;
}

void McPlan::validate() const { throw_if_invalid(diagnostics()); }

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ParameterError({"uniform_grid: need step > 0 and hi >= lo"});
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(std::round((lo + step * static_cast<double>(i)) * 1e9) / 1e9);
  return grid;
}

void active_pattern(std::size_t n_rows, std::size_t active, RandomStream& rng, BitVector& weights,
                    BitVector& inputs) {
  if (active > n_rows) throw ParameterError({fmt::format("active {} exceeds n_rows {}", active, n_rows)});
  std::vector<std::size_t> rows(n_rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (std::size_t i = 0; i < active; ++i) std::swap(rows[i], rows[i + rng.below(n_rows - i)]);
  weights.assign(n_rows, 0);
  inputs.assign(n_rows, 0);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const std::size_t r = rows[i];
    if (i < active) {
      weights[r] = inputs[r] = 1;
      continue;
    }
    switch (rng.below(3)) {
      case 0: break;
      case 1: inputs[r] = 1; break;
      default: weights[r] = 1; break;
    }
  }
}

std::vector<TransferCurve> run_transfer_curve(const McPlan& plan, const ArrayConfig& base, Domain domain) {
  plan.validate();
  if (plan.sigma_vth_list.empty() || plan.sigma_cm_list.empty())
    throw ParameterError({"run_transfer_curve: sigma lists must be non-empty"});
  std::vector<TransferCurve> curves;
  std::vector<double> samples(plan.trials);
  for (double s_vth : plan.sigma_vth_list) {
    for (double s_cm : plan.sigma_cm_list) {
      const ArrayConfig cfg = column_config(base, plan.n_rows, s_vth, s_cm);
      TransferCurve curve{domain, s_vth, s_cm, {}};
      for (std::size_t k = 0; k <= plan.n_rows; ++k) {
        for (std::size_t t = 0; t < plan.trials; ++t)
          samples[t] = column_trial(cfg, domain, k, derive_seed(plan.seed ^ kTransferTag, k, t));
        const Moments mo = moments(samples);
        curve.points.push_back({k, mo.mean, mo.std, mo.count});
      }
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

std::map<int, std::vector<double>> code_populations(const McPlan& plan, const ArrayConfig& base,
                                                    double sigma_vth, double sigma_cm,
                                                    const std::vector<int>& codes) {
  plan.validate();
  const ArrayConfig cfg = column_config(base, plan.n_rows, sigma_vth, sigma_cm);
  std::map<int, std::vector<double>> out;
  for (int k : codes) {
    if (k < 0 || static_cast<std::size_t>(k) > plan.n_rows)
      throw ParameterError({fmt::format("code {} outside [0, {}]", k, plan.n_rows)});
    auto& pop = out[k];
    pop.resize(plan.trials);
    for (std::size_t t = 0; t < plan.trials; ++t)
      pop[t] = column_trial(cfg, Domain::Charge, static_cast<std::size_t>(k),
                            derive_seed(plan.seed ^ kTransferTag, static_cast<std::uint64_t>(k), t));
  }
  return out;
}

std::vector<ActivationProfile> worst_case_activation(const McPlan& plan, const ArrayConfig& base) {
  plan.validate();
  if (plan.sigma_cm_list.empty()) throw ParameterError({"worst_case_activation: sigma_cm_list is empty"});
  const std::vector<double> grid =
      plan.activation_grid.empty() ? uniform_grid(0.0, 1.0, 0.05) : plan.activation_grid;
  const std::size_t n = plan.n_rows;

  std::vector<ActivationProfile> profiles;
  for (double s_cm : plan.sigma_cm_list) {
    DeviceParams device = base.device;
    device.sigma_cm_rel = s_cm;
    device.validate();

    std::vector<std::size_t> active(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g)
      active[g] = static_cast<std::size_t>(std::floor(grid[g] * static_cast<double>(n) + 0.5));

    std::vector<std::vector<double>> samples(grid.size(), std::vector<double>(plan.trials));
    std::vector<double> caps(n);
    std::vector<double> prefix(n + 1);
    std::vector<std::size_t> order(n);
    for (std::size_t t = 0; t < plan.trials; ++t) {
      RandomStream rng(derive_seed(plan.seed ^ kActivationTag, t));
      for (auto& c : caps) c = sample_cell(device, 1, rng).c_m_sampled;
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng.shuffle(order.begin(), order.end());
      prefix[0] = 0.0;
      for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + caps[order[i]];
      double total = base.c_para;
      for (double c : caps) total += c;
      for (std::size_t g = 0; g < grid.size(); ++g) samples[g][t] = base.v_work * prefix[active[g]] / total;
    }

    ActivationProfile profile{s_cm, {}, 0};
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const Moments mo = moments(samples[g]);
      const double se = mo.count > 1 ? mo.std / std::sqrt(2.0 * static_cast<double>(mo.count - 1)) : 0.0;
      profile.points.push_back({grid[g], active[g], mo.mean, mo.std, se});
      if (mo.std > profile.points[profile.argmax].std) profile.argmax = g;
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

hdc::NoiseModel calibrate_noise_model(const TransferCurve& curve, const ArrayConfig& config) {
  const double n = static_cast<double>(curve.points.empty() ? 0 : curve.points.size() - 1);
  const double scale = curve.domain == Domain::Charge ? 1.0 / config.unit_step() : 1.0;
  double acc = 0.0;
  std::size_t used = 0;
  for (const auto& p : curve.points) {
    const double k = static_cast<double>(p.code);
    const double shape = curve.domain == Domain::Current ? k : k * (n - k) / n;
    if (shape <= 0.0 || p.samples < 2) continue;
    const double var = (p.std * scale) * (p.std * scale);
    acc += var / shape;
    ++used;
  }
  return {curve.domain, used ? std::sqrt(acc / static_cast<double>(used)) : 0.0};
}

std::vector<QualityRow> quality_loss_study(const McPlan& plan, const ArrayConfig& base,
                                           const QualityStudyParams& params) {
  plan.validate();
  if (plan.sigma_vth_list.empty()) throw ParameterError({"quality_loss_study: sigma_vth_list is empty"});
  const double s_cm = plan.sigma_cm_list.empty() ? 0.0 : plan.sigma_cm_list.front();

  std::vector<QualityRow> rows;
  for (Domain domain : params.domains) {
    for (double s_vth : plan.sigma_vth_list) {
      for (std::size_t dim : params.dims) {
        ArrayConfig cfg = base;
        cfg.n_rows = plan.n_rows;
        cfg.m_cols = params.task.levels;
        cfg.device.sigma_vth = s_vth;
        cfg.device.sigma_cm_rel = s_cm;
        cfg.validate();
        const AdcConfig adc = params.adc_bits > 0 ? ramp_aligned_adc(cfg, params.adc_bits) : counting_adc(cfg);

        std::size_t ideal = 0;
        std::size_t noisy = 0;
        std::size_t total = 0;
        for (std::size_t t = 0; t < plan.trials; ++t) {
          const std::uint64_t trial_seed = derive_seed(plan.seed ^ kQualityTag, dim, t);
          hdc::RetrievalTaskSet tasks = hdc::make_level_retrieval_tasks(dim, params.task, trial_seed);
          const auto exact = hdc::AssociativeMemory::exact(tasks.codebook);
          const auto cim = hdc::AssociativeMemory::cim(tasks.codebook,
                                                       {cfg, domain, mix64(trial_seed), hdc::NoiseModel{}});
          for (const auto& task : tasks.tasks) {
            ideal += exact.query(task.probe, adc).index == task.target;
            noisy += cim.query(task.probe, adc).index == task.target;
            ++total;
          }
        }
        QualityRow row;
        row.domain = domain;
        row.sigma_vth = s_vth;
        row.dim = dim;
        row.probes = total;
        row.ideal_accuracy = 100.0 * static_cast<double>(ideal) / static_cast<double>(total);
        row.noisy_accuracy = 100.0 * static_cast<double>(noisy) / static_cast<double>(total);
        row.loss = row.ideal_accuracy - row.noisy_accuracy;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace fecim::lab
