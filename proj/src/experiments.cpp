#include "fecim/experiments.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <fmt/format.h>

#include "fecim/array_core.hpp"
#include "fecim/cost_model.hpp"
#include "fecim/error.hpp"
#include "fecim/io.hpp"
#include "fecim/mapper.hpp"
#include "fecim/sensing.hpp"
#include "fecim/variation_lab.hpp"

namespace fecim::cli {
namespace {

using json = nlohmann::ordered_json;
using Diags = std::vector<std::string>;

double quantity(const json& j) {
  if (j.is_string()) return parse_quantity(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw FormatError(fmt::format("expected a number or quantity string, got {}", j.dump()));
}

double get_quantity(const json& params, const char* key, double fallback, Diags& diags) {
  if (!params.contains(key)) return fallback;
  try {
    return quantity(params.at(key));
  } catch (const std::exception& e) {
    diags.push_back(fmt::format("{}: {}", key, e.what()));
    return fallback;
  }
}

std::vector<double> get_quantity_list(const json& params, const char* key, std::vector<double> fallback,
                                      Diags& diags) {
  if (!params.contains(key)) return fallback;
  const json& j = params.at(key);
  std::vector<double> out;
  try {
    if (j.is_array()) {
      for (const auto& item : j) out.push_back(quantity(item));
    } else if (j.is_string() && j.get<std::string>().find(',') != std::string::npos) {
      std::stringstream ss(j.get<std::string>());
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(parse_quantity(item));
    } else {
      out.push_back(quantity(j));
    }
  } catch (const std::exception& e) {
    diags.push_back(fmt::format("{}: {}", key, e.what()));
  }
  if (out.empty()) diags.push_back(fmt::format("{}: list must not be empty", key));
  return out;
}

template <typename T>
T get_count(const json& params, const char* key, T fallback, Diags& diags) {
  if (!params.contains(key)) return fallback;
  const json& j = params.at(key);
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    diags.push_back(fmt::format("{}: expected a non-negative integer, got {}", key, j.dump()));
    return fallback;
  }
  return j.get<T>();
}

std::string get_string(const json& params, const char* key, std::string fallback) {
  return params.contains(key) && params.at(key).is_string() ? params.at(key).get<std::string>() : fallback;
}

ArrayConfig array_from(const json& params, const std::string& default_preset, Diags& diags) {
  const std::string preset = get_string(params, "preset", default_preset);
  ArrayConfig cfg;
  if (preset == "wide-window") cfg = ArrayConfig::wide_window();
  else if (preset != "nominal") diags.push_back(fmt::format("preset '{}' is not nominal or wide-window", preset));
  if (params.contains("array")) {
    const json& a = params.at("array");
    cfg.n_rows = get_count(a, "n_rows", cfg.n_rows, diags);
    cfg.m_cols = get_count(a, "m_cols", cfg.m_cols, diags);
    cfg.c_para = get_quantity(a, "c_para", cfg.c_para, diags);
    cfg.v_work = get_quantity(a, "v_work", cfg.v_work, diags);
    cfg.delta_offset = get_quantity(a, "delta_offset", cfg.delta_offset, diags);
    cfg.v_read = get_quantity(a, "v_read", cfg.v_read, diags);
    cfg.g0 = get_quantity(a, "g0", cfg.g0, diags);
    cfg.wl_levels.v_wl0 = get_quantity(a, "v_wl0", cfg.wl_levels.v_wl0, diags);
    cfg.wl_levels.v_wl1 = get_quantity(a, "v_wl1", cfg.wl_levels.v_wl1, diags);
    cfg.wl_levels.v_wl2 = get_quantity(a, "v_wl2", cfg.wl_levels.v_wl2, diags);
    if (a.contains("device")) {
      const json& d = a.at("device");
      auto& dev = cfg.device;
      dev.vth_lvt_mean = get_quantity(d, "vth_lvt_mean", dev.vth_lvt_mean, diags);
      dev.vth_hvt_mean = get_quantity(d, "vth_hvt_mean", dev.vth_hvt_mean, diags);
      dev.c_m_mean = get_quantity(d, "c_m_mean", dev.c_m_mean, diags);
      dev.on_off_ratio = get_quantity(d, "on_off_ratio", dev.on_off_ratio, diags);
    }
  }
  // Per-study sigmas and n_rows are applied later; check everything else now.
  ArrayConfig probe = cfg;
  for (auto& d : probe.diagnostics()) diags.push_back("array: " + d);
  return cfg;
}

lab::McPlan plan_from(const json& params, std::uint64_t seed, std::size_t default_trials, Diags& diags) {
  lab::McPlan plan;
  plan.seed = seed;
  plan.trials = get_count(params, "trials", default_trials, diags);
  plan.n_rows = get_count(params, "n_rows", plan.n_rows, diags);
  plan.sigma_vth_list = get_quantity_list(params, "sigma_vth", {0.030, 0.054, 0.110, 0.170}, diags);
  plan.sigma_cm_list = get_quantity_list(params, "sigma_cm", {0.0}, diags);
  for (auto& d : plan.diagnostics()) diags.push_back(d);
  return plan;
}

struct Prepared {
  Diags diags;
  std::uint64_t seed = 0;
};

// ---- experiments ---------------------------------------------------------

Output transfer_curve(const ExperimentConfig& cfg, Prepared& prep, bool dry) {
  const json& p = cfg.params;
  const ArrayConfig base = array_from(p, "wide-window", prep.diags);
  const lab::McPlan plan = plan_from(p, prep.seed, 1000, prep.diags);
  Domain domain = Domain::Charge;
  try {
    domain = parse_domain(get_string(p, "domain", "charge"));
  } catch (const ParameterError& e) {
    prep.diags.push_back(e.what());
  }
  if (dry || !prep.diags.empty()) return {};

  const auto curves = lab::run_transfer_curve(plan, base, domain);
  Output out;
  json doc = json::array();
  out.data = "domain,sigma_vth,sigma_cm,code,mean,std,samples\n";
  double worst_std = 0.0;
  for (const auto& c : curves) {
    for (const auto& pt : c.points) {
      out.data += fmt::format("{},{},{},{},{},{},{}\n", to_string(c.domain), io::num(c.sigma_vth),
                              io::num(c.sigma_cm), pt.code, io::num(pt.mean), io::num(pt.std), pt.samples);
      doc.push_back({{"domain", to_string(c.domain)}, {"sigma_vth", c.sigma_vth}, {"sigma_cm", c.sigma_cm},
                     {"code", pt.code}, {"mean", pt.mean}, {"std", pt.std}, {"samples", pt.samples}});
      worst_std = std::max(worst_std, pt.std);
    }
  }
  if (cfg.format == "json") out.data = doc.dump(2) + "\n";
  out.summary = fmt::format("{} curves, {} codes each, largest per-code std {}", curves.size(), plan.n_rows + 1,
                            io::num(worst_std));
  return out;
}

Output worst_case(const ExperimentConfig& cfg, Prepared& prep, bool dry) {
  const json& p = cfg.params;
  const ArrayConfig base = array_from(p, "nominal", prep.diags);
  lab::McPlan plan = plan_from(p, prep.seed, 100000, prep.diags);
  plan.sigma_cm_list = get_quantity_list(p, "sigma_cm", {0.05}, prep.diags);
  const double step = get_quantity(p, "grid_step", 0.05, prep.diags);
  if (!(step > 0.0 && step <= 1.0)) prep.diags.push_back("grid_step must be in (0, 1]");
  if (dry || !prep.diags.empty()) return {};
  plan.activation_grid = lab::uniform_grid(0.0, 1.0, step);

  const auto profiles = lab::worst_case_activation(plan, base);
  Output out;
  json doc = json::array();
  out.data = "sigma_cm,fraction,active_cells,mean_v_bl,std_v_bl,std_error,is_argmax\n";
  for (const auto& prof : profiles) {
    for (std::size_t i = 0; i < prof.points.size(); ++i) {
      const auto& pt = prof.points[i];
      const int argmax = i == prof.argmax ? 1 : 0;
      out.data += fmt::format("{},{},{},{},{},{},{}\n", io::num(prof.sigma_cm), io::num(pt.fraction),
                              pt.active_cells, io::num(pt.mean), io::num(pt.std), io::num(pt.std_error), argmax);
      doc.push_back({{"sigma_cm", prof.sigma_cm}, {"fraction", pt.fraction}, {"active_cells", pt.active_cells},
                     {"mean_v_bl", pt.mean}, {"std_v_bl", pt.std}, {"std_error", pt.std_error},
                     {"is_argmax", argmax}});
    }
    out.summary += fmt::format("sigma_cm {}: spread peaks at activation {}\n", io::num(prof.sigma_cm),
                               io::num(prof.argmax_fraction()));
  }
  if (cfg.format == "json") out.data = doc.dump(2) + "\n";
  return out;
}

Output sense_margin_exp(const ExperimentConfig& cfg, Prepared& prep, bool dry) {
  const json& p = cfg.params;
  const ArrayConfig base = array_from(p, "nominal", prep.diags);
  const lab::McPlan plan = plan_from(p, prep.seed, 2000, prep.diags);
  const double s_vth = get_quantity(p, "sigma_vth", 0.054, prep.diags);
  const double s_cm = get_quantity(p, "sigma_cm", 0.05, prep.diags);
  const double k_sigma = get_quantity(p, "k_sigma", 3.0, prep.diags);
  std::vector<int> codes;
  if (p.contains("codes") && p.at("codes").is_array()) {
    for (const auto& c : p.at("codes")) codes.push_back(c.get<int>());
  } else {
    const int mid = static_cast<int>(plan.n_rows / 2);
    for (int k = std::max(0, mid - 2); k <= std::min<int>(static_cast<int>(plan.n_rows), mid + 2); ++k)
      codes.push_back(k);
  }
  if (codes.size() < 2) prep.diags.push_back("codes: need at least two adjacent codes");
  if (plan.trials < 100) prep.diags.push_back("trials: sense margin needs >= 100 samples per code");
  if (dry || !prep.diags.empty()) return {};

  const auto pops = lab::code_populations(plan, base, s_vth, s_cm, codes);
  const MarginReport report = sense_margin(pops, k_sigma);
  Output out;
  if (cfg.format == "json") {
    json doc = json::array();
    for (const auto& r : report.rows)
      doc.push_back({{"code_pair", fmt::format("{}-{}", r.code_low, r.code_low + 1)}, {"gap", r.gap},
                     {"sigma_low", r.sigma_low}, {"sigma_high", r.sigma_high}, {"margin", r.margin}});
    out.data = doc.dump(2) + "\n";
  } else {
    out.data = io::margin_csv(report);
  }
  out.summary = fmt::format("worst {}-sigma margin {} V at codes {}-{}", io::num(k_sigma), io::num(report.margin),
                            report.rows[report.worst_row].code_low, report.rows[report.worst_row].code_low + 1);
  return out;
}

cost::CostParams cost_params_from(const json& params, Diags& diags) {
  cost::CostParams c;
  if (!params.contains("cost")) return c;
  const json& j = params.at("cost");
  c.v_work0 = get_quantity(j, "v_work0", c.v_work0, diags);
  c.n_knee = get_count(j, "n_knee", c.n_knee, diags);
  c.c_m = get_quantity(j, "c_m", c.c_m, diags);
  c.alpha = get_quantity(j, "alpha", c.alpha, diags);
  c.e_adc = get_quantity(j, "e_adc", c.e_adc, diags);
  c.t_step = get_quantity(j, "t_step", c.t_step, diags);
  c.t_adc = get_quantity(j, "t_adc", c.t_adc, diags);
  c.adc_mux_ratio = get_count(j, "adc_mux_ratio", c.adc_mux_ratio, diags);
  for (auto& d : c.diagnostics()) diags.push_back("cost: " + d);
  return c;
}

Output scaling(const ExperimentConfig& cfg, Prepared& prep, bool dry) {
  const json& p = cfg.params;
  const cost::CostParams params = cost_params_from(p, prep.diags);
  auto counts = [&](const char* key, std::vector<std::size_t> fallback) {
    if (!p.contains(key)) return fallback;
    std::vector<std::size_t> out;
    for (const auto& v : p.at(key)) {
      if (!v.is_number_integer() || v.get<long long>() < 1) prep.diags.push_back(fmt::format("{}: entries must be >= 1", key));
      else out.push_back(v.get<std::size_t>());
    }
    if (out.empty()) prep.diags.push_back(fmt::format("{}: list must not be empty", key));
    return out;
  };
  const auto ns = counts("n", {16, 32, 64, 128, 256});
  const auto ms = counts("m", {64});
  if (dry || !prep.diags.empty()) return {};

  Output out;
  json doc = json::array();
  out.data = "n,m,mode,include_adc,v_work,adc_bits,energy,latency,edp\n";
  for (auto mode : {cost::Mode::Mac2Step, cost::Mode::Cam3Step}) {
    for (bool adc : {false, true}) {
      for (std::size_t m : ms) {
        for (std::size_t n : ns) {
          const auto r = cost::array_cost(n, m, mode, adc, params);
          const double v = cost::v_work_of(n, params);
          out.data += fmt::format("{},{},{},{},{},{},{},{},{}\n", n, m, cost::to_string(mode), adc ? 1 : 0,
                                  io::num(v), r.adc_bits, io::num(r.energy), io::num(r.latency), io::num(r.edp));
          doc.push_back({{"n", n}, {"m", m}, {"mode", cost::to_string(mode)}, {"include_adc", adc},
                         {"v_work", v}, {"adc_bits", r.adc_bits}, {"energy", r.energy},
                         {"latency", r.latency}, {"edp", r.edp}});
        }
      }
    }
  }
  if (cfg.format == "json") out.data = doc.dump(2) + "\n";
  out.summary = fmt::format("{} cost points", doc.size());
  return out;
}

Output edp_table(const ExperimentConfig& cfg, Prepared& prep, bool dry) {
  const json& p = cfg.params;
  std::vector<cost::Design> designs;
  if (p.contains("designs")) {
    for (const auto& d : p.at("designs")) {
      try {
        designs.push_back(d.is_string() ? cost::parse_design(io::read_file(d.get<std::string>()))
                                        : cost::parse_design(d.dump()));
      } catch (const std::exception& e) {
        prep.diags.push_back(fmt::format("designs: {}", e.what()));
      }
    }
  } else {
    designs = cost::default_designs();
  }
  if (designs.size() < 2) prep.diags.push_back("designs: need at least two designs");
  const auto n = get_count<std::size_t>(p, "n", 64, prep.diags);
  const auto m = get_count<std::size_t>(p, "m", 64, prep.diags);
  if (n < 1 || m < 1) prep.diags.push_back("n and m must be >= 1");
  if (dry || !prep.diags.empty()) return {};

  const auto rows = cost::edp_compare(designs, n, m);
  Output out;
  json doc = json::array();
  out.data = "rank,design,cell_area_f2,energy,latency,edp\n";
  for (const auto& r : rows) {
    out.data += fmt::format("{},{},{},{},{},{}\n", r.rank, r.name, io::num(r.cell_area_f2), io::num(r.energy),
                            io::num(r.latency), io::num(r.edp));
    doc.push_back({{"rank", r.rank}, {"design", r.name}, {"cell_area_f2", r.cell_area_f2}, {"energy", r.energy},
                   {"latency", r.latency}, {"edp", r.edp}});
  }
  if (cfg.format == "json") out.data = doc.dump(2) + "\n";
  out.summary = fmt::format("lowest EDP: {} ({} J s)", rows.front().name, io::num(rows.front().edp));
  return out;
}

Output hdc_quality(const ExperimentConfig& cfg, Prepared& prep, bool dry) {
  const json& p = cfg.params;
  const ArrayConfig base = array_from(p, "wide-window", prep.diags);
  const lab::McPlan plan = plan_from(p, prep.seed, 100, prep.diags);
  lab::QualityStudyParams qp;
  if (p.contains("dims")) {
    qp.dims.clear();
    for (const auto& d : p.at("dims")) qp.dims.push_back(d.get<std::size_t>());
    if (qp.dims.empty()) prep.diags.push_back("dims: list must not be empty");
  }
  if (p.contains("domains")) {
    qp.domains.clear();
    for (const auto& d : p.at("domains")) {
      try {
        qp.domains.push_back(parse_domain(d.get<std::string>()));
      } catch (const ParameterError& e) {
        prep.diags.push_back(e.what());
      }
    }
  } else if (p.contains("domain")) {
    try {
      qp.domains = {parse_domain(get_string(p, "domain", "charge"))};
    } catch (const ParameterError& e) {
      prep.diags.push_back(e.what());
    }
  }
  qp.task.levels = get_count(p, "levels", qp.task.levels, prep.diags);
  qp.task.probes = get_count(p, "probes", qp.task.probes, prep.diags);
  qp.task.spacing_fraction = get_quantity(p, "spacing_fraction", qp.task.spacing_fraction, prep.diags);
  qp.task.flip_fraction = get_quantity(p, "flip_fraction", qp.task.flip_fraction, prep.diags);
  qp.adc_bits = get_count(p, "adc_bits", qp.adc_bits, prep.diags);
  if (qp.task.levels < 2) prep.diags.push_back("levels must be >= 2");
  if (dry || !prep.diags.empty()) return {};

  const auto rows = lab::quality_loss_study(plan, base, qp);
  Output out;
  json doc = json::array();
  out.data = "domain,sigma_vth,dim,probes,ideal_accuracy,noisy_accuracy,loss_pct\n";
  for (const auto& r : rows) {
    out.data += fmt::format("{},{},{},{},{},{},{}\n", to_string(r.domain), io::num(r.sigma_vth), r.dim, r.probes,
                            io::num(r.ideal_accuracy), io::num(r.noisy_accuracy), io::num(r.loss));
    doc.push_back({{"domain", to_string(r.domain)}, {"sigma_vth", r.sigma_vth}, {"dim", r.dim},
                   {"probes", r.probes}, {"ideal_accuracy", r.ideal_accuracy},
                   {"noisy_accuracy", r.noisy_accuracy}, {"loss_pct", r.loss}});
  }
  if (cfg.format == "json") out.data = doc.dump(2) + "\n";
  out.summary = fmt::format("{} quality rows", rows.size());
  return out;
}

Output map_workload(const ExperimentConfig& cfg, Prepared& prep, bool dry) {
  const json& p = cfg.params;
  mapper::WorkloadSpec spec;
  try {
    if (p.contains("workload_file")) spec = mapper::parse_workload(io::read_file(get_string(p, "workload_file", "")));
    else if (p.contains("workload")) spec = mapper::parse_workload(p.at("workload").dump());
    else prep.diags.push_back("map-workload needs 'workload' or 'workload_file'");
  } catch (const std::exception& e) {
    prep.diags.push_back(fmt::format("workload: {}", e.what()));
  }
  const ArrayConfig array = array_from(p, "nominal", prep.diags);
  const auto count = get_count<std::size_t>(p, "arrays", 16, prep.diags);
  if (count < 1) prep.diags.push_back("arrays must be >= 1");
  const cost::CostParams params = cost_params_from(p, prep.diags);
  const auto functional = get_count<std::size_t>(p, "functional_queries", 16, prep.diags);
  if (dry || !prep.diags.empty()) return {};

  const std::vector<ArrayConfig> inventory(count, array);
  const TileAllocation alloc = mapper::allocate(spec, inventory, params);
  mapper::SimulationOptions sim;
  sim.seed = prep.seed;
  sim.max_functional_queries = functional;
  const auto result = mapper::simulate_workload(alloc, spec, params, sim);

  json doc;
  doc["feasible"] = alloc.feasible;
  doc["infeasibility"] = alloc.infeasibility;
  doc["tile"] = {{"rows", alloc.tile_rows}, {"cols", alloc.tile_cols}};
  doc["array_modes"] = json::array();
  for (std::size_t a = 0; a < alloc.array_modes.size(); ++a)
    doc["array_modes"].push_back({{"array", a}, {"mode", to_string(alloc.array_modes[a])},
                                  {"utilization", alloc.utilization[a]}});
  doc["stages"] = json::array();
  for (const auto& s : alloc.stages)
    doc["stages"].push_back({{"name", s.name}, {"kind", to_string(s.kind)}, {"tiles", s.tiles_required()},
                             {"slices_per_output", s.slices_per_output}, {"invocations", s.invocations},
                             {"demand_cells", s.demand_cells}, {"assigned_cells", s.assigned_cells}});
  doc["slots"] = json::array();
  std::string csv = "slot,array,mode,stage,tile,rows_used,cols_used,invocations,bit_cycles,utilization\n";
  for (std::size_t s = 0; s < alloc.slots.size(); ++s) {
    json ops = json::array();
    for (const auto& op : alloc.slots[s].ops) {
      const std::string& stage = alloc.stages[op.stage].name;
      ops.push_back({{"array", op.array}, {"mode", to_string(op.mode)}, {"stage", stage}, {"tile", op.tile},
                     {"rows_used", op.rows_used}, {"cols_used", op.cols_used}, {"invocations", op.invocations},
                     {"bit_cycles", op.bit_cycles}, {"utilization", op.utilization}});
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", s, op.array, to_string(op.mode), stage, op.tile,
                         op.rows_used, op.cols_used, op.invocations, op.bit_cycles, io::num(op.utilization));
    }
    doc["slots"].push_back(ops);
  }
  const auto& rep = result.cost.report;
  doc["cost"] = {{"energy", rep.energy}, {"latency", rep.latency}, {"edp", rep.edp}};
  doc["reference_gpu"] = {{"speedup_resnet18", result.cost.reference.gpu_speedup_resnet18},
                          {"speedup_resnet34", result.cost.reference.gpu_speedup_resnet34},
                          {"energy_ratio_resnet18", result.cost.reference.gpu_energy_ratio_resnet18},
                          {"energy_ratio_resnet34", result.cost.reference.gpu_energy_ratio_resnet34}};
  doc["functional"] = {{"queries", result.trace.size()}, {"mismatches", result.mismatches}};

  Output out;
  out.data = cfg.format == "json" ? doc.dump(2) + "\n" : csv;
  out.summary = fmt::format("{:<16} {:<9} {:>6} {:>12}\n", "stage", "kind", "tiles", "invocations");
  for (const auto& s : alloc.stages)
    out.summary += fmt::format("{:<16} {:<9} {:>6} {:>12}\n", s.name, to_string(s.kind), s.tiles_required(),
                               s.invocations);
  out.summary += fmt::format("{} slots on {} arrays, energy {} J, latency {} s, functional mismatches {}/{}{}",
                             alloc.slots.size(), inventory.size(), io::num(rep.energy), io::num(rep.latency),
                             result.mismatches, result.trace.size(),
                             alloc.feasible ? "" : "\nINFEASIBLE: " + alloc.infeasibility);
  return out;
}

using Handler = Output (*)(const ExperimentConfig&, Prepared&, bool);

Handler handler_for(const std::string& id) {
  if (id == "transfer-curve") return transfer_curve;
  if (id == "worst-case") return worst_case;
  if (id == "sense-margin") return sense_margin_exp;
  if (id == "scaling") return scaling;
  if (id == "edp-table") return edp_table;
  if (id == "hdc-quality") return hdc_quality;
  if (id == "map-workload") return map_workload;
  return nullptr;
}

Prepared prepare(const ExperimentConfig& config, bool dry, Output* out) {
  Prepared prep;
  const Handler handler = handler_for(config.experiment);
  if (!handler) {
    prep.diags.push_back(fmt::format("unknown experiment '{}'", config.experiment));
    return prep;
  }
  if (!config.seed) prep.diags.push_back("seed is required (--seed or \"seed\" in the config)");
  else prep.seed = *config.seed;
  if (config.format != "csv" && config.format != "json")
    prep.diags.push_back(fmt::format("format '{}' is not csv or json", config.format));
  if (!config.params.is_object()) {
    prep.diags.push_back("params must be an object");
    return prep;
  }
  Output o = handler(config, prep, dry || !prep.diags.empty());
  if (out) *out = std::move(o);
  return prep;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  const auto doc = json::parse(json_text.begin(), json_text.end());
  ExperimentConfig cfg;
  cfg.experiment = doc.value("experiment", std::string());
  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("out")) cfg.out_dir = doc.at("out").get<std::string>();
  cfg.format = doc.value("format", std::string("csv"));
  if (doc.contains("params")) cfg.params = doc.at("params");
  return cfg;
}

std::vector<std::string> validate(const ExperimentConfig& config) { return prepare(config, true, nullptr).diags; }

Output render(const ExperimentConfig& config) {
  Output out;
  Prepared prep = prepare(config, false, &out);
  throw_if_invalid(std::move(prep.diags));
  return out;
}

RunResult run(const ExperimentConfig& config) {
  RunResult result;
  if (auto diags = validate(config); !diags.empty()) {
    result.exit_code = 2;
    for (const auto& d : diags) result.message += d + "\n";
    return result;
  }
  try {
    const Output out = render(config);
    std::filesystem::create_directories(config.out_dir);
    const std::string stem = fmt::format("{}_{}", config.experiment, *config.seed);
    const auto data_path = config.out_dir / (stem + "." + config.format);
    const auto manifest_path = config.out_dir / (stem + ".manifest.json");
    json manifest;
    manifest["tool"] = "fecim";
    manifest["version"] = std::string(kToolVersion);
    manifest["experiment"] = config.experiment;
    manifest["seed"] = *config.seed;
    manifest["format"] = config.format;
    manifest["params"] = config.params;
    manifest["output"] = data_path.filename().string();
    io::write_file(data_path, out.data);
    io::write_file(manifest_path, manifest.dump(2) + "\n");
    result.files = {data_path, manifest_path};
    result.message = out.summary;
  } catch (const ParameterError& e) {
    result.exit_code = 2;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.message = e.what();
  }
  return result;
}

}  // namespace fecim::cli
