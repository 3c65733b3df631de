#include "fecim/cost_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>
#include <json.hpp>

#include "fecim/error.hpp"

namespace fecim {

std::string to_string(ArrayMode mode) {
  switch (mode) {
    case ArrayMode::Mac: return "MAC";
    case ArrayMode::Cam: return "CAM";
    default: return "idle";
  }
}

std::string to_string(StageKind kind) { return kind == StageKind::Neural ? "neural" : "symbolic"; }

}  // namespace fecim

namespace fecim::cost {

std::size_t step_count(Mode mode) noexcept { return mode == Mode::Mac2Step ? 2 : 3; }

std::string to_string(Mode mode) { return mode == Mode::Mac2Step ? "mac2step" : "cam3step"; }

std::vector<std::string> CostParams::diagnostics() const {
  std::vector<std::string> out;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) out.push_back(fmt::format("{} must be > 0 (got {})", name, v));
  };
  positive(v_work0, "v_work0");
  positive(c_m, "c_m");
  positive(alpha, "alpha");
  positive(e_adc, "e_adc");
  positive(t_step, "t_step");
  positive(t_adc, "t_adc");
  positive(g0, "g0");
  positive(v_overdrive, "v_overdrive");
  positive(v_read, "v_read");
  positive(e_shift_add, "e_shift_add");
  positive(t_shift_add, "t_shift_add");
  if (n_knee < 1) out.push_back("n_knee must be >= 1");
  if (adc_mux_ratio < 1) out.push_back("adc_mux_ratio must be >= 1");
  if (!(activity >= 0.0 && activity <= 1.0)) out.push_back("activity must be in [0, 1]");
  return out;
}

void CostParams::validate() const { throw_if_invalid(diagnostics()); }

double v_work_of(std::size_t n, const CostParams& params) {
  return params.v_work0 * std::max(1.0, static_cast<double>(n) / static_cast<double>(params.n_knee));
}

int adc_resolution_for(std::size_t n) {
  int bits = 1;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

CostReport array_cost(std::size_t n, std::size_t m, Mode mode, bool include_adc, const CostParams& params) {
  params.validate();
  if (n < 1 || m < 1) throw ParameterError({"array_cost: n and m must be >= 1"});
  const double v = v_work_of(n, params);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double t_step = params.t_step * v / params.v_work0;
  const double steps = static_cast<double>(step_count(mode));

  CostReport r;
  double e_col = params.alpha * dn * params.c_m * v * v;
  r.energy_breakdown.emplace_back("array", dm * e_col);
  if (params.domain == Domain::Current) {
    const double read = dn * params.activity * params.g0 * params.v_overdrive * params.v_read * t_step * steps;
    r.energy_breakdown.emplace_back("read_current", dm * read);
    e_col += read;
  }
  r.energy = dm * e_col;
  r.latency = steps * t_step;
  r.latency_breakdown.emplace_back("steps", r.latency);
  r.adc_bits = adc_resolution_for(n);
  if (include_adc) {
    const double e_adc = dm * params.e_adc;
    const double t_adc = std::ceil(dm / static_cast<double>(params.adc_mux_ratio)) * params.t_adc;
    r.energy += e_adc;
    r.latency += t_adc;
    r.energy_breakdown.emplace_back("adc", e_adc);
    r.latency_breakdown.emplace_back("adc", t_adc);
  }
  r.edp = r.energy * r.latency;
  return r;
}

std::vector<Design> default_designs() {
  std::vector<Design> out;
  Design fefet_1c{"1FeFET-1C", 6.0, CostParams{}, Mode::Mac2Step};
  out.push_back(fefet_1c);

  Design sram{"SRAM-charge", 150.0, CostParams{}, Mode::Mac2Step};
  sram.params.c_m = 2e-15;
  sram.params.v_work0 = 0.9;
  sram.params.t_step = 1.5e-9;
  out.push_back(sram);

  Design rram{"RRAM-charge", 12.0, CostParams{}, Mode::Mac2Step};
  rram.params.c_m = 1.5e-15;
  rram.params.v_work0 = 0.8;
  rram.params.t_step = 2e-9;
  out.push_back(rram);

  Design mram{"MRAM-charge", 40.0, CostParams{}, Mode::Mac2Step};
  mram.params.c_m = 1.5e-15;
  mram.params.v_work0 = 0.9;
  mram.params.t_step = 2.5e-9;
  out.push_back(mram);

  Design fefet_current{"FeFET-current", 4.0, CostParams{}, Mode::Mac2Step};
  fefet_current.params.domain = Domain::Current;
  fefet_current.params.t_step = 2e-9;
  out.push_back(fefet_current);
  return out;
}

Design parse_design(const std::string& json_text) {
  const auto doc = nlohmann::json::parse(json_text);
  Design d;
  d.name = doc.at("name").get<std::string>();
  d.cell_area_f2 = doc.value("cell_area_f2", 0.0);
  d.mode = doc.value("mode", std::string("mac2step")) == "cam3step" ? Mode::Cam3Step : Mode::Mac2Step;
  CostParams& p = d.params;
  if (doc.contains("params")) {
    const auto& j = doc.at("params");
    p.v_work0 = j.value("v_work0", p.v_work0);
    p.n_knee = j.value("n_knee", p.n_knee);
    p.c_m = j.value("c_m", p.c_m);
    p.alpha = j.value("alpha", p.alpha);
    p.e_adc = j.value("e_adc", p.e_adc);
    p.t_step = j.value("t_step", p.t_step);
    p.t_adc = j.value("t_adc", p.t_adc);
    p.adc_mux_ratio = j.value("adc_mux_ratio", p.adc_mux_ratio);
    p.domain = parse_domain(j.value("domain", to_string(p.domain)));
    p.g0 = j.value("g0", p.g0);
    p.v_overdrive = j.value("v_overdrive", p.v_overdrive);
    p.v_read = j.value("v_read", p.v_read);
    p.activity = j.value("activity", p.activity);
  }
  p.validate();
  return d;
}

std::vector<EdpRow> edp_compare(const std::vector<Design>& designs, std::size_t n, std::size_t m) {
  if (designs.size() < 2) throw ParameterError({"edp_compare: need at least two designs"});
  std::vector<EdpRow> rows;
  for (const auto& d : designs) {
    const CostReport r = array_cost(n, m, d.mode, false, d.params);
    rows.push_back({0, d.name, d.cell_area_f2, r.energy, r.latency, r.edp});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const EdpRow& a, const EdpRow& b) { return a.edp < b.edp; });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = i + 1;
  return rows;
}

CostReport op_cost(const TileAssignment& op, const ArrayConfig& array, const CostParams& params) {
  const Mode mode = op.mode == ArrayMode::Cam ? Mode::Cam3Step : Mode::Mac2Step;
  CostReport per = array_cost(array.n_rows, std::max<std::size_t>(1, op.cols_used), mode, true, params);
  const double passes = static_cast<double>(op.invocations) * static_cast<double>(op.bit_cycles);
  CostReport r;
  r.adc_bits = per.adc_bits;
  r.energy = per.energy * passes;
  r.latency = per.latency * passes;
  r.energy_breakdown.emplace_back(mode == Mode::Cam3Step ? "cam" : "mac", r.energy);
  if (op.mode == ArrayMode::Mac && op.bit_cycles > 1) {
    const double e = params.e_shift_add * static_cast<double>(op.cols_used) * passes;
    const double t = params.t_shift_add * passes;
    r.energy += e;
    r.latency += t;
    r.energy_breakdown.emplace_back("shift_add", e);
  }
  r.edp = r.energy * r.latency;
  return r;
}

SystemCost system_cost(const TileAllocation& alloc, const CostParams& params) {
  SystemCost out;
  out.reference = params.reference;
  double mac_energy = 0.0;
  double cam_energy = 0.0;
  double shift_energy = 0.0;
  for (const auto& slot : alloc.slots) {
    double slot_latency = 0.0;
    for (const auto& op : slot.ops) {
      const CostReport r = op_cost(op, alloc.inventory.at(op.array), params);
      out.report.energy += r.energy;
      slot_latency = std::max(slot_latency, r.latency);
      for (const auto& [phase, e] : r.energy_breakdown) {
        if (phase == "mac") mac_energy += e;
        else if (phase == "cam") cam_energy += e;
        else shift_energy += e;
      }
    }
    out.report.latency += slot_latency;
  }
  out.report.edp = out.report.energy * out.report.latency;
  out.report.energy_breakdown = {{"mac", mac_energy}, {"cam", cam_energy}, {"shift_add", shift_energy}};
  out.report.latency_breakdown = {{"schedule", out.report.latency}};
  return out;
}

}  // namespace fecim::cost
