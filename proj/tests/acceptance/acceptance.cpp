// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fecim/array_core.hpp"
#include "fecim/cost_model.hpp"
#include "fecim/experiments.hpp"
#include "fecim/hdc.hpp"
#include "fecim/io.hpp"
#include "fecim/mapper.hpp"
#include "fecim/sensing.hpp"
#include "fecim/variation_lab.hpp"

using namespace fecim;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

// ---- 1 ---------------------------------------------------------------------

// Charge bookkeeping done by hand, in row order, for a column where the first
// `charged` rows hold v_work and the rest hold 0.
double bookkeeping(const ArrayConfig& cfg, std::size_t charged) {
  double q = 0.0, c = cfg.c_para;
  for (std::size_t r = 0; r < cfg.n_rows; ++r) {
    q += (r < charged ? cfg.v_work : 0.0) * cfg.device.c_m_mean;
    c += cfg.device.c_m_mean;
  }
  const double v = q / c + cfg.delta_offset;
  return v > cfg.v_work ? cfg.v_work : v;
}

Verdict exactness() {
  ArrayConfig cfg;
  cfg.n_rows = 64;
  cfg.m_cols = 8;
  const double cm = cfg.device.c_m_mean;
  RandomStream rng(1);
  BitGrid stored(64, 8);
  for (std::size_t r = 0; r < 64; ++r) {
    const auto b = rng.bit();
    for (std::size_t c = 0; c < 8; ++c) stored.set(r, c, b);
  }
  double worst_rel = 0.0;
  std::size_t oracle_mismatch = 0, count_mismatch = 0;
  for (std::size_t k = 0; k <= 64; ++k) {
    const double closed = cfg.v_work * static_cast<double>(k) * cm / (64 * cm + cfg.c_para);
    // Search: first k rows match the query, the rest mismatch.
    BitVector q(64);
    for (std::size_t r = 0; r < 64; ++r) q[r] = r < k ? stored(r, 0) : 1 - stored(r, 0);
    auto cam = CimArray::build(cfg, stored, 3);
    const auto rc = cam.cam_search(q);
    // MAC: all-ones weights, first k inputs on.
    BitGrid ones(64, 8);
    for (std::size_t r = 0; r < 64; ++r)
      for (std::size_t c = 0; c < 8; ++c) ones.set(r, c, 1);
    BitVector in(64, 0);
    for (std::size_t r = 0; r < k; ++r) in[r] = 1;
    auto mac = CimArray::build(cfg, ones, 4);
    const auto rm = mac.mac(in);
    for (const auto* out : {&rc, &rm}) {
      for (std::size_t c = 0; c < 8; ++c) {
        const double got = out->v_bl[c] - cfg.delta_offset;
        const double rel = k == 0 ? std::abs(got) : std::abs(got - closed) / closed;
        worst_rel = std::max(worst_rel, rel);
        if (out->v_bl[c] != bookkeeping(cfg, k)) ++oracle_mismatch;
        if (out->charged_cells[c] != k) ++count_mismatch;
      }
    }
  }
  return {worst_rel < 1e-12 && oracle_mismatch == 0 && count_mismatch == 0,
          fmt::format("max rel err {:.2e}, oracle mismatches {}, count mismatches {}", worst_rel, oracle_mismatch,
                      count_mismatch)};
}

// ---- 2 ---------------------------------------------------------------------

Verdict variation_immunity() {
  lab::McPlan plan;
  plan.trials = 10000;
  plan.seed = 2;
  plan.sigma_vth_list = {0.170};
  const ArrayConfig wide = ArrayConfig::wide_window();
  const auto charge = lab::run_transfer_curve(plan, wide, Domain::Charge);
  double charge_max = 0.0;
  for (const auto& p : charge[0].points) charge_max = std::max(charge_max, p.std);

  plan.sigma_vth_list = {0.030, 0.054, 0.110, 0.170};
  const auto current = lab::run_transfer_curve(plan, wide, Domain::Current);
  std::size_t violations = 0;
  for (std::size_t k = 1; k <= plan.n_rows; ++k)
    for (std::size_t i = 1; i < current.size(); ++i)
      if (!(current[i].points[k].std > current[i - 1].points[k].std)) ++violations;

  // Same check on the nominal 1 V window, reported for information.
  plan.trials = 1000;
  plan.sigma_vth_list = {0.170};
  const auto nominal = lab::run_transfer_curve(plan, ArrayConfig{}, Domain::Charge);
  double nominal_max = 0.0;
  for (const auto& p : nominal[0].points) nominal_max = std::max(nominal_max, p.std);

  return {charge_max == 0.0 && violations == 0,
          fmt::format("charge max std {} V; current std non-increasing at {} of 256 (k, sigma) steps; "
                      "std at k=32: {:.3f} {:.3f} {:.3f} {:.3f} cells; nominal window (info) max std {:.2e} V",
                      charge_max, violations, current[0].points[32].std, current[1].points[32].std,
                      current[2].points[32].std, current[3].points[32].std, nominal_max)};
}

// ---- 3 ---------------------------------------------------------------------

Verdict worst_case() {
  lab::McPlan plan;
  plan.trials = 100000;
  plan.seed = 3;
  plan.sigma_cm_list = {0.05};
  plan.activation_grid = lab::uniform_grid(0.0, 1.0, 0.05);
  ArrayConfig cfg;
  cfg.c_para = 0.0;
  const auto prof = lab::worst_case_activation(plan, cfg)[0];
  const double arg = prof.argmax_fraction();
  std::size_t asym = 0;
  double worst_z = 0.0;
  const std::size_t g = prof.points.size();
  for (std::size_t i = 0; i < g / 2; ++i) {
    const auto& a = prof.points[i];
    const auto& b = prof.points[g - 1 - i];
    const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    const double diff = std::abs(a.std - b.std);
    if (se > 0 && diff > 1e-15) worst_z = std::max(worst_z, diff / se);
    if (diff > 3 * se + 1e-15) ++asym;
  }
  return {std::abs(arg - 0.5) <= 0.05 + 1e-12 && asym == 0,
          fmt::format("argmax p = {}, sigma there {:.3e} V, asymmetric pairs {}, worst |diff|/se {:.2f}", arg,
                      prof.points[prof.argmax].std, asym, worst_z)};
}

// ---- 4 ---------------------------------------------------------------------

Verdict sense_margin_check() {
  lab::McPlan plan;
  plan.trials = 5000;
  plan.seed = 4;
  const auto pops = lab::code_populations(plan, ArrayConfig{}, 0.054, 0.05, {29, 30, 31, 32, 33, 34, 35});
  const auto report = sense_margin(pops, 3.0);
  const auto& w = report.rows[report.worst_row];
  return {report.margin > 0.0,
          fmt::format("worst pair {}-{}: gap {:.3e} V, sigma {:.3e}/{:.3e} V, 3-sigma margin {:.3e} V "
                      "(separation {:.2f} sigma per side)",
                      w.code_low, w.code_low + 1, w.gap, w.sigma_low, w.sigma_high, report.margin,
                      w.gap / (w.sigma_low + w.sigma_high))};
}

// ---- 5 ---------------------------------------------------------------------

Verdict scaling() {
  cost::CostParams fixed;
  fixed.n_knee = 1 << 20;  // fixed v_work for the linear regime
  bool ok = true;
  std::string why;
  for (auto mode : {cost::Mode::Mac2Step, cost::Mode::Cam3Step}) {
    const auto e16 = cost::array_cost(16, 64, mode, false, fixed);
    const auto e32 = cost::array_cost(32, 64, mode, false, fixed);
    const auto e64 = cost::array_cost(64, 64, mode, false, fixed);
    if (std::abs(e32.energy / e16.energy - 2) > 1e-9 || std::abs(e64.energy / e16.energy - 4) > 1e-9 ||
        e16.latency != e32.latency || e32.latency != e64.latency) {
      ok = false;
      why += " linear-regime";
    }
    const cost::CostParams p;
    const auto a = cost::array_cost(64, 64, mode, false, p);
    const auto b = cost::array_cost(128, 64, mode, false, p);
    const auto c = cost::array_cost(256, 64, mode, false, p);
    if (!(b.energy / a.energy >= 4 && c.energy / b.energy >= 4 && b.latency > a.latency && c.latency > b.latency)) {
      ok = false;
      why += " super-linear";
    }
    const auto m1 = cost::array_cost(64, 16, mode, false, p);
    const auto m2 = cost::array_cost(64, 32, mode, false, p);
    const auto m4 = cost::array_cost(64, 64, mode, false, p);
    if (std::abs(m2.energy / m1.energy - 2) > 1e-9 || std::abs(m4.energy / m1.energy - 4) > 1e-9 ||
        m1.latency != m4.latency) {
      ok = false;
      why += " m-linearity";
    }
  }
  const cost::CostParams p;
  const double r1 = cost::array_cost(128, 64, cost::Mode::Mac2Step, false, p).energy /
                    cost::array_cost(64, 64, cost::Mode::Mac2Step, false, p).energy;
  return {ok, fmt::format("16:32:64 = 1:2:4, energy x{:.3g} per doubling above 64 rows{}", r1,
                          why.empty() ? "" : ";" + why)};
}

// ---- 6 ---------------------------------------------------------------------

Verdict hamming_oracle() {
  RandomStream rng(6);
  const auto book = hdc::random_codebook(512, 16, rng);
  ArrayConfig cfg;
  const auto exact = hdc::AssociativeMemory::exact(book);
  const auto cim = hdc::AssociativeMemory::cim(book, {cfg, Domain::Charge, 66, {}});
  const AdcConfig adc = ramp_aligned_adc(cfg, 6);
  std::size_t agree = 0;
  const std::size_t probes = 1000;
  for (std::size_t t = 0; t < probes; ++t) {
    const auto probe = hdc::Hypervector::random(512, rng);
    const auto a = exact.query(probe);
    const auto b = cim.query(probe, adc);
    // Popcount computed directly, not through the memory.
    bool same = a.index == b.index;
    for (std::size_t e = 0; e < book.size(); ++e)
      same = same && b.distances[e] == static_cast<double>(hdc::hamming(probe, book[e].vector));
    agree += same;
  }
  return {agree == probes, fmt::format("{}/{} probes agree on every distance ({} tiles x {} groups)", agree, probes,
                                       cim.tile_count(), cim.array_count() / cim.tile_count())};
}

// ---- 7 ---------------------------------------------------------------------

Verdict quality_trends() {
  lab::McPlan plan;
  plan.trials = 100;
  plan.seed = 7;
  lab::QualityStudyParams qp;
  const auto rows = lab::quality_loss_study(plan, ArrayConfig::wide_window(), qp);
  std::map<std::pair<int, std::size_t>, std::vector<const lab::QualityRow*>> by;  // (domain, dim) -> rows by sigma
  for (const auto& r : rows) by[{static_cast<int>(r.domain), r.dim}].push_back(&r);
  bool a = true, b = true, c = true;
  std::string table;
  for (const auto& r : rows) {
    if (r.domain == Domain::Charge && r.sigma_vth == 0.170 && !(r.loss < 0.5)) a = false;
  }
  for (std::size_t dim : qp.dims) {
    const auto& cur = by[{static_cast<int>(Domain::Current), dim}];
    for (std::size_t i = 1; i < cur.size(); ++i)
      if (cur[i]->loss < cur[i - 1]->loss) b = false;
    table += fmt::format(" D={}:", dim);
    for (const auto* r : cur) table += fmt::format(" {:.2f}", r->loss);
  }
  const auto& lo = by[{static_cast<int>(Domain::Current), 512}];
  const auto& hi = by[{static_cast<int>(Domain::Current), 2048}];
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i]->sigma_vth >= 0.054 - 1e-12 && !(hi[i]->loss < lo[i]->loss)) c = false;
  double charge_worst = 0.0;
  for (const auto& r : rows)
    if (r.domain == Domain::Charge) charge_worst = std::max(charge_worst, r.loss);
  return {a && b && c, fmt::format("(a) {} charge max loss {:.2f}%; (b) {} (c) {}; current loss % by sigma{}",
                                   a ? "ok" : "FAIL", charge_worst, b ? "ok" : "FAIL", c ? "ok" : "FAIL", table)};
}

// ---- 8 ---------------------------------------------------------------------

Verdict hdc_algebra() {
  RandomStream rng(8);
  std::size_t failures = 0, cases = 0;
  const std::size_t n = 1000;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t dim = 64 + rng.below(2048);
    const auto a = hdc::Hypervector::random(dim, rng);
    const auto b = hdc::Hypervector::random(dim, rng);
    const auto c = hdc::Hypervector::random(dim, rng);
    const std::size_t s = rng.below(2 * dim);
    const std::vector<hdc::Hypervector> one{a}, aab{a, a, b}, bab{b, a, b};
    const std::vector<hdc::Hypervector> abc{a, b, c};
    failures += !(hdc::bind(hdc::bind(a, b), b) == a);
    failures += !(hdc::bind(a, b) == hdc::bind(b, a));
    failures += !(hdc::bundle(one) == a);
    failures += !(hdc::bundle(aab) == a);
    failures += !(hdc::bundle(bab) == b);
    failures += !(hdc::permute(hdc::bind(a, b), s) == hdc::bind(hdc::permute(a, s), hdc::permute(b, s)));
    // Concentration: random pair ~ Bin(D, 1/2); bundle-of-3 to member ~ Bin(D, 1/4).
    const double d = static_cast<double>(dim);
    failures += !(std::abs(static_cast<double>(hdc::hamming(a, b)) - d / 2) < 5 * std::sqrt(d / 4));
    const auto m = hdc::bundle(abc);
    failures += !(std::abs(static_cast<double>(hdc::hamming(m, a)) - d / 4) < 5 * std::sqrt(d * 3 / 16));
    cases += 8;
  }
  return {failures == 0, fmt::format("{} property checks over {} random cases, {} failures", cases, n, failures)};
}

// ---- 9 ---------------------------------------------------------------------

Verdict determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "fecim_acceptance_determinism";
  fs::remove_all(root);
  std::size_t compared = 0, differing = 0;
  std::string failures;
  for (auto id : cli::kExperiments) {
    for (const char* format : {"csv", "json"}) {
      cli::ExperimentConfig cfg;
      cfg.experiment = std::string(id);
      cfg.seed = 99;
      cfg.format = format;
      if (id == "transfer-curve" || id == "sense-margin") cfg.params["trials"] = 200;
      if (id == "worst-case") cfg.params["trials"] = 5000;
      if (id == "hdc-quality") {
        cfg.params["trials"] = 2;
        cfg.params["dims"] = {512};
      }
      if (id == "map-workload")
        cfg.params["workload"] = {
            {"neural", {{{"name", "conv"}, {"rows", 147}, {"cols", 64}, {"bits", 8}, {"invocations", 2}}}},
            {"symbolic", {{{"name", "search"}, {"dim", 1024}, {"codebook_size", 16}, {"queries", 4}}}},
            {"reuse_factor", 10}};
      std::vector<std::string> outputs;
      for (int rep = 0; rep < 2; ++rep) {
        cfg.out_dir = root / fmt::format("{}_{}_{}", id, format, rep);
        const auto r = cli::run(cfg);
        if (r.exit_code != 0) {
          failures += fmt::format(" {}:{} exit {}", id, format, r.exit_code);
          break;
        }
        std::string all;
        for (const auto& f : r.files) all += io::read_file(f);
        outputs.push_back(all);
      }
      ++compared;
      if (outputs.size() != 2 || outputs[0] != outputs[1]) {
        ++differing;
        failures += fmt::format(" {}:{}", id, format);
      }
    }
  }
  fs::remove_all(root);
  return {differing == 0, fmt::format("{} experiment/format pairs rerun, {} differ{}", compared, differing, failures)};
}

// ---- 10 --------------------------------------------------------------------

Verdict mapper_feasibility() {
  ArrayConfig a;
  a.n_rows = 64;
  a.m_cols = 64;
  const std::vector<ArrayConfig> inventory(32, a);
  const cost::CostParams params;
  mapper::WorkloadSpec w;
  w.neural = {{"conv1", 147, 64, 8, 1}, {"conv2", 576, 128, 8, 1}, {"conv3", 1152, 256, 8, 1}, {"fc", 512, 128, 8, 1}};
  w.symbolic = {{"attribute-search", 1024, 32, 8}, {"rule-search", 1024, 16, 4}};
  bool ok = true;
  std::string detail;
  for (std::uint64_t reuse : {1u, 10u}) {
    w.reuse_factor = reuse;
    const auto alloc = mapper::allocate(w, inventory, params);
    std::size_t double_booked = 0, uncovered = 0;
    for (const auto& slot : alloc.slots) {
      std::set<std::size_t> used;
      for (const auto& op : slot.ops) double_booked += !used.insert(op.array).second;
    }
    std::map<std::size_t, std::set<std::size_t>> tiles;
    for (const auto& slot : alloc.slots)
      for (const auto& op : slot.ops) tiles[op.stage].insert(op.tile);
    for (std::size_t s = 0; s < alloc.stages.size(); ++s)
      uncovered += tiles[s].size() != alloc.stages[s].tiles_required() ||
                   alloc.stages[s].assigned_cells < alloc.stages[s].demand_cells;
    ok = ok && alloc.feasible && double_booked == 0 && uncovered == 0;
    detail += fmt::format("reuse {}: {} slots, double-booked {}, uncovered stages {}; ", reuse, alloc.slots.size(),
                          double_booked, uncovered);
  }
  mapper::WorkloadSpec sym;
  sym.symbolic = w.symbolic;
  const auto alloc = mapper::allocate(sym, inventory, params);
  std::size_t non_cam = 0;
  for (auto m : alloc.array_modes) non_cam += m != ArrayMode::Cam;
  ok = ok && non_cam == 0;
  detail += fmt::format("pure-symbolic non-CAM arrays {}", non_cam);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"charge-sharing readout exactness", exactness},
      {"variation immunity vs current domain", variation_immunity},
      {"worst-case activation at one half", worst_case},
      {"3-sigma sense margin", sense_margin_check},
      {"energy/latency scaling laws", scaling},
      {"CAM-backed Hamming distances", hamming_oracle},
      {"retrieval quality-loss trends", quality_trends},
      {"HDC algebra properties", hdc_algebra},
      {"byte-identical reruns", determinism},
      {"mapper feasibility", mapper_feasibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    failed += !v.pass;
    std::printf("%s criterion %zu: %s [%.2fs] %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
