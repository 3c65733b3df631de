#include "fecim/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>
#include <json.hpp>

#include "fecim/error.hpp"
#include "fecim/hdc.hpp"

namespace fecim::mapper {
namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

struct PendingStage {
  StageSummary summary;
  std::size_t rows = 0;          // logical rows to cover
  std::size_t cols = 0;          // logical columns incl. bit slices
  ArrayMode mode = ArrayMode::Mac;
  std::size_t order = 0;         // declaration order, breaks EDP ties
};

}  // namespace

std::uint64_t WorkloadSpec::frames() const noexcept {
  std::uint64_t f = 0;
  for (const auto& s : neural) f = std::max(f, s.invocations);
  return neural.empty() ? 1 : f;
}

std::uint64_t WorkloadSpec::symbolic_invocations(const SymbolicStage& s) const noexcept {
  return s.queries * reuse_factor * frames();
}

std::vector<std::string> WorkloadSpec::diagnostics() const {
  std::vector<std::string> out;
  for (const auto& s : neural) {
    if (s.rows < 1 || s.cols < 1) out.push_back(fmt::format("neural stage '{}': dimensions must be positive", s.name));
    if (s.bits < 1 || s.bits > 8) out.push_back(fmt::format("neural stage '{}': bits must be in 1..8", s.name));
    if (s.invocations < 1) out.push_back(fmt::format("neural stage '{}': invocations must be >= 1", s.name));
  }
  for (const auto& s : symbolic)
    if (s.dim < 1 || s.codebook_size < 1)
      out.push_back(fmt::format("symbolic stage '{}': dimensions must be positive", s.name));
  if (reuse_factor < 1) out.push_back("reuse_factor must be >= 1");
  return out;
}

void WorkloadSpec::validate() const { throw_if_invalid(diagnostics()); }

WorkloadSpec parse_workload(const std::string& json_text) {
  const auto doc = nlohmann::json::parse(json_text);
  WorkloadSpec spec;
  for (const auto& j : doc.value("neural", nlohmann::json::array()))
    spec.neural.push_back({j.value("name", std::string("neural")), j.at("rows").get<std::size_t>(),
                           j.at("cols").get<std::size_t>(), j.value("bits", 8),
                           j.value("invocations", std::uint64_t{1})});
  for (const auto& j : doc.value("symbolic", nlohmann::json::array()))
    spec.symbolic.push_back({j.value("name", std::string("symbolic")), j.at("dim").get<std::size_t>(),
                             j.at("codebook_size").get<std::size_t>(), j.value("queries", std::uint64_t{0})});
  spec.reuse_factor = doc.value("reuse_factor", std::uint64_t{1});
  spec.max_slots = doc.value("max_slots", std::size_t{0});
  spec.validate();
  return spec;
}

TileAllocation allocate(const WorkloadSpec& spec, const std::vector<ArrayConfig>& inventory,
                        const cost::CostParams& params) {
  spec.validate();
  params.validate();
  if (inventory.empty()) throw ParameterError({"allocate: inventory is empty"});
  for (const auto& a : inventory) a.validate();

  TileAllocation alloc;
  alloc.inventory = inventory;
  alloc.tile_rows = std::min_element(inventory.begin(), inventory.end(), [](auto& a, auto& b) {
                      return a.n_rows < b.n_rows;
                    })->n_rows;
  alloc.tile_cols = std::min_element(inventory.begin(), inventory.end(), [](auto& a, auto& b) {
                      return a.m_cols < b.m_cols;
                    })->m_cols;
  const std::size_t tr = alloc.tile_rows;
  const std::size_t tc = alloc.tile_cols;

  std::vector<PendingStage> pending;
  for (const auto& s : spec.neural) {
    PendingStage p;
    p.summary.name = s.name;
    p.summary.kind = StageKind::Neural;
    p.summary.slices_per_output = static_cast<std::size_t>(s.bits);
    p.summary.invocations = s.invocations;
    p.summary.bit_cycles = static_cast<unsigned>(s.bits);
    p.rows = s.rows;
    p.cols = s.cols * static_cast<std::size_t>(s.bits);
    p.mode = ArrayMode::Mac;
    pending.push_back(p);
  }
  for (const auto& s : spec.symbolic) {
    PendingStage p;
    p.summary.name = s.name;
    p.summary.kind = StageKind::Symbolic;
    p.summary.invocations = spec.symbolic_invocations(s);
    p.rows = s.dim;
    p.cols = s.codebook_size;
    p.mode = ArrayMode::Cam;
    pending.push_back(p);
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    auto& p = pending[i];
    p.order = i;
    p.summary.row_tiles = ceil_div(p.rows, tr);
    p.summary.col_tiles = ceil_div(p.cols, tc);
    p.summary.demand_cells = p.rows * p.cols;
    // Serial execution on the smallest array as the dominance key.
    TileAssignment probe{0, 0, 0, p.mode, tr, tc, p.summary.invocations, p.summary.bit_cycles, 1.0};
    const auto& smallest = *std::min_element(inventory.begin(), inventory.end(), [](auto& a, auto& b) {
      return a.n_rows * a.m_cols < b.n_rows * b.m_cols;
    });
    const cost::CostReport r = cost::op_cost(probe, smallest, params);
    const double tiles = static_cast<double>(p.summary.tiles_required());
    p.summary.estimated_edp = r.energy * tiles * r.latency * tiles;
  }
  std::stable_sort(pending.begin(), pending.end(), [](const PendingStage& a, const PendingStage& b) {
    if (a.summary.estimated_edp != b.summary.estimated_edp) return a.summary.estimated_edp > b.summary.estimated_edp;
    return a.order < b.order;
  });

  std::vector<std::vector<bool>> busy;   // [slot][array]
  for (std::size_t si = 0; si < pending.size(); ++si) {
    auto& p = pending[si];
    for (std::size_t rt = 0; rt < p.summary.row_tiles; ++rt) {
      for (std::size_t ct = 0; ct < p.summary.col_tiles; ++ct) {
        TileAssignment op;
        op.stage = si;
        op.tile = rt * p.summary.col_tiles + ct;
        op.mode = p.mode;
        op.rows_used = std::min(tr, p.rows - rt * tr);
        op.cols_used = std::min(tc, p.cols - ct * tc);
        op.invocations = p.summary.invocations;
        op.bit_cycles = p.summary.bit_cycles;

        std::size_t slot = 0;
        while (slot < busy.size() && std::all_of(busy[slot].begin(), busy[slot].end(), [](bool b) { return b; }))
          ++slot;
        if (slot == busy.size()) {
          busy.emplace_back(inventory.size(), false);
          alloc.slots.emplace_back();
        }
        double best_edp = std::numeric_limits<double>::infinity();
        std::size_t best = inventory.size();
        for (std::size_t a = 0; a < inventory.size(); ++a) {
          if (busy[slot][a]) continue;
          const double edp = cost::op_cost(op, inventory[a], params).edp;
          if (edp < best_edp) {
            best_edp = edp;
            best = a;
          }
        }
        op.array = best;
        op.utilization = static_cast<double>(op.rows_used * op.cols_used) /
                         static_cast<double>(inventory[best].n_rows * inventory[best].m_cols);
        busy[slot][best] = true;
        alloc.slots[slot].ops.push_back(op);
        p.summary.tiles_assigned += 1;
        p.summary.assigned_cells += tr * tc;
      }
    }
  }
  for (auto& p : pending) alloc.stages.push_back(p.summary);

  if (spec.max_slots > 0 && alloc.slots.size() > spec.max_slots) {
    alloc.feasible = false;
    alloc.infeasibility = fmt::format("workload needs {} schedule slots on {} arrays; budget is {}",
                                      alloc.slots.size(), inventory.size(), spec.max_slots);
  }

  // Dominant mode per array: the mode carrying the most invocations. Idle
  // arrays follow the workload's busier stage class.
  std::uint64_t mac_total = 0;
  std::uint64_t cam_total = 0;
  for (const auto& s : alloc.stages)
    (s.kind == StageKind::Neural ? mac_total : cam_total) += s.invocations * s.tiles_required();
  const ArrayMode idle_mode = spec.neural.empty() ? ArrayMode::Cam
                              : spec.symbolic.empty() ? ArrayMode::Mac
                              : (cam_total >= mac_total ? ArrayMode::Cam : ArrayMode::Mac);
  std::vector<std::uint64_t> mac_inv(inventory.size(), 0);
  std::vector<std::uint64_t> cam_inv(inventory.size(), 0);
  std::vector<double> used(inventory.size(), 0.0);
  for (const auto& slot : alloc.slots) {
    for (const auto& op : slot.ops) {
      (op.mode == ArrayMode::Mac ? mac_inv : cam_inv)[op.array] += op.invocations;
      used[op.array] += op.utilization;
    }
  }
  alloc.array_modes.resize(inventory.size());
  alloc.utilization.resize(inventory.size());
  for (std::size_t a = 0; a < inventory.size(); ++a) {
    if (mac_inv[a] == 0 && cam_inv[a] == 0) alloc.array_modes[a] = idle_mode;
    else alloc.array_modes[a] = cam_inv[a] >= mac_inv[a] ? ArrayMode::Cam : ArrayMode::Mac;
    alloc.utilization[a] = alloc.slots.empty() ? 0.0 : used[a] / static_cast<double>(alloc.slots.size());
  }
  return alloc;
}

WorkloadResult simulate_workload(const TileAllocation& alloc, const WorkloadSpec& spec,
                                 const cost::CostParams& params, const SimulationOptions& options) {
  WorkloadResult result;
  result.cost = cost::system_cost(alloc, params);

  for (std::size_t si = 0; si < alloc.stages.size(); ++si) {
    const StageSummary& stage = alloc.stages[si];
    if (stage.kind != StageKind::Symbolic) continue;
    auto it = std::find_if(spec.symbolic.begin(), spec.symbolic.end(),
                           [&](const SymbolicStage& s) { return s.name == stage.name; });
    if (it == spec.symbolic.end()) continue;
    const std::size_t n_queries = static_cast<std::size_t>(
        std::min<std::uint64_t>(it->queries, options.max_functional_queries));
    if (n_queries == 0) continue;

    // Host geometry: the array that received this stage's first tile, cut to tile size.
    ArrayConfig host = alloc.inventory.front();
    for (const auto& slot : alloc.slots)
      for (const auto& op : slot.ops)
        if (op.stage == si && op.tile == 0) host = alloc.inventory[op.array];
    host.n_rows = alloc.tile_rows;
    host.m_cols = alloc.tile_cols;

    RandomStream rng(derive_seed(options.seed, si));
    auto codebook = hdc::random_codebook(it->dim, it->codebook_size, rng);
    const auto exact = hdc::AssociativeMemory::exact(codebook);
    const auto cim = hdc::AssociativeMemory::cim(codebook, {host, Domain::Charge, rng.next(), {}});
    const auto flips = static_cast<std::size_t>(std::round(options.probe_flip_fraction * it->dim));
    for (std::size_t q = 0; q < n_queries; ++q) {
      const std::size_t target = rng.below(codebook.size());
      hdc::Hypervector probe = codebook[target].vector;
      for (std::size_t f = 0; f < flips; ++f) probe.flip(rng.below(it->dim));
      const auto noisy = cim.query(probe);
      const auto ideal = exact.query(probe);
      result.trace.push_back({stage.name, q, target, noisy.label, ideal.label, noisy.distance, ideal.distance});
      if (noisy.index != ideal.index) ++result.mismatches;
    }
  }
  return result;
}

}  // namespace fecim::mapper
