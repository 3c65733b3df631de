#pragma once

// Greedy allocation of a neuro-symbolic workload (bit-sliced neural VMM stages
// plus CAM-mode symbolic search stages) onto a fixed array inventory.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fecim/allocation.hpp"
#include "fecim/cost_model.hpp"

namespace fecim::mapper {

struct NeuralStage {
  std::string name;
  std::size_t rows = 0;            // input length
  std::size_t cols = 0;            // outputs
  int bits = 8;                    // weight and activation precision
  std::uint64_t invocations = 1;
};

struct SymbolicStage {
  std::string name;
  std::size_t dim = 0;
  std::size_t codebook_size = 0;
  std::uint64_t queries = 0;       // per neural invocation, before reuse
};

struct WorkloadSpec {
  std::vector<NeuralStage> neural;
  std::vector<SymbolicStage> symbolic;
  std::uint64_t reuse_factor = 1;  // symbolic re-queries per neural result
  std::size_t max_slots = 0;       // 0 = unbounded

  /// Neural invocation count that drives the symbolic stages (1 without neural stages).
  std::uint64_t frames() const noexcept;
  std::uint64_t symbolic_invocations(const SymbolicStage& s) const noexcept;

  std::vector<std::string> diagnostics() const;
  void validate() const;
};

WorkloadSpec parse_workload(const std::string& json_text);

/// Tiles are (min n_rows) x (min m_cols) blocks, so any array can host any tile.
/// Stages are placed in descending estimated EDP; each tile goes to the
/// cheapest free array of the earliest slot that has one. A result with
/// feasible == false explains why in `infeasibility`.
TileAllocation allocate(const WorkloadSpec& spec, const std::vector<ArrayConfig>& inventory,
                        const cost::CostParams& params);

struct TraceEntry {
  std::string stage;
  std::size_t query = 0;
  std::size_t target = 0;
  std::string label;
  std::string exact_label;
  double distance = 0.0;
  double exact_distance = 0.0;
};

struct SimulationOptions {
  std::uint64_t seed = 1;
  std::size_t max_functional_queries = 64;   // per symbolic stage
  double probe_flip_fraction = 0.1;
};

struct WorkloadResult {
  cost::SystemCost cost;
  std::vector<TraceEntry> trace;
  std::size_t mismatches = 0;                // trace decisions differing from the exact oracle
};

/// Costs the whole schedule and runs up to max_functional_queries queries per
/// symbolic stage through CAM arrays built from the stage's host array config.
WorkloadResult simulate_workload(const TileAllocation& alloc, const WorkloadSpec& spec,
                                 const cost::CostParams& params, const SimulationOptions& options = {});

}  // namespace fecim::mapper
