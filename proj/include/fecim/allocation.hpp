#pragma once

// Result of mapping a workload onto a dual-mode array inventory. Shared by the
// mapper (producer) and the cost model (consumer).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fecim/array_core.hpp"

namespace fecim {

enum class ArrayMode { Idle, Mac, Cam };
enum class StageKind { Neural, Symbolic };

std::string to_string(ArrayMode mode);
std::string to_string(StageKind kind);

struct TileAssignment {
  std::size_t array = 0;
  std::size_t stage = 0;          // index into TileAllocation::stages
  std::size_t tile = 0;           // tile index within the stage
  ArrayMode mode = ArrayMode::Idle;
  std::size_t rows_used = 0;
  std::size_t cols_used = 0;
  std::uint64_t invocations = 0;  // stage executions
  unsigned bit_cycles = 1;        // bit-serial input passes per execution
  double utilization = 0.0;       // used cells / array cells
};

struct ScheduleSlot {
  std::vector<TileAssignment> ops;
};

struct StageSummary {
  std::string name;
  StageKind kind = StageKind::Neural;
  std::size_t row_tiles = 0;
  std::size_t col_tiles = 0;
  std::size_t slices_per_output = 1;   // weight bit-slices per logical output column
  std::size_t demand_cells = 0;        // rows x (cols x slices)
  std::size_t assigned_cells = 0;      // capacity of the arrays it was given
  std::size_t tiles_assigned = 0;
  std::uint64_t invocations = 0;
  unsigned bit_cycles = 1;
  double estimated_edp = 0.0;

  std::size_t tiles_required() const noexcept { return row_tiles * col_tiles; }
};

struct TileAllocation {
  std::vector<ArrayConfig> inventory;
  std::size_t tile_rows = 0;
  std::size_t tile_cols = 0;
  std::vector<ArrayMode> array_modes;       // dominant mode per array
  std::vector<double> utilization;          // per array, averaged over slots
  std::vector<StageSummary> stages;         // in allocation order
  std::vector<ScheduleSlot> slots;
  bool feasible = true;
  std::string infeasibility;
};

}  // namespace fecim
