#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "fecim/error.hpp"
#include "fecim/mapper.hpp"

using namespace fecim;
using namespace fecim::mapper;

namespace {

std::vector<ArrayConfig> inventory(std::size_t count, std::size_t n = 64, std::size_t m = 64) {
  ArrayConfig a;
  a.n_rows = n;
  a.m_cols = m;
  return std::vector<ArrayConfig>(count, a);
}

WorkloadSpec neuro_symbolic(std::uint64_t reuse) {
  WorkloadSpec w;
  w.neural = {{"conv1", 147, 64, 8, 4}, {"conv2", 576, 64, 8, 4}, {"fc", 512, 10, 8, 4}};
  w.symbolic = {{"attributes", 1024, 16, 6}, {"rules", 1024, 8, 3}};
  w.reuse_factor = reuse;
  return w;
}

// Independent checks of the allocation contract.
void check_contract(const TileAllocation& a) {
  for (const auto& slot : a.slots) {
    std::set<std::size_t> arrays;
    for (const auto& op : slot.ops) CHECK(arrays.insert(op.array).second);  // one op per array per slot
  }
  std::map<std::size_t, std::set<std::size_t>> tiles;
  for (const auto& slot : a.slots)
    for (const auto& op : slot.ops) CHECK(tiles[op.stage].insert(op.tile).second);
  for (std::size_t s = 0; s < a.stages.size(); ++s) {
    const auto& st = a.stages[s];
    CHECK(tiles[s].size() == st.tiles_required());
    CHECK(st.assigned_cells >= st.demand_cells);
  }
}

}  // namespace

TEST_CASE("8-bit 64x64 layer needs 8 slices per output") {
  WorkloadSpec w;
  w.neural = {{"layer", 64, 64, 8, 1}};
  const auto a = allocate(w, inventory(16), cost::CostParams{});
  REQUIRE(a.stages.size() == 1);
  CHECK(a.stages[0].slices_per_output == 8);
  CHECK(a.stages[0].row_tiles == 1);
  CHECK(a.stages[0].col_tiles == 8);   // 64 outputs x 8 slices over 64 columns
  CHECK(a.stages[0].demand_cells == 64 * 64 * 8);
  CHECK(a.slots.size() == 1);
  check_contract(a);
}

TEST_CASE("pure symbolic workload is all CAM") {
  WorkloadSpec w;
  w.symbolic = {{"search", 2048, 32, 10}};
  const auto a = allocate(w, inventory(8), cost::CostParams{});
  for (auto m : a.array_modes) CHECK(m == ArrayMode::Cam);
  check_contract(a);
}

TEST_CASE("reuse drives CAM invocations past MAC invocations") {
  const auto w = neuro_symbolic(10);
  const auto a = allocate(w, inventory(32), cost::CostParams{});
  check_contract(a);
  std::uint64_t max_mac = 0, min_cam = UINT64_MAX;
  for (const auto& slot : a.slots)
    for (const auto& op : slot.ops) {
      if (op.mode == ArrayMode::Mac) max_mac = std::max(max_mac, op.invocations);
      else min_cam = std::min(min_cam, op.invocations);
    }
  CHECK(min_cam >= 10 * max_mac);
}

TEST_CASE("small inventories serialize into more slots") {
  const auto w = neuro_symbolic(1);
  const auto big = allocate(w, inventory(64), cost::CostParams{});
  const auto small = allocate(w, inventory(3), cost::CostParams{});
  CHECK(small.slots.size() > big.slots.size());
  check_contract(small);
  for (const auto& slot : small.slots) CHECK(slot.ops.size() <= 3);
}

TEST_CASE("mixed inventory tiles by the smallest geometry") {
  auto inv = inventory(2, 128, 64);
  auto small = inventory(2, 32, 16);
  inv.insert(inv.end(), small.begin(), small.end());
  const auto a = allocate(neuro_symbolic(2), inv, cost::CostParams{});
  CHECK(a.tile_rows == 32);
  CHECK(a.tile_cols == 16);
  check_contract(a);
}

TEST_CASE("slot budget makes a workload infeasible") {
  auto w = neuro_symbolic(1);
  w.max_slots = 1;
  const auto a = allocate(w, inventory(2), cost::CostParams{});
  CHECK_FALSE(a.feasible);
  CHECK_FALSE(a.infeasibility.empty());
}

TEST_CASE("allocation is deterministic") {
  const auto w = neuro_symbolic(3);
  const auto a = allocate(w, inventory(10), cost::CostParams{});
  const auto b = allocate(w, inventory(10), cost::CostParams{});
  REQUIRE(a.slots.size() == b.slots.size());
  for (std::size_t s = 0; s < a.slots.size(); ++s) {
    REQUIRE(a.slots[s].ops.size() == b.slots[s].ops.size());
    for (std::size_t i = 0; i < a.slots[s].ops.size(); ++i) {
      CHECK(a.slots[s].ops[i].array == b.slots[s].ops[i].array);
      CHECK(a.slots[s].ops[i].stage == b.slots[s].ops[i].stage);
      CHECK(a.slots[s].ops[i].tile == b.slots[s].ops[i].tile);
    }
  }
}

TEST_CASE("symbolic invocation count") {
  auto w = neuro_symbolic(10);
  CHECK(w.frames() == 4);
  CHECK(w.symbolic_invocations(w.symbolic[0]) == 6 * 10 * 4);
  w.neural.clear();
  CHECK(w.frames() == 1);
}

TEST_CASE("workload parsing and validation") {
  const auto w = parse_workload(R"({"neural":[{"name":"l","rows":64,"cols":10}],
                                    "symbolic":[{"name":"s","dim":512,"codebook_size":8,"queries":2}],
                                    "reuse_factor":5})");
  CHECK(w.neural[0].bits == 8);
  CHECK(w.symbolic[0].queries == 2);
  CHECK(w.reuse_factor == 5);
  CHECK_THROWS_AS(parse_workload(R"({"neural":[{"rows":0,"cols":1}]})"), ParameterError);
  CHECK_THROWS_AS(allocate(w, {}, cost::CostParams{}), ParameterError);
}

TEST_CASE("symbolic cost scales with queries and vanishes without them") {
  WorkloadSpec w;
  w.symbolic = {{"s", 512, 16, 0}};
  cost::CostParams p;
  const auto zero = simulate_workload(allocate(w, inventory(8), p), w, p);
  CHECK(zero.cost.report.energy == 0.0);
  CHECK(zero.trace.empty());
  w.symbolic[0].queries = 5;
  const auto five = simulate_workload(allocate(w, inventory(8), p), w, p);
  w.symbolic[0].queries = 10;
  const auto ten = simulate_workload(allocate(w, inventory(8), p), w, p);
  CHECK(ten.cost.report.energy == doctest::Approx(2 * five.cost.report.energy));
}

TEST_CASE("functional trace matches the exact oracle at zero variance") {
  const auto w = neuro_symbolic(2);
  cost::CostParams p;
  const auto a = allocate(w, inventory(16), p);
  SimulationOptions opt;
  opt.seed = 5;
  const auto r = simulate_workload(a, w, p, opt);
  CHECK(r.trace.size() == 9);
  CHECK(r.mismatches == 0);
  for (const auto& t : r.trace) CHECK(t.distance == t.exact_distance);
  CHECK(r.cost.report.energy > 0.0);
  CHECK(r.cost.reference.gpu_speedup_resnet18 == 2.5);
}
