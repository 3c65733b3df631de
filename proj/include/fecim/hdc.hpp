#pragma once

// Binary hyperdimensional computing on packed bit vectors, with an
// associative memory that can run its search through simulated CAM arrays.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "fecim/array_core.hpp"
#include "fecim/rng.hpp"
#include "fecim/sensing.hpp"

namespace fecim::hdc {

class Hypervector {
 public:
  Hypervector() = default;
  explicit Hypervector(std::size_t dim);

  static Hypervector from_bits(std::span<const std::uint8_t> bits);
  static Hypervector random(std::size_t dim, RandomStream& rng);

  std::size_t dim() const noexcept { return dim_; }
  std::uint8_t bit(std::size_t i) const noexcept {
    return static_cast<std::uint8_t>((words_[i / 64] >> (i % 64)) & 1u);
  }
  void set(std::size_t i, std::uint8_t value) noexcept;
  void flip(std::size_t i) noexcept { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }
  std::size_t weight() const noexcept;
  BitVector bits() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  Hypervector operator~() const;
  bool operator==(const Hypervector&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> words_;  // bits past dim_ are kept zero
};

/// Elementwise XOR.
Hypervector bind(const Hypervector& a, const Hypervector& b);
/// Per-bit majority over an odd number of vectors.
Hypervector bundle(std::span<const Hypervector> vs);
/// Cyclic rotation: bit i moves to (i + shift) mod dim.
Hypervector permute(const Hypervector& a, std::size_t shift);
std::size_t hamming(const Hypervector& a, const Hypervector& b);

struct SimilarityPmf {
  std::vector<std::size_t> support;   // Hamming distances, ascending
  std::vector<double> probabilities;

  double mean() const;
  std::size_t mode() const;
  double total() const;
};

/// Per-tile readout noise in units of matched cells. Current-domain tiles add
/// per-cell variance (variance = m * rel^2); charge-domain tiles follow the
/// capacitor-mismatch profile (variance = m (n - m) / n * rel^2).
struct NoiseModel {
  Domain shape = Domain::Charge;
  double rel_sigma = 0.0;

  double tile_variance(double matches, std::size_t n_rows) const;
};

/// Discretized Gaussian over total distance. `tile_matches` are the per-tile
/// match counts with padding already removed; the distance estimate is
/// dim - sum(tile_matches). A zero-spread model yields a point mass.
SimilarityPmf pmf_from_readout(std::span<const double> tile_matches, std::size_t dim, std::size_t n_rows,
                               const NoiseModel& noise);

struct CodebookEntry {
  std::string label;
  Hypervector vector;
};

struct CimBacking {
  ArrayConfig array{};
  Domain domain = Domain::Charge;
  std::uint64_t seed = 0;
  NoiseModel noise{};
};

struct QueryResult {
  std::size_t index = 0;
  std::string label;
  double distance = 0.0;                // estimated distance to the winner
  std::vector<double> distances;        // per entry
  SimilarityPmf pmf;                    // for the winner
};

class AssociativeMemory {
 public:
  static AssociativeMemory exact(std::vector<CodebookEntry> codebook);
  /// Tiles every entry down one CAM column per tile: ceil(dim / n_rows) row
  /// tiles and ceil(size / m_cols) column groups. Pad rows store '0' and are
  /// searched with '0'; their constant match count is subtracted.
  static AssociativeMemory cim(std::vector<CodebookEntry> codebook, CimBacking backing);

  std::size_t size() const noexcept { return codebook_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool is_cim() const noexcept { return backing_ != nullptr; }
  const std::vector<CodebookEntry>& codebook() const noexcept { return codebook_; }
  std::size_t tile_count() const noexcept;
  std::size_t array_count() const noexcept { return arrays_.size(); }

  /// Nearest entry, ties to the lowest index. `adc` is ignored for exact backing.
  QueryResult query(const Hypervector& probe, const AdcConfig& adc) const;
  /// Uses counting_adc, which reads 0..n_rows exactly.
  QueryResult query(const Hypervector& probe) const;

 private:
  AssociativeMemory() = default;
  QueryResult query_exact(const Hypervector& probe) const;
  QueryResult query_cim(const Hypervector& probe, const AdcConfig& adc) const;

  std::vector<CodebookEntry> codebook_;
  std::size_t dim_ = 0;
  std::unique_ptr<CimBacking> backing_;
  mutable std::vector<CimArray> arrays_;   // [tile * groups + group]
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

struct RetrievalTask {
  std::size_t target = 0;
  Hypervector probe;
};

struct RetrievalTaskSet {
  std::size_t dim = 0;
  std::vector<CodebookEntry> codebook;
  std::vector<RetrievalTask> tasks;
};

struct LevelTaskParams {
  std::size_t levels = 16;
  double spacing_fraction = 1.0 / 64.0;   // distance between adjacent levels / dim
  double flip_fraction = 0.1;             // probe corruption / dim
  std::size_t probes = 32;
};

/// Level (thermometer) codebook: level j differs from the base vector in the
/// first j * spacing positions of a random permutation, so adjacent levels are
/// a fixed, small distance apart. Probes are random levels with a fixed number
/// of random bit flips.
RetrievalTaskSet make_level_retrieval_tasks(std::size_t dim, const LevelTaskParams& params, std::uint64_t seed);

/// Random i.i.d. codebook with `count` entries labelled "0".."count-1".
std::vector<CodebookEntry> random_codebook(std::size_t dim, std::size_t count, RandomStream& rng);

}  // namespace fecim::hdc
