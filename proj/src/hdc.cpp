#include "fecim/hdc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/core.h>

#include "fecim/error.hpp"

namespace fecim::hdc {
namespace {

void require_same_dim(const Hypervector& a, const Hypervector& b, const char* op) {
  if (a.dim() != b.dim()) throw DimensionError(fmt::format("{}: dim {} vs {}", op, a.dim(), b.dim()));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

Hypervector::Hypervector(std::size_t dim) : dim_(dim), words_((dim + 63) / 64, 0) {}

Hypervector Hypervector::from_bits(std::span<const std::uint8_t> bits) {
  Hypervector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) v.set(i, 1);
  return v;
}

Hypervector Hypervector::random(std::size_t dim, RandomStream& rng) {
  Hypervector v(dim);
  for (auto& w : v.words_) w = rng.next();
  if (dim % 64) v.words_.back() &= (std::uint64_t{1} << (dim % 64)) - 1;
  return v;
}

void Hypervector::set(std::size_t i, std::uint8_t value) noexcept {
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  if (value) words_[i / 64] |= mask;
  else words_[i / 64] &= ~mask;
}

std::size_t Hypervector::weight() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BitVector Hypervector::bits() const {
  BitVector out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = bit(i);
  return out;
}

Hypervector Hypervector::operator~() const {
  Hypervector v = *this;
  for (auto& w : v.words_) w = ~w;
  if (dim_ % 64) v.words_.back() &= (std::uint64_t{1} << (dim_ % 64)) - 1;
  return v;
}

Hypervector bind(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b, "bind");
  Hypervector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out.set(i, a.bit(i) ^ b.bit(i));
  return out;
}

Hypervector bundle(std::span<const Hypervector> vs) {
  if (vs.empty() || vs.size() % 2 == 0)
    throw ParameterError({fmt::format("bundle: need an odd number of vectors (got {})", vs.size())});
  const std::size_t dim = vs.front().dim();
  for (const auto& v : vs) require_same_dim(vs.front(), v, "bundle");
  Hypervector out(dim);
  const std::size_t half = vs.size() / 2;
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t ones = 0;
    for (const auto& v : vs) ones += v.bit(i);
    if (ones > half) out.set(i, 1);
  }
  return out;
}

Hypervector permute(const Hypervector& a, std::size_t shift) {
  const std::size_t dim = a.dim();
  Hypervector out(dim);
  if (dim == 0) return out;
  shift %= dim;
  for (std::size_t i = 0; i < dim; ++i)
    if (a.bit(i)) out.set((i + shift) % dim, 1);
  return out;
}

std::size_t hamming(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b, "hamming");
  std::size_t d = 0;
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

double SimilarityPmf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += static_cast<double>(support[i]) * probabilities[i];
  return m;
}

std::size_t SimilarityPmf::mode() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probabilities.size(); ++i)
    if (probabilities[i] > probabilities[best]) best = i;
  return support.at(best);
}

double SimilarityPmf::total() const { return std::accumulate(probabilities.begin(), probabilities.end(), 0.0); }

double NoiseModel::tile_variance(double matches, std::size_t n_rows) const {
  const double n = static_cast<double>(n_rows);
  const double m = std::clamp(matches, 0.0, n);
  const double r2 = rel_sigma * rel_sigma;
  return shape == Domain::Current ? m * r2 : m * (n - m) / n * r2;
}

SimilarityPmf pmf_from_readout(std::span<const double> tile_matches, std::size_t dim, std::size_t n_rows,
                               const NoiseModel& noise) {
  double matches = 0.0;
  double variance = 0.0;
  for (double m : tile_matches) {
    matches += m;
    variance += noise.tile_variance(m, n_rows);
  }
  const double d_max = static_cast<double>(dim);
  const double mu = std::clamp(d_max - matches, 0.0, d_max);
  SimilarityPmf pmf;
  if (!(variance > 0.0)) {
    pmf.support = {static_cast<std::size_t>(std::floor(mu + 0.5))};
    pmf.probabilities = {1.0};
    return pmf;
  }
  const double sigma = std::sqrt(variance);
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(mu - 10.0 * sigma)));
  const auto hi = static_cast<std::size_t>(std::min(d_max, std::ceil(mu + 10.0 * sigma)));
  double total = 0.0;
  for (std::size_t d = lo; d <= hi; ++d) {
    // The end bins absorb the tails beyond the support.
    const double upper = d == dim ? 1.0 : normal_cdf((static_cast<double>(d) + 0.5 - mu) / sigma);
    const double lower = d == 0 ? 0.0 : normal_cdf((static_cast<double>(d) - 0.5 - mu) / sigma);
    const double p = std::max(0.0, upper - lower);
    if (p <= 0.0) continue;
    pmf.support.push_back(d);
    pmf.probabilities.push_back(p);
    total += p;
  }
  if (pmf.support.empty()) {
    pmf.support = {static_cast<std::size_t>(std::floor(mu + 0.5))};
    pmf.probabilities = {1.0};
    return pmf;
  }
  for (auto& p : pmf.probabilities) p /= total;
  return pmf;
}

namespace {

void validate_codebook(const std::vector<CodebookEntry>& codebook) {
  std::set<std::string> labels;
  for (const auto& e : codebook) {
    if (e.vector.dim() != codebook.front().vector.dim())
      throw DimensionError("codebook entries must share one dimension");
    if (e.vector.dim() == 0) throw DimensionError("hypervector dim must be >= 1");
    if (!labels.insert(e.label).second) throw ParameterError({fmt::format("duplicate label '{}'", e.label)});
  }
}

}  // namespace

AssociativeMemory AssociativeMemory::exact(std::vector<CodebookEntry> codebook) {
  validate_codebook(codebook);
  AssociativeMemory mem;
  mem.dim_ = codebook.empty() ? 0 : codebook.front().vector.dim();
  mem.codebook_ = std::move(codebook);
  return mem;
}

AssociativeMemory AssociativeMemory::cim(std::vector<CodebookEntry> codebook, CimBacking backing) {
  backing.array.validate();
  AssociativeMemory mem = exact(std::move(codebook));
  mem.backing_ = std::make_unique<CimBacking>(std::move(backing));
  const auto& cfg = mem.backing_->array;
  const std::size_t n = cfg.n_rows;
  const std::size_t m = cfg.m_cols;
  const std::size_t tiles = mem.tile_count();
  const std::size_t groups = (mem.size() + m - 1) / m;
  mem.arrays_.reserve(tiles * groups);
  for (std::size_t t = 0; t < tiles; ++t) {
    for (std::size_t g = 0; g < groups; ++g) {
      BitGrid weights(n, m);
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t e = g * m + c;
        if (e >= mem.size()) break;
        for (std::size_t r = 0; r < n; ++r) {
          const std::size_t i = t * n + r;
          if (i < mem.dim_) weights.set(r, c, mem.codebook_[e].vector.bit(i));
        }
      }
      mem.arrays_.push_back(CimArray::build(cfg, weights, derive_seed(mem.backing_->seed, t, g)));
    }
  }
  return mem;
}

std::size_t AssociativeMemory::tile_count() const noexcept {
  if (!backing_) return 0;
  const std::size_t n = backing_->array.n_rows;
  return (dim_ + n - 1) / n;
}

QueryResult AssociativeMemory::query(const Hypervector& probe) const {
  if (!backing_) return query(probe, AdcConfig{});
  const auto& cfg = backing_->array;
  return query(probe, counting_adc(cfg));
}

QueryResult AssociativeMemory::query(const Hypervector& probe, const AdcConfig& adc) const {
  if (codebook_.empty()) throw ParameterError({"query on an empty codebook"});
  if (probe.dim() != dim_) throw DimensionError(fmt::format("probe dim {} != codebook dim {}", probe.dim(), dim_));
  return backing_ ? query_cim(probe, adc) : query_exact(probe);
}

QueryResult AssociativeMemory::query_exact(const Hypervector& probe) const {
  QueryResult res;
  res.distances.resize(size());
  for (std::size_t e = 0; e < size(); ++e) {
    res.distances[e] = static_cast<double>(hamming(probe, codebook_[e].vector));
    if (res.distances[e] < res.distances[res.index]) res.index = e;
  }
  res.label = codebook_[res.index].label;
  res.distance = res.distances[res.index];
  res.pmf.support = {static_cast<std::size_t>(res.distance)};
  res.pmf.probabilities = {1.0};
  return res;
}

QueryResult AssociativeMemory::query_cim(const Hypervector& probe, const AdcConfig& adc) const {
  adc.validate();
  const auto& cfg = backing_->array;
  const std::size_t n = cfg.n_rows;
  const std::size_t m = cfg.m_cols;
  const std::size_t tiles = tile_count();
  const std::size_t groups = (size() + m - 1) / m;
  const double unit_current = cfg.unit_current();
  const double unit_step = cfg.unit_step();

  std::vector<std::vector<double>> matches(size(), std::vector<double>(tiles, 0.0));
  BitVector query(n);
  std::lock_guard lock(*mutex_);
  for (std::size_t t = 0; t < tiles; ++t) {
    std::size_t pad = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t i = t * n + r;
      if (i < dim_) {
        query[r] = probe.bit(i);
      } else {
        query[r] = 0;
        ++pad;
      }
    }
    for (std::size_t g = 0; g < groups; ++g) {
      CimArray& array = arrays_[t * groups + g];
      std::vector<double> v_bl;
      if (backing_->domain == Domain::Charge) {
        array.reset();
        v_bl = array.cam_search(query).v_bl;
        array.reset();
      } else {
        v_bl = array.current_domain_cam(query);
        for (auto& v : v_bl) v = cfg.delta_offset + v / unit_current * unit_step;
      }
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t e = g * m + c;
        if (e >= size()) break;
        matches[e][t] = code_to_count(quantize(v_bl[c], adc), adc, cfg) - static_cast<double>(pad);
      }
    }
  }

  QueryResult res;
  res.distances.resize(size());
  for (std::size_t e = 0; e < size(); ++e) {
    res.distances[e] = static_cast<double>(dim_) - std::accumulate(matches[e].begin(), matches[e].end(), 0.0);
    if (res.distances[e] < res.distances[res.index]) res.index = e;
  }
  res.label = codebook_[res.index].label;
  res.distance = res.distances[res.index];
  res.pmf = pmf_from_readout(matches[res.index], dim_, n, backing_->noise);
  return res;
}

std::vector<CodebookEntry> random_codebook(std::size_t dim, std::size_t count, RandomStream& rng) {
  std::vector<CodebookEntry> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back({std::to_string(i), Hypervector::random(dim, rng)});
  return out;
}

RetrievalTaskSet make_level_retrieval_tasks(std::size_t dim, const LevelTaskParams& params, std::uint64_t seed) {
  const auto spacing = static_cast<std::size_t>(std::max(1.0, std::round(params.spacing_fraction * dim)));
  const auto flips = static_cast<std::size_t>(std::round(params.flip_fraction * dim));
  std::vector<std::string> problems;
  if (params.levels < 2) problems.push_back("levels must be >= 2");
  if ((params.levels - 1) * spacing > dim) problems.push_back("levels * spacing exceeds the dimension");
  if (flips > dim) problems.push_back("flip_fraction must be <= 1");
  throw_if_invalid(std::move(problems));

  RandomStream rng(seed);
  RetrievalTaskSet set;
  set.dim = dim;
  const Hypervector base = Hypervector::random(dim, rng);
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order.begin(), order.end());
  for (std::size_t j = 0; j < params.levels; ++j) {
    Hypervector level = base;
    for (std::size_t i = 0; i < j * spacing; ++i) level.flip(order[i]);
    set.codebook.push_back({fmt::format("level{}", j), std::move(level)});
  }

  std::vector<std::size_t> positions(dim);
  for (std::size_t p = 0; p < params.probes; ++p) {
    RetrievalTask task;
    task.target = rng.below(params.levels);
    task.probe = set.codebook[task.target].vector;
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    for (std::size_t i = 0; i < flips; ++i) {
      std::swap(positions[i], positions[i + rng.below(dim - i)]);
      task.probe.flip(positions[i]);
    }
    set.tasks.push_back(std::move(task));
  }
  return set;
}

}  // namespace fecim::hdc
