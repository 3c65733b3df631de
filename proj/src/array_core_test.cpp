#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fecim/array_core.hpp"
#include "fecim/error.hpp"
#include "fecim/rng.hpp"

using namespace fecim;

namespace {

BitGrid random_grid(std::size_t rows, std::size_t cols, RandomStream& rng) {
  BitGrid g(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) g.set(r, c, rng.bit());
  return g;
}

BitVector random_bits(std::size_t n, RandomStream& rng) {
  BitVector v(n);
  for (auto& b : v) b = rng.bit();
  return v;
}

// Explicit per-cell bookkeeping: which caps end up at v_work, then total
// charge over total capacitance, then the offset and rail clamp.
double oracle_v_bl(const ArrayConfig& cfg, const std::vector<double>& caps, const std::vector<bool>& charged) {
  double q = 0.0, c_total = cfg.c_para;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    q += (charged[i] ? cfg.v_work : 0.0) * caps[i];
    c_total += caps[i];
  }
  const double v = q / c_total + cfg.delta_offset;
  return v < 0 ? 0 : (v > cfg.v_work ? cfg.v_work : v);
}

}  // namespace

TEST_CASE("charge_share examples") {
  const std::vector<double> full{0.5, 0.5}, caps2{1e-15, 1e-15};
  CHECK(charge_share(full, caps2, 0.0) == 0.5);
  const std::vector<double> half{0.5, 0.0};
  CHECK(charge_share(half, caps2, 0.0) == 0.25);
  const std::vector<double> v{0.5, 0.5, 0.0}, c{1.0e-15, 1.1e-15, 0.9e-15};
  CHECK(charge_share(v, c, 0.5e-15) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK_THROWS_AS(charge_share(v, caps2, 0.0), DimensionError);
}

TEST_CASE("charge_share conserves charge and never exceeds its inputs") {
  RandomStream rng(1);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<double> v(n), c(n);
    double q = 0, ct = 0, vmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = rng.uniform();
      c[i] = 1e-15 * (0.5 + rng.uniform());
      q += v[i] * c[i];
      ct += c[i];
      vmax = std::max(vmax, v[i]);
    }
    const double cp = 1e-15 * rng.uniform();
    const double out = charge_share(v, c, cp);
    CHECK(out == doctest::Approx(q / (ct + cp)).epsilon(1e-13));
    CHECK(out <= vmax);
  }
}

TEST_CASE("2x2 all ones builds identical LVT cells") {
  ArrayConfig cfg;
  cfg.n_rows = 2;
  cfg.m_cols = 2;
  BitGrid g(2, 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) g.set(r, c, 1);
  auto a = CimArray::build(cfg, g, 9);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(a.cell(r, c) == FeFetCell{1, 0.3, 1e-15});
}

TEST_CASE("build is reproducible and matches device statistics") {
  ArrayConfig cfg;
  cfg.device.sigma_vth = 0.054;
  RandomStream rng(2);
  const BitGrid g = random_grid(64, 8, rng);
  auto a = CimArray::build(cfg, g, 77);
  auto b = CimArray::build(cfg, g, 77);
  double s = 0, sq = 0;
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(a.cell(r, c) == b.cell(r, c));
      const double d = a.cell(r, c).vth_sampled - cfg.device.state_mean(g(r, c));
      s += d;
      sq += d * d;
    }
  const double n = 512;
  const double sd = std::sqrt((sq - s * s / n) / (n - 1));
  // 512 samples: relative standard error of the std is about 3%.
  CHECK(std::abs(sd - 0.054) < 0.054 * 0.15);
  CHECK(std::abs(s / n) < 4 * 0.054 / std::sqrt(n));
}

TEST_CASE("cam_search follows the closed form and the bookkeeping oracle") {
  ArrayConfig cfg;
  cfg.n_rows = 8;
  cfg.m_cols = 1;
  for (std::size_t k = 0; k <= 8; ++k) {
    BitGrid g(8, 1);
    BitVector q(8, 0);
    for (std::size_t r = 0; r < 8; ++r) {
      g.set(r, 0, r % 2);
      q[r] = r < k ? (r % 2) : 1 - (r % 2);
    }
    auto a = CimArray::build(cfg, g, 1);
    const auto out = a.cam_search(q);
    const double expect = cfg.v_work * k * 1e-15 / (8e-15 + cfg.c_para) + cfg.delta_offset;
    CHECK(out.v_bl[0] == doctest::Approx(expect).epsilon(1e-13));
    CHECK(out.charged_cells[0] == k);
    CHECK(out.step_count == 3);
    std::vector<bool> charged(8);
    for (std::size_t r = 0; r < 8; ++r) charged[r] = r < k;
    CHECK(out.v_bl[0] == oracle_v_bl(cfg, std::vector<double>(8, 1e-15), charged));
  }
}

TEST_CASE("cam_search full match without parasitics reaches v_work") {
  ArrayConfig cfg;
  cfg.n_rows = 8;
  cfg.m_cols = 8;
  cfg.c_para = 0;
  cfg.delta_offset = 0;
  RandomStream rng(4);
  const BitGrid g = random_grid(8, 8, rng);
  auto a = CimArray::build(cfg, g, 1);
  const auto col = g.column(3);
  const auto out = a.cam_search(col);
  CHECK(out.v_bl[3] == cfg.v_work);
  CHECK(out.charged_cells[3] == 8);
  a.reset();
  BitVector inv(col);
  for (auto& b : inv) b = 1 - b;
  CHECK(a.cam_search(inv).charged_cells[3] == 0);
}

TEST_CASE("charged cells equal XNOR and AND counts") {
  ArrayConfig cfg;
  cfg.n_rows = 32;
  cfg.m_cols = 6;
  RandomStream rng(8);
  for (int t = 0; t < 200; ++t) {
    const BitGrid g = random_grid(32, 6, rng);
    auto a = CimArray::build(cfg, g, t);
    const BitVector q = random_bits(32, rng);
    const auto cam = a.cam_search(q);
    a.reset();
    const auto mac = a.mac(q);
    for (std::size_t c = 0; c < 6; ++c) {
      std::size_t match = 0, dot = 0;
      for (std::size_t r = 0; r < 32; ++r) {
        match += q[r] == g(r, c);
        dot += q[r] & g(r, c);
      }
      CHECK(cam.charged_cells[c] == match);
      CHECK(mac.charged_cells[c] == dot);
      CHECK(mac.v_bl[c] == doctest::Approx(cfg.v_work * dot * 1e-15 / (32e-15 + cfg.c_para) +
                                           cfg.delta_offset).epsilon(1e-13));
    }
  }
}

TEST_CASE("mac with variance stays within the bookkeeping oracle") {
  ArrayConfig cfg = ArrayConfig::wide_window();
  cfg.n_rows = 16;
  cfg.m_cols = 4;
  cfg.device.sigma_vth = 0.1;
  cfg.device.sigma_cm_rel = 0.1;
  RandomStream rng(12);
  for (int t = 0; t < 100; ++t) {
    const BitGrid g = random_grid(16, 4, rng);
    auto a = CimArray::build(cfg, g, 100 + t);
    const BitVector in = random_bits(16, rng);
    const auto out = a.mac(in);
    for (std::size_t c = 0; c < 4; ++c) {
      std::vector<double> caps(16);
      std::vector<bool> charged(16);
      for (std::size_t r = 0; r < 16; ++r) {
        caps[r] = a.cell(r, c).c_m_sampled;
        charged[r] = in[r] && g(r, c);
      }
      CHECK(out.v_bl[c] == doctest::Approx(oracle_v_bl(cfg, caps, charged)).epsilon(1e-13));
    }
  }
}

TEST_CASE("all-zero input gives the offset only") {
  ArrayConfig cfg;
  RandomStream rng(5);
  auto a = CimArray::build(cfg, random_grid(64, 8, rng), 3);
  const auto out = a.mac(BitVector(64, 0));
  for (std::size_t c = 0; c < 8; ++c) {
    CHECK(out.charged_cells[c] == 0);
    CHECK(out.v_bl[c] == cfg.delta_offset);
  }
  for (double i : a.current_domain_mac(BitVector(64, 0))) CHECK(i == 0.0);
}

TEST_CASE("reset clears capacitors and ops require it") {
  ArrayConfig cfg;
  RandomStream rng(6);
  auto a = CimArray::build(cfg, random_grid(64, 8, rng), 3);
  CHECK(a.is_reset());
  a.cam_search(random_bits(64, rng));
  CHECK_FALSE(a.is_reset());
  CHECK_THROWS_AS(a.mac(BitVector(64, 1)), StateError);
  a.reset();
  a.reset();
  CHECK(a.is_reset());
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 8; ++c) CHECK(a.cap_voltage(r, c) == 0.0);
  CHECK(a.mac(BitVector(64, 0)).v_bl[0] == cfg.delta_offset);
  a.reset();
  CHECK_THROWS_AS(a.mac(BitVector(63, 0)), DimensionError);
}

TEST_CASE("capacitor voltages stay within the rails") {
  ArrayConfig cfg = ArrayConfig::wide_window();
  cfg.device.sigma_vth = 0.3;
  cfg.device.sigma_cm_rel = 0.2;
  RandomStream rng(7);
  auto a = CimArray::build(cfg, random_grid(64, 8, rng), 5);
  for (int t = 0; t < 20; ++t) {
    const auto out = t % 2 ? a.cam_search(random_bits(64, rng)) : a.mac(random_bits(64, rng));
    for (std::size_t r = 0; r < 64; ++r)
      for (std::size_t c = 0; c < 8; ++c) {
        CHECK(a.cap_voltage(r, c) >= 0.0);
        CHECK(a.cap_voltage(r, c) <= cfg.v_work);
      }
    for (double v : out.v_bl) CHECK((v >= 0.0 && v <= cfg.v_work));
    a.reset();
  }
}

TEST_CASE("variation immunity when the wordlines clear both tails") {
  ArrayConfig base = ArrayConfig::wide_window();
  RandomStream rng(13);
  const BitGrid g = random_grid(64, 8, rng);
  auto ideal = CimArray::build(base, g, 1);
  ArrayConfig noisy = base;
  noisy.device.sigma_vth = 0.17;
  for (int t = 0; t < 50; ++t) {
    auto a = CimArray::build(noisy, g, 1000 + t);
    const BitVector q = random_bits(64, rng);
    ideal.reset();
    CHECK(a.cam_search(q).v_bl == ideal.cam_search(q).v_bl);
    a.reset();
    ideal.reset();
    CHECK(a.mac(q).v_bl == ideal.mac(q).v_bl);
  }
}

TEST_CASE("a mis-switched LVT cell fails to charge") {
  ArrayConfig cfg;
  cfg.n_rows = 4;
  cfg.m_cols = 1;
  std::vector<FeFetCell> cells(4, FeFetCell{1, 0.3, 1e-15});
  cells[2].vth_sampled = 1.05;  // above v_wl1
  auto a = CimArray::from_cells(cfg, cells);
  CHECK(a.mac(BitVector(4, 1)).charged_cells[0] == 3);
}

TEST_CASE("columns are independent") {
  ArrayConfig cfg;
  cfg.device.sigma_vth = 0.054;
  cfg.device.sigma_cm_rel = 0.05;
  RandomStream rng(21);
  BitGrid g = random_grid(64, 8, rng);
  auto a = CimArray::build(cfg, g, 5);
  const BitVector q = random_bits(64, rng);
  const auto before = a.cam_search(q);
  a.reset();
  for (std::size_t r = 0; r < 64; ++r) a.set_cell(r, 5, FeFetCell{1, 0.2, 3e-15});
  const auto after = a.cam_search(q);
  for (std::size_t c = 0; c < 8; ++c)
    if (c != 5) CHECK(after.v_bl[c] == before.v_bl[c]);
}

TEST_CASE("current domain is proportional to the dot product at zero variance") {
  ArrayConfig cfg;
  RandomStream rng(31);
  const BitGrid g = random_grid(64, 8, rng);
  auto a = CimArray::build(cfg, g, 1);
  const BitVector in = random_bits(64, rng);
  const auto i = a.current_domain_mac(in);
  for (std::size_t c = 0; c < 8; ++c) {
    std::size_t dot = 0;
    for (std::size_t r = 0; r < 64; ++r) dot += in[r] & g(r, c);
    CHECK(i[c] == doctest::Approx(dot * cfg.unit_current()).epsilon(1e-13));
  }
}

TEST_CASE("current domain spread dwarfs charge domain spread at 170 mV") {
  ArrayConfig cfg = ArrayConfig::wide_window();
  cfg.n_rows = 64;
  cfg.m_cols = 1;
  cfg.device.sigma_vth = 0.17;
  RandomStream rng(41);
  BitGrid g(64, 1);
  BitVector in(64, 0);
  for (std::size_t r = 0; r < 32; ++r) {
    g.set(r, 0, 1);
    in[r] = 1;
  }
  std::vector<double> iv, vv;
  for (int t = 0; t < 2000; ++t) {
    auto a = CimArray::build(cfg, g, 500 + t);
    iv.push_back(a.current_domain_mac(in)[0]);
    vv.push_back(a.mac(in).v_bl[0]);
  }
  auto rel = [](const std::vector<double>& x) {
    double s = 0, q = 0;
    for (double v : x) s += v;
    const double m = s / x.size();
    for (double v : x) q += (v - m) * (v - m);
    return std::sqrt(q / (x.size() - 1)) / m;
  };
  const double r_cur = rel(iv);
  const double r_chg = rel(vv);
  CHECK(r_cur > 0.01);
  CHECK(r_cur >= 5 * r_chg);
}

TEST_CASE("config diagnostics list every problem") {
  ArrayConfig cfg;
  cfg.v_work = 0;
  cfg.c_para = -1;
  cfg.n_rows = 0;
  CHECK(cfg.diagnostics().size() == 3);
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  CHECK(ArrayConfig{}.diagnostics().empty());
  CHECK(ArrayConfig::wide_window().diagnostics().empty());
}
