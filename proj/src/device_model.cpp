#include "fecim/device_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "fecim/error.hpp"

namespace fecim {

std::vector<std::string> DeviceParams::diagnostics() const {
  std::vector<std::string> out;
  if (!(vth_hvt_mean > vth_lvt_mean))
    out.push_back(fmt::format("memory window must be positive (vth_hvt_mean {} <= vth_lvt_mean {})",
                              vth_hvt_mean, vth_lvt_mean));
  if (!(sigma_vth >= 0.0)) out.push_back("sigma_vth must be >= 0");
  if (!(sigma_cm_rel >= 0.0)) out.push_back("sigma_cm_rel must be >= 0");
  if (!(c_m_mean > 0.0)) out.push_back("c_m_mean must be > 0");
  if (!(on_off_ratio > 0.0)) out.push_back("on_off_ratio must be > 0");
  return out;
}

bool DeviceParams::valid() const noexcept {
  return vth_hvt_mean > vth_lvt_mean && sigma_vth >= 0.0 && sigma_cm_rel >= 0.0 &&
         c_m_mean > 0.0 && on_off_ratio > 0.0;
}

void DeviceParams::validate() const { throw_if_invalid(diagnostics()); }

std::vector<std::string> WordlineLevels::diagnostics(const DeviceParams& device) const {
  std::vector<std::string> out;
  if (!(v_wl0 < device.vth_lvt_mean))
    out.push_back(fmt::format("v_wl0 ({}) must be below vth_lvt_mean ({})", v_wl0, device.vth_lvt_mean));
  if (!(device.vth_lvt_mean < v_wl1 && v_wl1 < device.vth_hvt_mean))
    out.push_back(fmt::format("v_wl1 ({}) must lie inside the memory window ({}, {})", v_wl1,
                              device.vth_lvt_mean, device.vth_hvt_mean));
  if (!(v_wl2 > device.vth_hvt_mean))
    out.push_back(fmt::format("v_wl2 ({}) must be above vth_hvt_mean ({})", v_wl2, device.vth_hvt_mean));
  return out;
}

FeFetCell sample_cell(const DeviceParams& params, std::uint8_t bit, RandomStream& rng) {
  if (!params.valid()) params.validate();
  FeFetCell cell;
  cell.stored_bit = bit ? 1 : 0;
  cell.vth_sampled = params.state_mean(cell.stored_bit) + params.sigma_vth * rng.normal();
  double c;
  do {
    c = params.c_m_mean * (1.0 + params.sigma_cm_rel * rng.normal());
  } while (c <= kCapTruncation * params.c_m_mean);
  cell.c_m_sampled = c;
  return cell;
}

double pass_voltage(const FeFetCell& cell, double v_wl, double v_drive) noexcept {
  if (switch_state(cell, v_wl) == SwitchState::Off) return 0.0;
  return std::min(v_drive, std::max(0.0, v_wl - cell.vth_sampled));
}

double parse_quantity(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr == text.data())
    throw FormatError(fmt::format("not a number: '{}'", text));
  std::string_view suffix = trim(std::string_view(ptr, text.data() + text.size() - ptr));
  if (suffix.empty()) return value;
  if (suffix == "%") return value / 100.0;

  static constexpr std::string_view units[] = {"Hz", "V", "F", "s", "J", "A", "S"};
  for (auto unit : units) {
    if (suffix.size() >= unit.size() && suffix.substr(suffix.size() - unit.size()) == unit) {
      suffix.remove_suffix(unit.size());
      break;
    }
  }
  if (suffix.empty()) return value;
  if (suffix.size() != 1) throw FormatError(fmt::format("unknown unit in '{}'", text));
  switch (suffix.front()) {
    case 'a': return value * 1e-18;
    case 'f': return value * 1e-15;
    case 'p': return value * 1e-12;
    case 'n': return value * 1e-9;
    case 'u': return value * 1e-6;
    case 'm': return value * 1e-3;
    case 'k': return value * 1e3;
    case 'M': return value * 1e6;
    case 'G': return value * 1e9;
    default: throw FormatError(fmt::format("unknown unit prefix in '{}'", text));
  }
}

namespace {

void assign_device_key(DeviceParams& p, std::string_view key, double value) {
  if (key == "vth_lvt_mean") p.vth_lvt_mean = value;
  else if (key == "vth_hvt_mean") p.vth_hvt_mean = value;
  else if (key == "sigma_vth") p.sigma_vth = value;
  else if (key == "c_m_mean") p.c_m_mean = value;
  else if (key == "sigma_cm_rel") p.sigma_cm_rel = value;
  else if (key == "on_off_ratio") p.on_off_ratio = value;
  else throw FormatError(fmt::format("unknown device parameter '{}'", key));
}

}  // namespace

DeviceParams parse_device_params(std::string_view text) {
  DeviceParams p;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    auto doc = nlohmann::json::parse(text.begin(), text.end());
    for (auto& [key, value] : doc.items()) {
      double v = value.is_string() ? parse_quantity(value.get<std::string>()) : value.get<double>();
      assign_device_key(p, key, v);
    }
  } else {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw FormatError(fmt::format("line {}: expected key = value", line_no));
      std::string key = line.substr(0, eq);
      key.erase(std::remove_if(key.begin(), key.end(), [](unsigned char c) { return std::isspace(c); }),
                key.end());
      assign_device_key(p, key, parse_quantity(std::string_view(line).substr(eq + 1)));
    }
  }
  p.validate();
  return p;
}

DeviceParams load_device_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("cannot open {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_device_params(buf.str());
}

}  // namespace fecim
