#include "fecim/error.hpp"

#include <utility>

namespace fecim {
namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& line : lines) {
    if (!out.empty()) out += "; ";
    out += line;
  }
  return out;
}

}  // namespace

ParameterError::ParameterError(std::vector<std::string> diagnostics)
    : std::invalid_argument(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

void throw_if_invalid(std::vector<std::string> diagnostics) {
  if (!diagnostics.empty()) throw ParameterError(std::move(diagnostics));
}

}  // namespace fecim
