#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace approxwidths::cli {

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {
      "profile", "net",    "witness-weights", "lethargy", "axioms",           "widths",
      "decompose", "hull-check", "jackson",   "projection-defect"};
  return names;
}

struct Overrides {
  std::optional<double> tol;
  std::optional<long long> horizon;
  std::optional<std::uint64_t> seed;
};

struct Outcome {
  int exit_code = 0;
  std::string text;  ///< report or error object, already formatted
};

/// Runs one command on a parsed config. Never throws; errors become exit code
/// 2 (config or precondition) or 1 (solver failure) with a JSON error object.
Outcome run(const std::string& command, const nlohmann::json& config, const Overrides& overrides,
            const std::string& format);

/// Full command-line entry point.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

/// JSON text with every floating-point number written with 17 significant digits.
std::string dump17(const nlohmann::ordered_json& j, int indent = 2);

}  // namespace approxwidths::cli
