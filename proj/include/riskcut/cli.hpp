#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskcut::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3, kNonConvergence = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string command;  // fit, sweep, rc-curve, roc, simulate, two-step
  std::string input;
  std::string output;   // empty: stdout
  std::optional<double> gamma;
  bool hard_margin = false;
  std::vector<double> grid;  // empty: automatic grid
  std::size_t grid_points = 50;
  bool aurc = false;
  std::string study = "1";
  std::string signal = "strong";
  std::size_t runs = 200;
  std::uint64_t seed = 42;
  std::optional<std::size_t> n;
  std::size_t n1 = 1000;
  std::size_t n2 = 200;
  double cost = 1.0;
  double coverage_target = 0.85;
  unsigned threads = 1;
};

/// Parses argv into a config. Throws UsageError on bad input. Returns nullopt
/// when help was requested and already printed to `out`.
std::optional<CliConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Runs one command and returns its exit code. Messages go to `err`.
int run_command(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run_command with error-to-exit-code mapping.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace riskcut::cli
