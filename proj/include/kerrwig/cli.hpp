#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerrwig/grid.hpp"
#include "kerrwig/io.hpp"
#include "kerrwig/kerr.hpp"

namespace kerrwig::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Schema violations; the message lists every problem found.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { evolve, ring, current, shear, classical };
Command parse_command(const std::string& name);
std::string command_name(Command c);

struct RingOptions {
  double radius = 1.0;
  int n_theta = 512;
  bool co_rotating = true;
};

struct CurrentOptions {
  std::vector<double> sigmas{0.0};
  double stagnation_tol = 1e-6;
  int quiver_stride = 1;
};

struct ShearOptions {
  int window = 5;
  int baseline_window = 51;
  double mad_factor = 3.0;
};

struct RunConfig {
  io::Json document;  // as given, echoed into every output
  std::string hash;
  StateSpec state;
  bool gaussian_center = false;  // state given as a Gaussian center rather than α
  int cutoff = -1;
  double truncation_tol = kDefaultTruncationTol;
  KerrParams params;
  PhaseGrid grid;
  std::vector<double> times{0.0};
  RingOptions ring;
  CurrentOptions current;
  ShearOptions shear;
  std::string format = "csv";
  bool strict = false;
};

/// Validates the document against the schema. Unknown keys are errors.
RunConfig parse_config(const io::Json& document);
RunConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  /// Overrides the config's output format when non-empty.
  std::string format;
  /// Forces strict mode when true.
  bool strict = false;
};

/// Executes one command. Returns an exit code; diagnostics go to `log`.
int run(Command command, const RunConfig& config, const RunOptions& options, std::ostream& log);

/// Full command-line entry point (argument parsing included).
int main_entry(int argc, char** argv);

}  // namespace kerrwig::cli
