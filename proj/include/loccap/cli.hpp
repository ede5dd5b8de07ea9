#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace loccap::cli {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "LOCCAP_OUTPUT_DIR";

/// Every parameter the subcommands read. Field names double as the long
/// option names and as the keys of the config file.
struct RunConfig {
  std::string subcommand;

  std::string kind = "square";  // square, hexagonal, triangular, poisson, custom; "all" for hessian/linresp
  std::vector<std::string> schemes{"all"};
  double beta = 10;
  double alpha = 4;
  double d = 25;
  std::optional<double> window;         // side of the square window (m)
  std::optional<double> window_height;  // makes the window rectangular
  double lambda = 1e-4;
  std::uint64_t seed = 1;
  std::string emitters;  // CSV for kind = custom
  std::optional<std::size_t> emitter;

  std::optional<double> delta_t;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  std::size_t max_steps = 1000000;
  std::optional<double> truncation_radius;
  bool tail_correction = true;
  bool debug = false;

  std::string sweep;  // empty, "beta" or "alpha"
  std::vector<double> values;

  double delta_x = 0.1;
  double delta_y = 0.1;
  double region = 2500;
  double influence = 10;

  std::string A = "identity";
  double t_step = 1e-4;

  std::size_t mc_trials = 100000;
  std::size_t mc_samples = 200000;

  std::string output;
  std::string format = "both";  // csv, text or both
  unsigned threads = 0;         // 0: machine parallelism

  /// Throws std::invalid_argument on the first bad parameter.
  void validate() const;
};

/// Output directory: --output, else $LOCCAP_OUTPUT_DIR, else ./loccap-out.
std::filesystem::path output_directory(const RunConfig& config);

/// Parses argv and runs the chosen subcommand. Returns the process exit code:
/// 0 on success, 1 when a computation failed, 2 on invalid input.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs an already-parsed configuration.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace loccap::cli
