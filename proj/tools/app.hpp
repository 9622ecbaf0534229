#pragma once

// nspyr command-line front end.
//
// Exit codes:
//   0  success
//   1  usage error or unexpected failure
//   2  I/O or input format error
//   3  numerical precondition failure; the message names the precondition

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsp/io.hpp"

namespace nspyr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumerical = 3;

struct WavyPreset {
  double amplitude = 0.0;
  int frequency = 1;
};

struct RunConfig {
  std::string command;
  std::string in;
  std::string out = "nspyr_out";
  std::string family = "conic";
  std::optional<double> theta;  ///< spacing angle; derived from the data when absent
  bool hyperbolic = false;
  int levels = 4;
  double epsilon = 1e-15;
  std::optional<std::string> boundary;  ///< inferred from the input when absent
  bool plot = false;
  nsp::Index samples = 256;
  double radius = 1.0;
  nsp::Index coarse = 16;  ///< coarse count used to derive theta for non-periodic data
  double amplitude = 0.05;
  int frequency = 24;
  double threshold_ratio = 50.0;
  double detail_scale = 1.0;
  std::vector<WavyPreset> wavy = {{0.01, 4}, {0.03, 6}, {0.06, 8}};
  int threads = 0;  ///< 0 = hardware concurrency
};

/// Applies the keys of a JSON config object on top of `cfg`.
void apply_config(RunConfig& cfg, const nsp::io::Json& j);

/// Family described by cfg for data whose coarsest level has n_coarse samples.
nsp::SchemeFamily make_family(const RunConfig& cfg, double n_coarse);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (flags > --config file > defaults) and runs the command.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nspyr
