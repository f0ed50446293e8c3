#pragma once

// Subcommands of the nigmg tool. Each cmd_* function does the work of one
// subcommand given already-parsed options; run() adds flag parsing and maps
// library errors to exit codes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nigmg/error.hpp"
#include "nigmg/simbench.hpp"

namespace nigmg::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

int exit_code_for(ErrorKind kind);

struct DenoiseOptions {
  std::filesystem::path input;
  bool header = false;
  std::string wavelet = "la10";
  std::string fit = "eb";
  std::optional<std::filesystem::path> params;
  std::size_t samples = 0;
  double band_level = 0.95;
  std::size_t restarts = 3;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
};

struct FanovaOptions {
  std::filesystem::path input;
  std::filesystem::path design;
  bool header = false;
  bool design_header = false;
  std::string wavelet = "la10";
  std::string fit = "hybrid";
  std::optional<std::filesystem::path> params;
  double prior_pjap = 0.5;
  std::optional<double> eta_kappa;
  double gamma_kappa = 0.4;
  double fdr = 0.1;
  std::size_t samples = 0;
  double band_level = 0.95;
  std::vector<std::string> contrasts;
  bool include_father = false;
  std::size_t restarts = 3;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
};

struct FitOptions {
  std::filesystem::path input;
  std::optional<std::filesystem::path> design;
  bool header = false;
  bool design_header = false;
  std::string wavelet = "la10";
  std::string fit = "eb";
  std::optional<std::filesystem::path> params;
  double prior_pjap = 0.5;
  std::optional<double> eta_kappa;
  double gamma_kappa = 0.4;
  std::size_t restarts = 3;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> out;
};

struct SimulateOptions {
  std::string scenario;  // JSON text or a path to a JSON file
  std::size_t replicates = 10;
  std::vector<std::string> methods{"nigmg", "wfanova", "tanova"};
  double prior_pjap = 0.5;
  double gamma_kappa = 0.4;
  std::size_t restarts = 1;
  std::uint64_t seed = 1;
  std::filesystem::path out = "simulate.csv";
};

struct CalibrateOptions {
  double target = 0.5;
  double gamma_kappa = 0.4;
  std::optional<std::size_t> length;
  std::optional<int> levels;
  std::size_t factors = 1;
};

void cmd_denoise(const DenoiseOptions& o, std::ostream& out);
void cmd_fanova(const FanovaOptions& o, std::ostream& out);
void cmd_fit(const FitOptions& o, std::ostream& out);
void cmd_simulate(const SimulateOptions& o, std::ostream& out);
void cmd_calibrate(const CalibrateOptions& o, std::ostream& out);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_to_json(const Scenario& s);

/// Full command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nigmg::cli
