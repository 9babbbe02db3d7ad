#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dircrawl/engine.hpp"

namespace dircrawl::cli {

inline constexpr const char* kSchema = "dircrawl/1";

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kConfigError = 2 };

/// Bad configuration. `path` is the dotted field path, e.g. "substrate.tau_minus".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct NumericOptions {
  double dt = 0.0;  // 0 selects period / 2000
  int periods = 1;
  double tolerance = 1e-6;

  bool operator==(const NumericOptions&) const = default;
};

struct OutputOptions {
  std::string format = "csv";
  std::string path;  // empty writes to stdout
  int precision = 17;

  bool operator==(const OutputOptions&) const = default;
};

struct RunConfig {
  FrictionLaw law = FrictionLaw::dry(1.0, 1.0);
  GaitProgram gait = Breather::sine_squared(1.0, 1.0, 1.0);
  /// Wave regime the user asked for; analytic reports check it against the
  /// admissibility conditions.
  std::optional<WaveRegime> requested_regime;
  NumericOptions numeric;
  OutputOptions output;
  std::vector<SweepAxis> axes;

  bool operator==(const RunConfig& other) const;
};

RunConfig parse_config(const nlohmann::json& doc);
/// Field errors carry the line of the offending key when it can be found.
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::string& path);

nlohmann::ordered_json to_json(const RunConfig& config);

std::string format_number(double value, int precision);

std::string trajectory_csv(const Trajectory& traj, int precision);
nlohmann::ordered_json trajectory_json(const Trajectory& traj);

nlohmann::ordered_json cycle_json(const CycleReport& report);
nlohmann::ordered_json admissibility_json(const WaveAdmissibility& adm);
nlohmann::ordered_json analytic_report(const RunConfig& config);
nlohmann::ordered_json verify_json(const VerifyReport& report, double tolerance);

std::string sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows, int precision);
nlohmann::ordered_json sweep_json(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows);

std::string curve_csv(const CurveTable& table, int precision);
nlohmann::ordered_json curve_json(const CurveTable& table);

/// Entry point shared by the dircrawl tool and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dircrawl::cli
