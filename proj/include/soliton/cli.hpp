#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "soliton/errors.hpp"

namespace soliton::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kNumerical = 3,
  kIo = 4,
};

/// Malformed or inconsistent run configuration.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Validates a raw configuration and returns it with every default filled
/// in. Unknown keys, and sections that do not belong to the command, are
/// rejected. The result is itself a valid configuration (manifest round trip).
nlohmann::json resolve_config(const nlohmann::json& raw);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides output_dir
  std::size_t jobs = 1;
  bool quiet = false;
};

/// Executes one run and writes manifest.json plus the command's data files
/// into the output directory. Returns an ExitCode; diagnostics go to `err`.
int run(const nlohmann::json& raw, const RunOptions& opts, std::ostream& log, std::ostream& err);

/// Entry point for the command-line tool.
int main(int argc, char** argv);

}  // namespace soliton::cli
