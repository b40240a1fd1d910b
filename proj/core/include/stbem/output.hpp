#pragma once

#include "stbem/adaptive.hpp"

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

namespace stbem {

inline constexpr const char* kCsvHeader =
    "level,N,eta,eta_x,eta_t,zeta,zeta_x,zeta_t,hh2,t_assemble,t_solve,t_estimate";

/// One CSV line (no newline), 17 significant digits, locale independent.
std::string csv_line(const ConvergenceRecord& r);
void write_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records);
/// Throws std::runtime_error on a wrong header or a malformed line.
std::vector<ConvergenceRecord> read_csv(std::istream& is);

/// gnuplot script plotting every estimator of `csv_name` against N, log-log.
void write_plot_script(std::ostream& os, const std::string& csv_name, const std::string& title);

/// Code version baked in at configure time (`git describe` when available).
std::string code_version();

struct RunManifest {
  AdaptiveConfig config;
  std::string version;
  std::string started;
  std::string finished;
  bool completed = false;
  std::string error;
  std::vector<std::string> files;
};

void write_manifest(std::ostream& os, const RunManifest& m);

/// ISO 8601 UTC timestamp of now.
std::string utc_timestamp();

/// Streams a run into a directory: the CSV is flushed after every level and
/// each level gets its own mesh dump; finish() adds plot.gp and manifest.json.
class RunWriter {
public:
  /// Creates the directory; throws std::runtime_error if it cannot be written.
  RunWriter(const std::filesystem::path& dir, const AdaptiveConfig& config);

  void add_level(const ConvergenceRecord& r, const SpaceTimeMesh& mesh);
  /// Returns every file written.
  std::vector<std::filesystem::path> finish(bool completed, const std::string& error = {});

private:
  std::filesystem::path dir_;
  RunManifest manifest_;
  std::ofstream csv_;
  std::vector<std::filesystem::path> files_;
};

/// Batch form of RunWriter; meshes[i] belongs to records[i].
std::vector<std::filesystem::path> write_outputs(const std::vector<ConvergenceRecord>& records,
                                                 const std::vector<SpaceTimeMesh>& meshes,
                                                 const std::filesystem::path& dir,
                                                 const AdaptiveConfig& config = {});

} // namespace stbem
