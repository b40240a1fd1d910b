#include "stbem/output.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <locale>
#include <sstream>
#include <stdexcept>

#ifndef STBEM_VERSION
#define STBEM_VERSION "unknown"
#endif

namespace stbem {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kColumns = 12;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double parse_double(const std::string& s) {
  std::istringstream ss(s);
  ss.imbue(std::locale::classic());
  double v = 0.0;
  if (s == "nan" || s == "-nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (!(ss >> v) || !ss.eof()) {
    throw std::runtime_error("csv: not a number: '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& s) {
  std::size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) {
    throw std::runtime_error("csv: not an integer: '" + s + "'");
  }
  return v;
}

} // namespace

std::string csv_line(const ConvergenceRecord& r) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << r.level << ',' << r.n << std::setprecision(17);
  for (double v : {r.eta, r.eta_x, r.eta_t, r.zeta, r.zeta_x, r.zeta_t, r.hh2, r.t_assemble, r.t_solve,
                   r.t_estimate}) {
    os << ',';
    if (std::isnan(v)) {
      os << "nan";
    } else {
      os << v;
    }
  }
  return os.str();
}

void write_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << csv_line(r) << '\n';
  }
}

std::vector<ConvergenceRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw std::runtime_error("csv: missing or unexpected header");
  }
  std::vector<ConvergenceRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != kColumns) {
      throw std::runtime_error("csv: expected 12 columns in '" + line + "'");
    }
    ConvergenceRecord r;
    r.level = static_cast<int>(parse_int(cells[0]));
    r.n = static_cast<std::size_t>(parse_int(cells[1]));
    double* fields[] = {&r.eta, &r.eta_x, &r.eta_t, &r.zeta, &r.zeta_x,
                        &r.zeta_t, &r.hh2, &r.t_assemble, &r.t_solve, &r.t_estimate};
    for (std::size_t i = 0; i < 10; ++i) {
      *fields[i] = parse_double(cells[i + 2]);
    }
    out.push_back(r);
  }
  return out;
}

void write_plot_script(std::ostream& os, const std::string& csv_name, const std::string& title) {
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set logscale xy\n"
     << "set format y '10^{%L}'\n"
     << "set xlabel 'N'\n"
     << "set ylabel 'estimator'\n"
     << "set title '" << title << "'\n"
     << "set terminal pngcairo size 900,650\n"
     << "set output 'convergence.png'\n"
     << "plot '" << csv_name << "' using 2:3 with linespoints title 'eta', \\\n"
     << "     '' using 2:6 with linespoints title 'zeta', \\\n"
     << "     '' using 2:9 with linespoints title 'h-h/2', \\\n"
     << "     '' using 2:(($2)**(-0.625)) with lines dashtype 2 title 'N^{-5/8}'\n";
}

std::string code_version() { return STBEM_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_manifest(std::ostream& os, const RunManifest& m) {
  const auto& c = m.config;
  nlohmann::json j;
  j["config"] = {
      {"problem", c.problem},
      {"refine", to_string(c.mode)},
      {"theta", c.theta},
      {"max_dofs", c.max_dofs},
      {"orders", {{"plain", c.orders.plain}, {"log", c.orders.log}, {"inv_sqrt", c.orders.inv_sqrt}}},
      {"hh2", c.hh2},
      {"out", c.out_dir},
  };
  j["version"] = m.version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["completed"] = m.completed;
  if (!m.error.empty()) {
    j["error"] = m.error;
  }
  j["files"] = m.files;
  os << j.dump(2) << '\n';
}

RunWriter::RunWriter(const fs::path& dir, const AdaptiveConfig& config) : dir_(dir) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  csv_.open(dir_ / "convergence.csv");
  if (ec || !csv_) {
    throw std::runtime_error("cannot write to output directory " + dir_.string());
  }
  csv_ << kCsvHeader << '\n' << std::flush;
  files_.push_back(dir_ / "convergence.csv");
  manifest_.config = config;
  manifest_.version = code_version();
  manifest_.started = utc_timestamp();
}

void RunWriter::add_level(const ConvergenceRecord& r, const SpaceTimeMesh& mesh) {
  csv_ << csv_line(r) << '\n' << std::flush;
  const fs::path p = dir_ / ("mesh_" + std::to_string(r.level) + ".txt");
  std::ofstream os(p);
  write_mesh(os, mesh);
  if (!os) {
    throw std::runtime_error("cannot write " + p.string());
  }
  files_.push_back(p);
}

std::vector<fs::path> RunWriter::finish(bool completed, const std::string& error) {
  csv_.close();
  {
    std::ofstream os(dir_ / "plot.gp");
    write_plot_script(os, "convergence.csv", manifest_.config.problem + " / " + to_string(manifest_.config.mode));
  }
  files_.push_back(dir_ / "plot.gp");
  manifest_.finished = utc_timestamp();
  manifest_.completed = completed;
  manifest_.error = error;
  files_.push_back(dir_ / "manifest.json");
  for (const auto& f : files_) {
    manifest_.files.push_back(f.filename().string());
  }
  std::ofstream os(dir_ / "manifest.json");
  write_manifest(os, manifest_);
  return files_;
}

std::vector<fs::path> write_outputs(const std::vector<ConvergenceRecord>& records,
                                    const std::vector<SpaceTimeMesh>& meshes, const fs::path& dir,
                                    const AdaptiveConfig& config) {
  if (meshes.size() != records.size()) {
    throw std::invalid_argument("write_outputs: one mesh per record expected");
  }
  RunWriter w(dir, config);
  for (std::size_t i = 0; i < records.size(); ++i) {
    w.add_level(records[i], meshes[i]);
  }
  return w.finish(true);
}

} // namespace stbem
