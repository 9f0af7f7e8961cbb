#pragma once
// Parameter-sweep engine behind the xxzbath command-line tool: grid parsing,
// config files, deterministic multi-threaded row evaluation, CSV / JSON /
// gnuplot-matrix serialisation, and checksummed run manifests.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace xxzbath::sweep {

// One sweep axis parsed from "lo:hi:n" (n points, inclusive, linear),
// "log:lo:hi:n" (log-spaced, lo and hi > 0), a comma list of values, or a
// single value.  "inf" is admitted only where allow_infinity is set
// (temperature axes, where it selects the infinite-temperature bath).
std::vector<double> parse_grid(const std::string& text,
                               bool allow_infinity = false);

struct SweepConfig {
  // [chain]
  int n_sites = 0;  // 0 = task default: infinite-chain measure bounds,
                    // 10 sites for root finding
  // [bath]
  double gamma = 1.0;
  double f = 0.01;
  double n_density = 10.0;
  // [grid] axes; an empty string selects the per-task default
  std::string delta;
  std::string temperature;
  std::string time;
  // [run]
  int threads = 1;
  std::uint64_t seed = 1;
  int max_rounds = 30;  // purification rounds scanned for the rate
  std::string verify_level = "fast";
};

// Flat key = value file with optional [grid] / [bath] / [chain] / [run]
// section headers; '#' starts a comment.  Unknown keys are rejected.
SweepConfig load_config_file(const std::string& path, SweepConfig base = {});

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Sweep tasks.  Grids default per task; the CLI help lists the columns.
Table run_ghz_dynamics(const SweepConfig& cfg);
Table run_w_dynamics(const SweepConfig& cfg);
Table run_heatmap(const SweepConfig& cfg);
Table run_distill(const SweepConfig& cfg);
Table run_bethe_roots(const SweepConfig& cfg);

// Cross-check suite: prints one line per item to `out` and returns the
// number of failed items.  level is "fast" (small chains, seconds) or
// "full" (larger chains).
int run_verify(const std::string& level, std::ostream& out);

// Serialisers.  Doubles print as %.17g; CSV strings use RFC-4180 quoting.
std::string to_csv(const Table& table);
std::string to_json(const Table& table);
// Heatmap tables only: gnuplot "nonuniform matrix" block with one leading
// '#' header line (rows = temperature, columns = delta, values = e_g).
std::string to_gnuplot_matrix(const Table& table);

// FNV-1a 64-bit checksum of a byte string, as used in the manifest.
std::uint64_t checksum(const std::string& text);

// Write `text` to `path` plus `<path>.manifest.json` carrying the library
// version, task and format, the effective config, the row count, wall-clock
// milliseconds, and checksums of the whole output and of each column.
void write_output_with_manifest(const std::string& path,
                                const std::string& text, const Table& table,
                                const SweepConfig& cfg, const std::string& task,
                                const std::string& format, double wall_ms);

}  // namespace xxzbath::sweep
