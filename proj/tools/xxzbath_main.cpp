// Command-line front end: parameter sweeps over the open-chain dynamics,
// entanglement bounds, purification rates, and Bethe root tables, plus a
// built-in cross-check suite.  Exit codes: 0 success, 1 usage or runtime
// error, 2 cross-check failure, 3 resource cap exceeded.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "xxzbath/errors.hpp"
#include "xxzbath/sweep.hpp"
#include "xxzbath/version.hpp"

namespace {

struct CommonOpts {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::string format = "csv";
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<int> sites;
  std::optional<double> gamma;
  std::optional<double> f;
  std::optional<double> n_density;
  std::optional<std::string> delta;
  std::optional<std::string> temperature;
  std::optional<std::string> time;
  std::optional<int> rounds;
};

void add_common_options(CLI::App* sub, CommonOpts& o, bool with_bath_axes) {
  sub->add_option("--config", o.config,
                  "key = value file with optional [grid]/[bath]/[chain]/[run] sections");
  sub->add_option("--out", o.out,
                  "output file; a .manifest.json with checksums is written next to it");
  sub->add_option("--format", o.format, "csv | json | matrix (matrix: heatmap only)")
      ->check(CLI::IsMember({"csv", "json", "matrix"}));
  sub->add_option("--threads", o.threads,
                  "worker threads, 1-64 (default: XXZBATH_THREADS, config, or 1)");
  sub->add_option("--seed", o.seed, "seed recorded in the manifest");
  sub->add_option("--sites", o.sites,
                  "chain length; 0 = task default (infinite-chain bounds, 10 for roots)");
  sub->add_option("--delta", o.delta,
                  "anisotropy grid: lo:hi:n, log:lo:hi:n, or comma list");
  if (with_bath_axes) {
    sub->add_option("--temperature", o.temperature,
                    "temperature grid (inf = infinite temperature)");
    sub->add_option("--time", o.time, "time grid");
    sub->add_option("--gamma", o.gamma, "bath coupling strength");
    sub->add_option("--f", o.f, "resonant filling fraction");
    sub->add_option("--n-density", o.n_density, "bath mode density");
    sub->add_option("--rounds", o.rounds, "purification rounds scanned for rates");
  }
}

xxzbath::sweep::SweepConfig resolve_config(const CommonOpts& o) {
  xxzbath::sweep::SweepConfig cfg;
  if (o.config) cfg = xxzbath::sweep::load_config_file(*o.config, cfg);

  if (const char* env = std::getenv("XXZBATH_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("XXZBATH_THREADS must be an integer");
    }
  }

  if (o.threads) cfg.threads = *o.threads;
  if (o.seed) cfg.seed = *o.seed;
  if (o.sites) cfg.n_sites = *o.sites;
  if (o.gamma) cfg.gamma = *o.gamma;
  if (o.f) cfg.f = *o.f;
  if (o.n_density) cfg.n_density = *o.n_density;
  if (o.delta) cfg.delta = *o.delta;
  if (o.temperature) cfg.temperature = *o.temperature;
  if (o.time) cfg.time = *o.time;
  if (o.rounds) cfg.max_rounds = *o.rounds;
  return cfg;
}

int emit(const xxzbath::sweep::Table& table, const xxzbath::sweep::SweepConfig& cfg,
         const CommonOpts& o, const std::string& task, double wall_ms) {
  std::string text;
  if (o.format == "csv") {
    text = xxzbath::sweep::to_csv(table);
  } else if (o.format == "json") {
    text = xxzbath::sweep::to_json(table);
  } else if (o.format == "matrix") {
    if (task != "heatmap")
      throw std::invalid_argument("matrix format is only defined for heatmap");
    text = xxzbath::sweep::to_gnuplot_matrix(table);
  } else {
    throw std::invalid_argument("unknown format: " + o.format);
  }

  if (o.out) {
    xxzbath::sweep::write_output_with_manifest(*o.out, text, table, cfg, task,
                                               o.format, wall_ms);
  } else {
    std::cout << text;
  }
  return 0;
}

int run_task(const std::string& task, const CommonOpts& o) {
  const xxzbath::sweep::SweepConfig cfg = resolve_config(o);
  const auto start = std::chrono::steady_clock::now();
  xxzbath::sweep::Table table;
  if (task == "ghz-dynamics") {
    table = xxzbath::sweep::run_ghz_dynamics(cfg);
  } else if (task == "w-dynamics") {
    table = xxzbath::sweep::run_w_dynamics(cfg);
  } else if (task == "heatmap") {
    table = xxzbath::sweep::run_heatmap(cfg);
  } else if (task == "distill") {
    table = xxzbath::sweep::run_distill(cfg);
  } else {
    table = xxzbath::sweep::run_bethe_roots(cfg);
  }
  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  return emit(table, cfg, o, task, wall_ms);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xxzbath: open-system dynamics, entanglement bounds, and Bethe "
               "root tables for the anisotropic spin ring"};
  app.set_version_flag("--version", std::string(xxzbath::kVersion));
  app.require_subcommand(1);

  CommonOpts ghz_o, w_o, heat_o, distill_o, roots_o;

  auto* ghz = app.add_subcommand(
      "ghz-dynamics",
      "GHZ-block evolution; columns: delta, temperature, t, u, v, e_g, e_d, physical");
  add_common_options(ghz, ghz_o, true);

  auto* wdyn = app.add_subcommand(
      "w-dynamics",
      "magnon-band populations from w1(0) = 1; columns: delta, temperature, t, "
      "w0, w1, w2_zero, w2_pi, cme_bound");
  add_common_options(wdyn, w_o, true);

  auto* heat = app.add_subcommand(
      "heatmap", "e_g over the (delta, temperature) plane at one time; columns: "
                 "delta, temperature, e_g, physical");
  add_common_options(heat, heat_o, true);

  auto* dist = app.add_subcommand(
      "distill", "distillable rate of the evolved GHZ block; columns: delta, "
                 "temperature, t, u, v, rate, best_round");
  add_common_options(dist, distill_o, true);

  auto* roots = app.add_subcommand(
      "bethe-roots",
      "zero-momentum pair and bound-pair roots; columns: delta, n_sites, kind "
      "(1 pair, 2 bound), index, q_real, q_imag, energy, residual, converged");
  add_common_options(roots, roots_o, false);

  std::string verify_level = "fast";
  auto* verify = app.add_subcommand("verify", "run the built-in cross-check suite");
  verify->add_option("--level", verify_level, "fast | full")
      ->check(CLI::IsMember({"fast", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (verify->parsed()) {
      const int failures = xxzbath::sweep::run_verify(verify_level, std::cout);
      return failures == 0 ? 0 : 2;
    }
    if (ghz->parsed()) return run_task("ghz-dynamics", ghz_o);
    if (wdyn->parsed()) return run_task("w-dynamics", w_o);
    if (heat->parsed()) return run_task("heatmap", heat_o);
    if (dist->parsed()) return run_task("distill", distill_o);
    if (roots->parsed()) return run_task("bethe-roots", roots_o);
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const xxzbath::ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return 3;
  } catch (const xxzbath::VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
