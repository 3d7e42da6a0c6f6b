#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "campus/cli.hpp"
#include "campus/config.hpp"
#include "campus/csv.hpp"

namespace {

struct Args {
  std::string config;
  std::string input;
  std::string output;
  std::int64_t seed = 0;
  double radius_m = 0.0;
  std::int64_t bin_width_s = 0;
  bool strict = false;
};

// File config first, then explicit flags on top, then built-in defaults
// underneath everything (resolved_config).
campus::Config assemble(const Args& a, const CLI::App* sub) {
  campus::Config user;
  if (!a.config.empty()) user = campus::Config::from_file(a.config);
  const auto given = [sub](const std::string& name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--seed")) user.set("seed", std::to_string(a.seed));
  if (given("--radius-m")) user.set("radius_m", std::to_string(a.radius_m));
  if (given("--bin-width-s"))
    user.set("bin_width_s", std::to_string(a.bin_width_s));
  return campus::resolved_config(user);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"class location and attendance reconstruction toolkit"};
  app.set_version_flag("--version", std::string(campus::kToolVersion));
  app.require_subcommand(1);

  Args a;
  const auto add_common = [&](CLI::App* sub, bool needs_input) {
    sub->add_option("--config", a.config, "key=value configuration file")
        ->check(CLI::ExistingFile);
    if (needs_input)
      sub->add_option("--input", a.input, "dataset directory")
          ->required()
          ->check(CLI::ExistingDirectory);
    sub->add_option("--output", a.output, "output directory")->required();
  };

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(sim, false);
  sim->add_option("--seed", a.seed, "simulation seed");

  CLI::App* pipe = app.add_subcommand(
      "pipeline", "reconstruct class locations and attendance");
  add_common(pipe, true);
  pipe->add_option("--radius-m", a.radius_m, "attendance capture radius");
  pipe->add_option("--bin-width-s", a.bin_width_s, "time bin width");
  pipe->add_flag("--strict", a.strict, "fail on the first invalid data row");

  CLI::App* ana = app.add_subcommand(
      "analyze", "grade and peer analyses over pipeline output");
  add_common(ana, true);

  CLI::App* ver = app.add_subcommand(
      "verify", "score pipeline output against simulator ground truth");
  add_common(ver, true);

  CLI::App* all = app.add_subcommand(
      "all", "simulate, then run pipeline, analyses and verification");
  add_common(all, false);
  all->add_option("--seed", a.seed, "simulation seed");
  all->add_option("--radius-m", a.radius_m, "attendance capture radius");
  all->add_option("--bin-width-s", a.bin_width_s, "time bin width");
  all->add_flag("--strict", a.strict, "fail on the first invalid data row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      run_simulate(assemble(a, sim), a.output);
    } else if (pipe->parsed()) {
      run_pipeline(assemble(a, pipe), a.input, a.output, a.strict);
    } else if (ana->parsed()) {
      run_analyze(assemble(a, ana), a.input, a.output);
    } else if (ver->parsed()) {
      run_verify(assemble(a, ver), a.input, a.output);
    } else if (all->parsed()) {
      run_all(assemble(a, all), a.output, a.strict);
    }
  } catch (const campus::VerifyError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
