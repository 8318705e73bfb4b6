#include <cstdint>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Risk-aware zeroth-order stochastic optimization"};
  app.require_subcommand(1);

  std::string run_config, sweep_config, fit_csv, fit_column;
  std::optional<std::string> verify_config;
  double fit_window = 0.5;
  semidev::tools::CommonFlags run_flags, verify_flags, sweep_flags;

  auto add_common = [](CLI::App* cmd, semidev::tools::CommonFlags& flags) {
    cmd->add_option("--out", flags.out, "Override run.output");
    cmd->add_option("--seed", flags.seed, "Override run.seed");
    cmd->add_option("--replications", flags.replications,
                    "Override run.replications");
  };

  CLI::App* run = app.add_subcommand(
      "run", "Execute the configured experiment and write a trajectory CSV");
  run->add_option("--config", run_config, "Flat key=value config file")
      ->required();
  add_common(run, run_flags);

  CLI::App* verify = app.add_subcommand(
      "verify-smoothing",
      "Monte Carlo checks of the Gaussian smoothing guarantees");
  verify->add_option("--config", verify_config, "Optional key=value config file");
  verify->add_option("--seed", verify_flags.seed, "Override verify.seed");

  CLI::App* fit = app.add_subcommand(
      "fit-rate", "Least-squares log-log rate fit over a trajectory CSV column");
  fit->add_option("--csv", fit_csv, "Trajectory CSV produced by 'run'")->required();
  fit->add_option("--column", fit_column, "Column to fit against n")->required();
  fit->add_option("--window", fit_window,
                  "Trailing fraction of the series to fit (default 0.5)");

  CLI::App* sweep = app.add_subcommand(
      "sweep-dimension",
      "Fit convergence rates across problem dimensions and report mu scaling");
  sweep->add_option("--config", sweep_config, "Flat key=value config file")
      ->required();
  add_common(sweep, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Fold CLI11's assorted parse-error codes into the documented validation
    // status; --help and --version keep their clean exit.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) return semidev::tools::cmd_run(run_config, run_flags);
  if (verify->parsed())
    return semidev::tools::cmd_verify_smoothing(verify_config, verify_flags);
  if (fit->parsed())
    return semidev::tools::cmd_fit_rate(fit_csv, fit_column, fit_window);
  if (sweep->parsed())
    return semidev::tools::cmd_sweep_dimension(sweep_config, sweep_flags);
  return 2;
}
