#include "routh/commands.hpp"
#include "routh/errors.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Routh reduction and rigid-body / ellipsoid experiments"};
  app.require_subcommand(1);

  routh::CommandOptions opt;
  std::function<int(const routh::CommandOptions&, std::ostream&)> command;

  auto add = [&](const char* name, const char* help, auto fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
    sub->add_option("--output", opt.output, "output CSV path");
    sub->add_option("--dt", opt.dt, "step size override");
    sub->add_option("--t-end", opt.t_end, "end time override");
    sub->callback([&command, fn] { command = fn; });
    return sub;
  };
  add("simulate-reduced", "integrate the Routhian system", routh::cmd_simulate_reduced);
  add("simulate-full", "integrate the full Euler-Lagrange system", routh::cmd_simulate_full);
  add("reconstruct", "recover cyclic coordinates from a reduced trajectory",
      routh::cmd_reconstruct)
      ->add_option("--reduced", opt.reduced, "reduced trajectory CSV")
      ->required();
  add("verify", "run the invariant checks", routh::cmd_verify)
      ->add_option("--report", opt.report, "JSON report path");
  add("kolosov", "ellipsoid equivalence and closed geodesics", routh::cmd_kolosov)
      ->add_option("--report", opt.report, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return command(opt, std::cout);
  } catch (const routh::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return routh::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
