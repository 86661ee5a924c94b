#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "polyheat/cli/commands.hpp"

namespace cli = polyheat::cli;

namespace {

// Runs `body` against --out when given, stdout otherwise.
int with_output(const std::string& path, const std::function<int(std::ostream&)>& body) {
  if (path.empty()) return body(std::cout);
  std::ofstream file(path);
  if (!file) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return cli::kExitInvalid;
  }
  return body(file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fundamental solutions, Fresnel cylinder integrals and Dyson-series solvers "
               "for du/dt = (-i)^p alpha d^p u/dx^p + V u"};
  app.require_subcommand(1);
  std::string out_path;
  int status = cli::kExitOk;

  cli::KernelArgs kargs;
  auto* kernel = app.add_subcommand("kernel", "Tabulate the fundamental solution g_t(x)");
  kernel->add_option("--p", kargs.p, "Order p >= 2")->required();
  kernel->add_option("--alpha-re", kargs.alpha_re, "Re(alpha)");
  kernel->add_option("--alpha-im", kargs.alpha_im, "Im(alpha)");
  kernel->add_option("--t", kargs.t, "Time t > 0");
  kernel->add_option("--xmin", kargs.xmin, "First x");
  kernel->add_option("--xmax", kargs.xmax, "Last x");
  kernel->add_option("--points", kargs.points, "Number of evenly spaced points");
  kernel->add_option("--tol", kargs.tol, "Absolute and relative tolerance");
  kernel->add_option("--out", out_path, "Output CSV (stdout when omitted)");
  kernel->callback([&] {
    status = with_output(out_path, [&](std::ostream& o) { return cli::run_kernel(kargs, o, std::cerr); });
  });

  cli::CheckArgs cargs;
  std::string check_config;
  auto* check = app.add_subcommand("check", "Run a cross-check and report pass/fail per case");
  check->require_subcommand(1);
  const std::map<std::string, cli::CheckKind> kinds = {
      {"semigroup", cli::CheckKind::semigroup},
      {"cylinder", cli::CheckKind::cylinder},
      {"asymptotic", cli::CheckKind::asymptotic},
      {"variation", cli::CheckKind::variation}};
  for (const auto& [name, kind] : kinds) {
    auto* sub = check->add_subcommand(name);
    sub->add_option("--config", check_config, "Case file (built-in cases when omitted)");
    sub->add_option("--out", out_path, "Output CSV (stdout when omitted)");
    sub->callback([&, kind = kind] {
      cargs.kind = kind;
      if (!check_config.empty()) cargs.config = check_config;
      status = with_output(out_path, [&](std::ostream& o) { return cli::run_check(cargs, o, std::cerr); });
    });
  }

  cli::SolveArgs sargs;
  auto* solve = app.add_subcommand("solve", "Solve a problem file with one method or compare them");
  solve->add_option("--config", sargs.config, "Problem file")->required();
  solve->add_option("--method", sargs.method, "dyson, feynman-kac, spectral or compare")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, cli::SolveMethod>{{"dyson", cli::SolveMethod::dyson},
                                                  {"feynman-kac", cli::SolveMethod::feynman_kac},
                                                  {"spectral", cli::SolveMethod::spectral},
                                                  {"compare", cli::SolveMethod::compare}}));
  solve->add_option("--out", out_path, "Output CSV (stdout when omitted)");
  solve->callback([&] {
    status = with_output(out_path, [&](std::ostream& o) { return cli::run_solve(sargs, o, std::cerr); });
  });

  cli::BenchArgs bargs;
  std::string bench_config;
  auto* bench = app.add_subcommand("bench", "Time the kernel table and the three solvers");
  bench->add_option("--config", bench_config, "Problem file (standard problem when omitted)");
  bench->add_option("--repeat", bargs.repeat, "Runs per row; the median is reported");
  bench->add_option("--out", out_path, "Output CSV (stdout when omitted)");
  bench->callback([&] {
    if (!bench_config.empty()) bargs.config = bench_config;
    status = with_output(out_path, [&](std::ostream& o) { return cli::run_bench(bargs, o, std::cerr); });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitInvalid;
  }
  return status;
}
