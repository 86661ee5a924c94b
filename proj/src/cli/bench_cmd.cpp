#include <algorithm>
#include <chrono>
#include <functional>
#include <vector>

#include "polyheat/cli/commands.hpp"
#include "polyheat/csv.hpp"
#include "polyheat/dyson.hpp"
#include "polyheat/spectral.hpp"

namespace polyheat::cli {

namespace {

double median_ms(int repeat, const std::function<void()>& run) {
  std::vector<double> times;
  for (int r = 0; r < repeat; ++r) {
    const auto start = std::chrono::steady_clock::now();
    run();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  return n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

}  // namespace

int run_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.repeat < 1) throw Error(ErrorCode::invalid_argument, "--repeat must be >= 1");
    const ProblemSpec p =
        args.config ? load_problem(*args.config) : parse_problem(standard_problem());

    struct Row {
      std::string method;
      std::string case_id;
      std::function<void()> run;
    };
    std::vector<Row> rows;
    rows.push_back({"kernel", "p4_i_1000", [] {
                      const EvolutionParams params = validate_params(4, Complex{0.0, 1.0});
                      std::vector<double> xs(1000);
                      for (int i = 0; i < 1000; ++i) xs[i] = -10.0 + 20.0 * i / 999.0;
                      quad::QuadSpec spec;
                      spec.abs_tol = spec.rel_tol = Defaults::tol;
                      kernel_table(params, 1.0, xs, spec, {}, thread_budget());
                    }});
    rows.push_back({"dyson", p.name, [&] { dyson_solve(p.u0, p.V, p.t, p.dyson, p.params); }});
    rows.push_back({"feynman-kac", p.name,
                    [&] { feynman_kac_state(p.u0, p.V, p.t, p.dyson, p.params); }});
    rows.push_back({"spectral", p.name, [&] {
                      strang_solve(sample_state(p.u0, p.grid_N, p.grid_L),
                                   sample_potential(p.V, p.grid_N, p.grid_L), p.t,
                                   p.spectral_steps, p.params);
                    }});

    out << "method,case,median_ms\n";
    for (const Row& r : rows) {
      out << r.method << ',' << r.case_id << ',' << csv::number(median_ms(args.repeat, r.run))
          << '\n';
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}

}  // namespace polyheat::cli
