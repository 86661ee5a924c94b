#include <cmath>
#include <vector>

#include "polyheat/cli/commands.hpp"
#include "polyheat/csv.hpp"
#include "polyheat/kernel.hpp"

namespace polyheat::cli {

int run_kernel(const KernelArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const EvolutionParams params =
        validate_params(args.p, Complex{args.alpha_re, args.alpha_im});
    if (!(args.t > 0.0)) throw Error(ErrorCode::invalid_argument, "--t must be positive");
    if (args.points < 1) throw Error(ErrorCode::invalid_argument, "--points must be >= 1");
    if (!(args.xmin <= args.xmax) || !std::isfinite(args.xmin) || !std::isfinite(args.xmax)) {
      throw Error(ErrorCode::invalid_argument, "need finite --xmin <= --xmax");
    }
    if (!(args.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "--tol must be positive");
    std::vector<double> xs(args.points);
    for (int i = 0; i < args.points; ++i) {
      xs[i] = args.points == 1 ? args.xmin
                               : args.xmin + (args.xmax - args.xmin) * i / (args.points - 1);
    }
    quad::QuadSpec spec;
    spec.abs_tol = args.tol;
    spec.rel_tol = args.tol;
    const auto table = kernel_table(params, args.t, xs, spec, {}, thread_budget());
    out << "x,re,im,abs,method,err\n";
    int failures = 0;
    int unconverged = 0;
    for (const KernelTableEntry& e : table) {
      out << csv::number(e.value.x) << ',';
      if (e.error) {
        ++failures;
        out << "nan,nan,nan,error,\"" << *e.error << "\"\n";
        continue;
      }
      const KernelValue& v = e.value;
      out << csv::number(v.value.real()) << ',' << csv::number(v.value.imag()) << ','
          << csv::number(std::abs(v.value)) << ',' << method_name(v.method) << ',';
      if (!v.converged) {
        ++unconverged;
        out << "unconverged:";
      }
      out << csv::number(v.err_estimate) << '\n';
    }
    if (unconverged) err << unconverged << " point(s) did not meet the tolerance\n";
    if (failures) {
      err << failures << " point(s) failed\n";
      return kExitFailed;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}

}  // namespace polyheat::cli
