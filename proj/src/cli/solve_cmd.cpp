#include <algorithm>
#include <cmath>

#include "polyheat/cli/commands.hpp"
#include "polyheat/csv.hpp"
#include "polyheat/dyson.hpp"
#include "polyheat/spectral.hpp"

namespace polyheat::cli {

namespace {

std::vector<Complex> on_grid(const PlaneWaveState& s, const ProblemSpec& p) {
  std::vector<Complex> out(p.grid_N);
  for (int j = 0; j < p.grid_N; ++j) out[j] = state_eval(s, j * p.grid_L / p.grid_N);
  return out;
}

std::vector<Complex> spectral_values(const ProblemSpec& p) {
  const GridState u0 = sample_state(p.u0, p.grid_N, p.grid_L);
  const std::vector<Complex> v = sample_potential(p.V, p.grid_N, p.grid_L);
  return strang_solve(u0, v, p.t, p.spectral_steps, p.params).values;
}

void write_grid(std::ostream& out, const ProblemSpec& p, const std::vector<Complex>& u) {
  out << "x,re,im\n";
  for (int j = 0; j < p.grid_N; ++j) {
    out << csv::number(j * p.grid_L / p.grid_N) << ',' << csv::number(u[j].real()) << ','
        << csv::number(u[j].imag()) << '\n';
  }
}

double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void dyson_notes(std::ostream& err, const DysonResult& r) {
  err << "truncation bound " << csv::number(r.truncation_bound) << '\n';
  if (r.mesh_too_coarse) err << "warning: time mesh too coarse\n";
}

}  // namespace

int run_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const ProblemSpec p = load_problem(args.config);
    switch (args.method) {
      case SolveMethod::dyson: {
        const DysonResult r = dyson_solve(p.u0, p.V, p.t, p.dyson, p.params);
        out << "y,re,im\n";
        for (const Wave& w : r.state.waves()) {
          out << csv::number(w.y) << ',' << csv::number(w.a.real()) << ','
              << csv::number(w.a.imag()) << '\n';
        }
        dyson_notes(err, r);
        return kExitOk;
      }
      case SolveMethod::feynman_kac: {
        const PlaneWaveState s = feynman_kac_state(p.u0, p.V, p.t, p.dyson, p.params);
        write_grid(out, p, on_grid(s, p));
        return kExitOk;
      }
      case SolveMethod::spectral: {
        write_grid(out, p, spectral_values(p));
        return kExitOk;
      }
      case SolveMethod::compare: {
        const std::vector<Complex> spec = spectral_values(p);
        const DysonResult r = dyson_solve(p.u0, p.V, p.t, p.dyson, p.params);
        const std::vector<Complex> dys = on_grid(r.state, p);
        const std::vector<Complex> fk =
            on_grid(feynman_kac_state(p.u0, p.V, p.t, p.dyson, p.params), p);
        out << "x,re_dyson,im_dyson,re_spec,im_spec,abs_diff\n";
        for (int j = 0; j < p.grid_N; ++j) {
          out << csv::number(j * p.grid_L / p.grid_N) << ',' << csv::number(dys[j].real())
              << ',' << csv::number(dys[j].imag()) << ',' << csv::number(spec[j].real())
              << ',' << csv::number(spec[j].imag()) << ','
              << csv::number(std::abs(dys[j] - spec[j])) << '\n';
        }
        const double ds = max_diff(dys, spec);
        const double df = max_diff(dys, fk);
        const double fs = max_diff(fk, spec);
        err << "max |dyson - spectral|      " << csv::number(ds) << '\n'
            << "max |dyson - feynman-kac|   " << csv::number(df) << '\n'
            << "max |feynman-kac - spectral| " << csv::number(fs) << '\n';
        dyson_notes(err, r);
        const bool pass = ds <= p.tol && df <= p.tol;
        err << (pass ? "PASS" : "FAIL") << " (tol " << csv::number(p.tol) << ")\n";
        return pass ? kExitOk : kExitFailed;
      }
    }
    return kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}

}  // namespace polyheat::cli
