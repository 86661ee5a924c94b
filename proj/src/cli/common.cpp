#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

#include "polyheat/cli/commands.hpp"

namespace polyheat::cli {

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::state_explosion:
    case ErrorCode::incommensurate_frequency:
    case ErrorCode::aliasing:
      return kExitState;
    case ErrorCode::unconverged:
    case ErrorCode::window_too_small:
    case ErrorCode::shift_too_small:
    case ErrorCode::outside_asymptotic_regime:
      return kExitFailed;
    default:
      return kExitInvalid;
  }
}

int thread_budget() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("POLYHEAT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<long>(n, cap);
  }
  return n;
}

std::string standard_problem() {
  return R"({
  "name": "standard_p4",
  "p": 4,
  "alpha": [0, 1],
  "t": 1,
  "u0_atoms": [{"y": 0, "re": 1, "im": 0}],
  "V_atoms": [{"z": 1, "re": 0.4, "im": 0}],
  "grid": {"N": 256, "L": 6.283185307179586},
  "dyson": {"n_max": 6, "time_mesh": 64},
  "spectral": {"steps": 1024},
  "tol": 1e-6
})";
}

}  // namespace polyheat::cli
