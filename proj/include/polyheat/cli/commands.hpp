#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "polyheat/error.hpp"
#include "polyheat/problem.hpp"

namespace polyheat::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitState = 3;

int exit_code(const Error& e);

/// Thread count for data-parallel work: hardware concurrency, capped by
/// POLYHEAT_THREADS when that holds a positive integer.
int thread_budget();

struct KernelArgs {
  int p = 2;
  double alpha_re = 0.0;
  double alpha_im = 0.0;
  double t = 1.0;
  double xmin = 0.0;
  double xmax = 0.0;
  int points = 1;
  double tol = Defaults::tol;
};

/// CSV x,re,im,abs,method,err.
int run_kernel(const KernelArgs& args, std::ostream& out, std::ostream& err);

enum class CheckKind { semigroup, cylinder, asymptotic, variation };

struct CheckArgs {
  CheckKind kind = CheckKind::semigroup;
  // Built-in standard cases when empty.
  std::optional<std::string> config;
};

int run_check(const CheckArgs& args, std::ostream& out, std::ostream& err);

/// Built-in case list of a check, in the config file format.
std::string default_check_config(CheckKind kind);

enum class SolveMethod { dyson, feynman_kac, spectral, compare };

struct SolveArgs {
  std::string config;
  SolveMethod method = SolveMethod::compare;
};

int run_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);

struct BenchArgs {
  std::optional<std::string> config;
  int repeat = 1;
};

/// CSV method,case,median_ms.
int run_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

/// The standard comparison problem (p = 4, alpha = i, t = 1,
/// u0 = {(0, 1)}, V = {(1, 0.4)}).
std::string standard_problem();

}  // namespace polyheat::cli
