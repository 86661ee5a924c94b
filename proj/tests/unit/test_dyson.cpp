#include <cmath>
#include <random>

#include "doctest.h"
#include "polyheat/dyson.hpp"
#include "polyheat/error.hpp"
#include "support/random.hpp"

using namespace polyheat;

namespace {

constexpr Complex kI{0.0, 1.0};

PlaneWaveState state(std::vector<Wave> w) { return PlaneWaveState(std::move(w)); }

double sup_diff(const PlaneWaveState& a, const PlaneWaveState& b) {
  double m = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double x = -3.0 + 0.15 * i;
    m = std::max(m, std::abs(state_eval(a, x) - state_eval(b, x)));
  }
  return m;
}

// sin 1 + i (1 - cos 1): the n = 1 amplitude for u0 = {(0,1)}, V = {(1,1)},
// p = 4, alpha = i, t = 1.
const Complex kFirstOrder{std::sin(1.0), 1.0 - std::cos(1.0)};

}  // namespace

TEST_CASE("plane-wave states merge and evaluate") {
  const PlaneWaveState s = state({{1.0, 1.0}, {1.0 + 1e-13, 2.0}, {1.0 + 1e-9, 1.0}, {0.0, 0.0}});
  CHECK(s.size() == 2);
  CHECK(s.fresnel_norm() == doctest::Approx(4.0));

  CHECK(state_eval(PlaneWaveState(), 1.3) == Complex{});
  CHECK(state_eval(state({{0.0, Complex{2, -1}}}), 7.0) == Complex{2, -1});
  const PlaneWaveState cosine = state({{1.0, 1.0}, {-1.0, 1.0}});
  for (double x : {0.0, 0.4, -2.2}) CHECK(std::abs(state_eval(cosine, x) - 2 * std::cos(x)) < 1e-15);
}

TEST_CASE("free_propagate") {
  const auto p4 = validate_params(4, kI);
  const PlaneWaveState s = state({{2.0, 1.0}, {-0.5, Complex{0.3, 0.1}}});
  CHECK(fresnel_distance(free_propagate(s, 0.0, p4), s) == 0.0);
  const PlaneWaveState one = free_propagate(state({{2.0, 1.0}}), 0.5, p4);
  CHECK(std::abs(one.waves()[0].a - std::polar(1.0, 8.0)) < 1e-14);

  const auto damp = validate_params(4, Complex{-1.0, 0.5});
  const PlaneWaveState d = free_propagate(s, 0.7, damp);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(d.waves()[i].a) <= std::abs(s.waves()[i].a));
}

TEST_CASE("apply_potential") {
  const PlaneWaveState s = state({{1.0, 1.0}, {-2.0, Complex{0.5, 0.5}}});
  CHECK(apply_potential(s, PlaneWaveState()).empty());
  const Complex c{0.2, -0.7};
  CHECK(fresnel_distance(apply_potential(s, state({{0.0, c}})), scale(s, c)) < 1e-16);
  const PlaneWaveState prod = apply_potential(state({{1.0, 1.0}}), state({{2.0, kI}}));
  REQUIRE(prod.size() == 1);
  CHECK(prod.waves()[0].y == 3.0);
  CHECK(prod.waves()[0].a == kI);

  const PlaneWaveState v = state({{0.5, 0.3}, {1.5, Complex{0, -0.2}}, {-1.0, 0.1}});
  CHECK(apply_potential(s, v).fresnel_norm() <= s.fresnel_norm() * v.fresnel_norm() + 1e-15);

  try {
    apply_potential(s, v, 4);
    FAIL("cap not enforced");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::state_explosion);
  }
}

TEST_CASE("dyson_term examples") {
  const auto p4 = validate_params(4, kI);
  const PlaneWaveState u0 = state({{0.0, 1.0}});
  const PlaneWaveState V = state({{1.0, 1.0}});
  DysonConfig cfg;

  const DysonTerm t0 = dyson_term(u0, V, 1.0, 0, cfg, p4);
  CHECK(fresnel_distance(t0.state, free_propagate(u0, 1.0, p4)) < 1e-15);

  const DysonTerm t1 = dyson_term(u0, V, 1.0, 1, cfg, p4);
  REQUIRE(t1.state.size() == 1);
  CHECK(t1.state.waves()[0].y == 1.0);
  CHECK(std::abs(t1.state.waves()[0].a - kFirstOrder) < 1e-10);
  CHECK(t1.bound_ok);
}

TEST_CASE("term bound, sup-norm domination and the truncation bound") {
  std::mt19937_64 rng(3);
  for (int p : {3, 4}) {
    const auto params = validate_params(p, kI);
    const PlaneWaveState u0 = state({{0.0, 1.0}, {2.0, testing::random_complex(rng)}});
    const PlaneWaveState V = state({{1.0, testing::random_complex(rng, 0.5)}, {-1.0, 0.2}});
    DysonConfig cfg;
    cfg.n_max = 5;
    const DysonResult r = dyson_solve(u0, V, 1.0, cfg, params);
    for (const DysonTerm& t : r.terms) {
      CAPTURE(t.n);
      CHECK(t.bound_ok);
      CHECK(t.state.fresnel_norm() <= t.bound * (1 + 1e-9) + 1e-15);
    }
    for (double x : {-2.0, 0.0, 0.3, 5.0}) {
      CHECK(std::abs(state_eval(r.state, x)) <= r.state.fresnel_norm() + 1e-15);
    }
    // Series tail: one extra term moves the state by at most its bound.
    DysonConfig more = cfg;
    more.n_max = cfg.n_max + 1;
    const DysonResult r2 = dyson_solve(u0, V, 1.0, more, params);
    const double mesh = r2.terms.back().mesh_delta;
    CHECK(fresnel_distance(r.state, r2.state) <=
          dyson_term_bound(u0.fresnel_norm(), V.fresnel_norm(), 1.0, more.n_max) + mesh);
    CHECK(r.truncation_bound >= r2.truncation_bound);
  }
  CHECK(dyson_truncation_bound(1.0, 1.0, 1.0, 0) == doctest::Approx(std::exp(1.0) - 1.0));
}

TEST_CASE("dyson_solve special potentials") {
  const auto p4 = validate_params(4, kI);
  const PlaneWaveState u0 = state({{0.0, 1.0}, {1.0, 0.5}, {-2.0, Complex{0, 0.25}}});
  DysonConfig cfg;

  const DysonResult free = dyson_solve(u0, PlaneWaveState(), 1.0, cfg, p4);
  CHECK(fresnel_distance(free.state, free_propagate(u0, 1.0, p4)) == 0.0);
  CHECK(free.truncation_bound == 0.0);

  for (Complex c : {Complex{-0.3, 0}, Complex{0, 0.8}, Complex{0.5, -0.5}, Complex{-1, 0}, Complex{0, 1}}) {
    cfg.n_max = 14;
    const DysonResult r = dyson_solve(u0, state({{0.0, c}}), 1.0, cfg, p4);
    const PlaneWaveState exact = scale(free_propagate(u0, 1.0, p4), std::exp(c));
    CHECK(fresnel_distance(r.state, exact) < 1e-10);
  }
}

TEST_CASE("Richardson self-consistency under mesh refinement") {
  const auto p4 = validate_params(4, kI);
  const PlaneWaveState u0 = state({{0.0, 1.0}});
  const PlaneWaveState V = state({{1.0, 0.4}, {-1.0, 0.2}});
  DysonConfig a;
  a.n_max = 3;
  a.time_mesh = 32;
  DysonConfig b = a;
  b.time_mesh = 64;
  DysonConfig c = a;
  c.time_mesh = 1024;
  const DysonResult ra = dyson_solve(u0, V, 1.0, a, p4);
  const DysonResult rb = dyson_solve(u0, V, 1.0, b, p4);
  const DysonResult rc = dyson_solve(u0, V, 1.0, c, p4);
  double delta = 0.0;
  for (const DysonTerm& t : ra.terms) delta += t.mesh_delta;
  CHECK(fresnel_distance(ra.state, rb.state) < 4 * delta);
  CHECK(fresnel_distance(rb.state, rc.state) < fresnel_distance(ra.state, rc.state));
}

TEST_CASE("DysonConfig validation and state explosion") {
  DysonConfig cfg;
  cfg.n_max = 40;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.time_mesh = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);

  cfg = {};
  cfg.max_atoms = 50;
  const PlaneWaveState V = state({{1.0, 0.1}, {std::sqrt(2.0), 0.1}, {std::sqrt(3.0), 0.1}});
  try {
    dyson_solve(state({{0.0, 1.0}}), V, 1.0, cfg, validate_params(4, kI));
    FAIL("no explosion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::state_explosion);
  }
  CHECK_THROWS_AS(feynman_kac_state(state({{0.0, 1.0}}), V, 1.0, cfg, validate_params(4, kI)),
                  Error);
}

TEST_CASE("Feynman-Kac: free case and first-order term") {
  const auto p4 = validate_params(4, kI);
  const PlaneWaveState u0 = state({{0.0, 1.0}, {1.0, Complex{0.2, 0.3}}});
  DysonConfig cfg;
  for (double x : {0.0, 0.7, -3.0}) {
    const FeynmanKacResult r = feynman_kac_eval(u0, PlaneWaveState(), 1.0, x, cfg, p4);
    CHECK(std::abs(r.value - state_eval(free_propagate(u0, 1.0, p4), x)) < 1e-14);
  }
  const Complex t1 = feynman_kac_term(state({{0.0, 1.0}}), state({{1.0, 1.0}}), 1.0, 0.0, 1,
                                      SimplexRule::duffy, 0, p4);
  CHECK(std::abs(t1 - kFirstOrder) < 1e-12);
}

TEST_CASE("Feynman-Kac agrees with the Dyson series on small cases") {
  const std::vector<std::pair<PlaneWaveState, PlaneWaveState>> cases = {
      {state({{0.0, 1.0}}), state({{1.0, 0.4}})},
      {state({{0.0, 1.0}, {1.0, 0.5}}), state({{1.0, 0.4}})},
      {state({{0.0, 1.0}}), state({{1.0, 0.3}, {-1.0, Complex{0, 0.2}}})},
      {state({{0.0, 1.0}, {-1.0, Complex{0.3, -0.3}}}), state({{1.0, 0.3}, {2.0, -0.25}})}};
  for (int p : {3, 4}) {
    const auto params = validate_params(p, kI);
    for (const auto& [u0, V] : cases) {
      for (int n_max : {1, 3}) {
        DysonConfig cfg;
        cfg.n_max = n_max;
        cfg.time_mesh = 256;
        const PlaneWaveState d = dyson_solve(u0, V, 1.0, cfg, params).state;
        for (double x : {0.0, 1.0, 2.5}) {
          const Complex fk = feynman_kac_eval(u0, V, 1.0, x, cfg, params).value;
          CAPTURE(p);
          CAPTURE(n_max);
          CAPTURE(x);
          CHECK(std::abs(fk - state_eval(d, x)) < 1e-6);
        }
        CHECK(sup_diff(feynman_kac_state(u0, V, 1.0, cfg, params), d) < 1e-6);
      }
    }
  }
}

TEST_CASE("simplex rules agree; full cube reproduces the simplex integral") {
  const auto p4 = validate_params(4, kI);
  const PlaneWaveState u0 = state({{0.0, 1.0}});
  const PlaneWaveState V = state({{1.0, 0.4}, {-1.0, 0.3}});
  for (int n : {1, 2, 3}) {
    const Complex duffy = feynman_kac_term(u0, V, 1.0, 0.4, n, SimplexRule::duffy, 0, p4);
    const Complex iter = feynman_kac_term(u0, V, 1.0, 0.4, n, SimplexRule::iterated, 0, p4);
    CHECK(std::abs(duffy - iter) < 1e-13);
  }
  const Complex simplex = feynman_kac_term(u0, V, 1.0, 0.4, 2, SimplexRule::duffy, 0, p4);
  const Complex cube = feynman_kac_term(u0, V, 1.0, 0.4, 2, SimplexRule::full_cube, 1024, p4);
  CHECK(std::abs(cube - simplex) < 1e-6);
}
