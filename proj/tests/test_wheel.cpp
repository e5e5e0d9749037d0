#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oneloop/rng.hpp"
#include "oneloop/wheel.hpp"
#include "oracle_support.hpp"

using namespace oneloop;

namespace {

TestInput phi_102() {
  const Var y = y_var(1, 1);
  Polynomial p = Polynomial(Rational(1)) + Polynomial::variable(y) * Polynomial::variable(y);
  return TestInput::diagonal(SpaceSignature{1, 0, 2}, p, {Rational(2)}, {});
}

TestInput phi_012() {
  const Var w = w_var(1, 1);
  Polynomial p = Polynomial(Rational(1)) + Polynomial::variable(w) +
                 Polynomial::variable(w) * Polynomial::variable(w);
  return TestInput::diagonal(SpaceSignature{0, 1, 2}, p, {}, {Rational(1)});
}

TestInput phi_113_rich() {
  Polynomial p = Polynomial(Rational(1)) + Polynomial::variable(w_var(1, 1)) +
                 Polynomial::variable(y_var(1, 1)) * Polynomial::variable(w_var(1, 1)) *
                     Polynomial::variable(w_var(2, 1)) +
                 Polynomial::variable(y_var(1, 1)) * Polynomial::variable(y_var(1, 1));
  return TestInput::diagonal(SpaceSignature{1, 1, 3}, p, {Rational(2)}, {Rational(3, 2)});
}

TestInput phi_113_light() {
  Polynomial p = Polynomial(Rational(1)) + Polynomial::variable(w_var(1, 1));
  return TestInput::diagonal(SpaceSignature{1, 1, 3}, p, {Rational(2)}, {Rational(3, 2)});
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

}  // namespace

TEST_CASE("admissible edge subsets respect the cardinality window") {
  CHECK(wheel::admissible_S(SpaceSignature{2, 1, 4}).size() == 10);
  CHECK(wheel::admissible_S(SpaceSignature{2, 1, 3}).size() == 3);
  CHECK(wheel::admissible_S(SpaceSignature{0, 2, 3}).size() == 4);
  CHECK(wheel::admissible_S(SpaceSignature{1, 1, 3}).size() == 6);

  const SpaceSignature sig{1, 1, 3};
  CHECK(wheel::window_admits(sig, {1}));
  CHECK(wheel::window_admits(sig, {1, 3}));
  CHECK_FALSE(wheel::window_admits(sig, {}));
  CHECK_FALSE(wheel::window_admits(sig, {1, 2, 3}));

  CHECK(wheel::s_term_label_count(sig, {1}) == 1);
  CHECK(wheel::s_term_label_count(SpaceSignature{2, 1, 4}, {1, 2}) == 4);
  CHECK(wheel::s_term_label_count(SpaceSignature{2, 3, 4}, {1}) == 2 * 27);
}

TEST_CASE("decoration enumeration counts") {
  CHECK(wheel::total_decorations(SpaceSignature{1, 0, 2}).size() == 1);
  CHECK(wheel::total_decorations(SpaceSignature{0, 1, 2}).size() == 1);
  CHECK(wheel::total_decorations(SpaceSignature{1, 1, 3}).size() == 6);
  CHECK(wheel::total_decorations(SpaceSignature{2, 1, 4}).size() == 56);

  // Orientation pairing kills two of the six admissible labels here; the
  // literal oracle kills exactly the same two tuples.
  const SpaceSignature sig{1, 1, 3};
  std::size_t nonzero = 0;
  for (const auto& edges : wheel::total_decorations(sig))
    if (engine::decoration_sigma(sig, edges) != 0) ++nonzero;
  CHECK(nonzero == 4);
  CHECK(oracle::LiteralWheel(sig).tuples.size() == 4);
}

TEST_CASE("algebraic vanishing certificates") {
  auto v = [](int m, int n, int k) { return wheel::vanishes_algebraically(SpaceSignature{m, n, k}); };

  CHECK_FALSE(v(1, 0, 2).vanishes);
  CHECK_FALSE(v(0, 1, 2).vanishes);
  CHECK_FALSE(v(1, 1, 3).vanishes);
  CHECK_FALSE(v(2, 1, 4).vanishes);

  CHECK(v(2, 1, 3).vanishes);
  CHECK(v(2, 1, 3).proof == wheel::VanishProof::EdgeCase);
  CHECK(v(1, 2, 3).vanishes);
  CHECK(v(1, 2, 3).proof == wheel::VanishProof::EdgeCase);
  CHECK(v(1, 1, 2).vanishes);
  CHECK(v(1, 1, 2).proof == wheel::VanishProof::EdgeCase);
  CHECK(v(2, 2, 4).vanishes);
  CHECK(v(2, 2, 4).proof == wheel::VanishProof::EdgeCase);

  CHECK(v(2, 1, 2).vanishes);
  CHECK(v(2, 1, 2).proof == wheel::VanishProof::DegreeCount);
  CHECK(v(2, 2, 3).vanishes);
  CHECK(v(2, 2, 3).proof == wheel::VanishProof::DegreeCount);
  CHECK(v(3, 1, 3).vanishes);
  CHECK(v(3, 1, 3).proof == wheel::VanishProof::DegreeCount);
}

TEST_CASE("edge case cancellation is an exact polynomial identity") {
  CHECK(wheel::edge_case_cancellation_polynomial(SpaceSignature{2, 1, 3}).is_zero());
  CHECK(wheel::edge_case_cancellation_polynomial(SpaceSignature{1, 2, 3}).is_zero());
  CHECK(wheel::edge_case_cancellation_polynomial(SpaceSignature{1, 1, 2}).is_zero());
  CHECK(wheel::edge_case_cancellation_polynomial(SpaceSignature{2, 2, 4}).is_zero());
  CHECK_THROWS_AS(wheel::edge_case_cancellation_polynomial(SpaceSignature{1, 1, 3}),
                  std::invalid_argument);
}

TEST_CASE("S-term forms vanish outside the window and survive inside") {
  const SpaceSignature sig{1, 1, 3};

  // |S| = 0 and |S| = 3 sit outside the window.
  CHECK(wheel::s_term_form(sig, {}, {Rational(3)}).is_zero());
  CHECK(wheel::s_term_form(sig, {1, 2, 3}, {Rational(5)}).is_zero());

  // Inside the window the generator wedge survives for generic coefficients.
  CHECK_FALSE(wheel::s_term_form(sig, {1}, {Rational(7)}).is_zero());
  CHECK_FALSE(wheel::s_term_form(sig, {1, 3}, {Rational(7)}).is_zero());

  const SpaceSignature big{2, 1, 4};
  CHECK(wheel::s_term_form(big, {1}, {Rational(3), Rational(5)}).is_zero());
  std::vector<Rational> generic;
  for (int i = 0; i < 4; ++i) generic.push_back(Rational(2 * i + 3));
  CHECK_FALSE(wheel::s_term_form(big, {1, 2}, generic).is_zero());

  CHECK_THROWS_AS(wheel::s_term_form(sig, {1}, {}), std::invalid_argument);
  CHECK_THROWS_AS(wheel::s_term_form(sig, {1}, {Rational(1), Rational(2)}),
                  std::invalid_argument);
}

TEST_CASE("derivative-free weights vanish exactly at or below the threshold") {
  const SpaceSignature sig{2, 1, 3};
  TestInput phi = TestInput::diagonal(
      sig, Polynomial(Rational(1)) + Polynomial::variable(y_var(1, 1)),
      {Rational(1), Rational(2)}, {Rational(1)});
  const auto res = wheel::weight_total_result(wheel::WheelData::plain(sig), phi, 0.1, 1.0);
  CHECK(res.value == 0.0);
  CHECK(res.converged);

  const auto ladder = wheel::epsilon_limit(wheel::WheelData::plain(sig), phi, 1.0);
  CHECK(ladder.verdict == LadderVerdict::Converged);
  for (const auto& pt : ladder.ladder) CHECK(pt.value == 0.0);
}

TEST_CASE("two-edge line weight matches the literal kernel quadrature") {
  const SpaceSignature sig{1, 0, 2};
  const TestInput phi = phi_102();

  quadrature::QuadControl ctl;
  ctl.rel_tol = 1e-8;
  const auto lit = oracle::literal_weight_line(phi, 0.1, 1.2, 0.1, 1.2, ctl);
  REQUIRE(lit.converged);

  const auto eng = wheel::weight_total_result(wheel::WheelData::plain(sig), phi, 0.1, 1.2);
  REQUIRE(eng.converged);

  CHECK(rel_diff(lit.value, eng.value) < 1e-7);
  CHECK(rel_diff(lit.value, -2.872457283220580e-01) < 1e-8);

  // Same weight through the whitened Gauss-Hermite route.
  quadrature::QuadControl gh;
  gh.rel_tol = 1e-9;
  CHECK(rel_diff(oracle::direct_weight(sig, phi, 0.1, 1.2, gh).value, eng.value) < 1e-8);
}

TEST_CASE("holomorphic two-edge weight matches the whitened quadrature") {
  const SpaceSignature sig{0, 1, 2};
  const TestInput phi = phi_012();
  quadrature::QuadControl gh;
  gh.rel_tol = 1e-9;
  const auto orc = oracle::direct_weight(sig, phi, 0.1, 1.2, gh);
  REQUIRE(orc.converged);
  const double eng = wheel::weight_total(wheel::WheelData::plain(sig), phi, 0.1, 1.2);
  CHECK(rel_diff(orc.value, eng) < 1e-8);
  CHECK(rel_diff(eng, -8.072496694382719e-02) < 1e-8);
}

TEST_CASE("literal integrand equals the factored Gaussian form pointwise") {
  for (const auto& [sig, phi] : {std::pair{SpaceSignature{1, 0, 2}, phi_102()},
                                 {SpaceSignature{0, 1, 2}, phi_012()},
                                 {SpaceSignature{1, 1, 3}, phi_113_rich()}}) {
    const oracle::LiteralWheel lit(sig);
    const Polynomial R = oracle::r_form(sig);
    SplitRng rng(0x51235u + static_cast<std::uint64_t>(sig.m * 16 + sig.n * 4 + sig.k));
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<double> T;
      for (int e = 0; e < sig.k; ++e) T.push_back(0.05 + rng.uniform() * 1.2);
      std::vector<kernels::Point> slots;
      for (int a = 0; a < sig.slots(); ++a) {
        kernels::Point pt = kernels::Point::zero(sig);
        for (int j = 0; j < sig.m; ++j)
          pt.x[static_cast<std::size_t>(j)] = rng.uniform() * 2.0 - 1.0;
        for (int i = 0; i < sig.n; ++i)
          pt.z[static_cast<std::size_t>(i)] =
              std::complex<double>(rng.uniform() * 2.0 - 1.0, rng.uniform() * 2.0 - 1.0);
        slots.push_back(pt);
      }
      const std::complex<double> a = lit.integrand(phi, T, slots);
      const auto q = oracle::edge_points(sig, slots);
      double gs = 1.0;
      for (int e = 1; e <= sig.k; ++e)
        gs *= kernels::heat_kernel(q[static_cast<std::size_t>(e - 1)], kernels::Point::zero(sig),
                                   T[static_cast<std::size_t>(e - 1)], sig) /
              (2.0 * T[static_cast<std::size_t>(e - 1)]);
      const std::complex<double> rv = R.eval([&](Var v) -> std::complex<double> {
        const auto& pt = slots[static_cast<std::size_t>(v.slot - 1)];
        if (v.kind == VarKind::Y) return pt.x[static_cast<std::size_t>(v.coord - 1)];
        const std::complex<double> w = pt.z[static_cast<std::size_t>(v.coord - 1)];
        return v.kind == VarKind::W ? w : std::conj(w);
      });
      const std::complex<double> b = gs * rv * phi.value(slots);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1e-300));
    }
  }
}

TEST_CASE("fixed-scale engine values match the whitened Gauss-Hermite oracle") {
  const SpaceSignature sig{1, 1, 3};
  const TestInput rich = phi_113_rich();
  const auto decos = wheel::total_decorations(sig);
  const engine::WheelIntegrand w(rich, wheel::WheelData::plain(sig).p, decos);
  const oracle::GhEvaluator ev(sig, rich);

  SplitRng rng(0xa11ce5u);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> T;
    for (int e = 0; e < 3; ++e) T.push_back(0.02 + rng.uniform() * 1.3);
    double eng_pre = 0.0, eng_post = 0.0;
    for (std::size_t i = 0; i < w.decoration_count(); ++i) {
      eng_pre += w.decoration_value_at(i, T, engine::Route::PreIbp);
      eng_post += w.decoration_value_at(i, T, engine::Route::PostIbp);
    }
    const double orc = ev.value(T);
    CHECK(rel_diff(orc, eng_pre) < 1e-9);
    CHECK(rel_diff(orc, eng_post) < 1e-9);
  }

  const std::vector<double> T{0.5, 0.8, 1.1};
  CHECK(rel_diff(ev.value(T), 1.122348932101683e-04) < 1e-9);
}

TEST_CASE("three-edge mixed weight matches the direct undecomposed quadrature") {
  const SpaceSignature sig{1, 1, 3};
  const TestInput light = phi_113_light();
  quadrature::QuadControl ctl;
  ctl.rel_tol = 1e-6;
  ctl.abs_floor = 1e-13;
  const auto orc = oracle::direct_weight(sig, light, 0.35, 1.0, ctl);
  REQUIRE(orc.converged);
  const double eng = wheel::weight_total(wheel::WheelData::plain(sig), light, 0.35, 1.0);
  CHECK(rel_diff(orc.value, eng) < 1e-5);
  CHECK(rel_diff(eng, 4.108341239538593e-04) < 1e-6);
}

TEST_CASE("window-floor ladder extrapolation matches the literal ladder") {
  const TestInput phi = phi_102();
  const wheel::WheelData wd = wheel::WheelData::plain(SpaceSignature{1, 0, 2});

  // the leading correction scales like sqrt(eps), so three sub-tolerance
  // Aitken diffs need 18 dyadic rungs at 1e-4
  const auto eng = wheel::epsilon_limit(wd, phi, 1.2, engine::LadderSpec{18, 1e-4});
  REQUIRE(eng.verdict == LadderVerdict::Converged);
  REQUIRE(eng.quadrature_ok);

  quadrature::QuadControl ctl;
  ctl.rel_tol = 1e-8;
  const auto lad = oracle::literal_ladder_line(phi, 1.2, 18, ctl);
  const auto ex = extrapolate_ladder(lad, 1e-4);
  REQUIRE(ex.verdict == LadderVerdict::Converged);

  REQUIRE(eng.ladder.size() == lad.size());
  for (std::size_t j = 0; j < lad.size(); ++j) {
    CHECK(eng.ladder[j].epsilon == Catch::Approx(lad[j].epsilon).epsilon(1e-12));
    CHECK(std::abs(eng.ladder[j].value - lad[j].value) < 1e-6);
  }
  CHECK(rel_diff(eng.extrapolated, ex.extrapolated) < 1e-6);
  CHECK(rel_diff(eng.extrapolated, -5.1160903114e-01) < 1e-6);
}

TEST_CASE("three-edge ladder converges and matches direct shell boxes") {
  const TestInput light = phi_113_light();
  const wheel::WheelData wd = wheel::WheelData::plain(SpaceSignature{1, 1, 3});
  quadrature::QuadControl quad = engine::WheelIntegrand::default_t_quadrature();
  quad.rel_tol = 1e-6;
  // the leading sqrt(eps) correction needs 14 dyadic rungs for three
  // sub-tolerance Aitken diffs at 1e-2
  const auto rep = wheel::epsilon_limit(wd, light, 1.0, engine::LadderSpec{14, 1e-2}, quad);
  CHECK(rep.verdict == LadderVerdict::Converged);
  CHECK(rep.quadrature_ok);
  // deep-ladder reference value for the eps -> 0 limit
  CHECK(rel_diff(rep.extrapolated, 2.2659701300e-02) < 5e-3);

  // the same rungs assembled from direct quadrature of the undecomposed
  // integrand over the shell boxes
  quadrature::QuadControl ctl;
  ctl.rel_tol = 1e-4;
  const auto orc = oracle::direct_ladder(SpaceSignature{1, 1, 3}, light, 1.0, 6, ctl);
  for (std::size_t j = 0; j < orc.size(); ++j) {
    CHECK(rep.ladder[j].epsilon == Catch::Approx(orc[j].epsilon).epsilon(1e-12));
    CHECK(std::abs(rep.ladder[j].value - orc[j].value) < 1e-9);
  }
}

TEST_CASE("weight terms sum to the total weight") {
  const SpaceSignature sig{1, 1, 3};
  const TestInput light = phi_113_light();
  const wheel::WheelData wd = wheel::WheelData::plain(sig);

  double sum = 0.0;
  std::size_t decorations = 0;
  for (const auto& S : wheel::admissible_S(sig))
    for (const auto& f : wheel::detail::assignments(static_cast<int>(S.size()), sig.m)) {
      const wheel::EdgeDecoration dec{S, f};
      sum += wheel::weight_term(wd, dec, light, 0.35, 1.0);
      decorations += wheel::term_decorations(sig, dec).size();
    }
  CHECK(decorations == 6);

  const double total = wheel::weight_total(wd, light, 0.35, 1.0);
  CHECK(rel_diff(sum, total) < 1e-8);
}

TEST_CASE("weights are linear in the test polynomial") {
  const SpaceSignature sig{1, 1, 3};
  const Polynomial p1 = Polynomial(Rational(1)) + Polynomial::variable(w_var(1, 1));
  const Polynomial p2 = Polynomial::variable(y_var(1, 1)) * Polynomial::variable(w_var(2, 1)) *
                        Polynomial::variable(w_var(1, 1));
  auto mk = [&](const Polynomial& p) {
    return TestInput::diagonal(sig, p, {Rational(2)}, {Rational(3, 2)});
  };
  const wheel::WheelData wd = wheel::WheelData::plain(sig);

  const double wa = wheel::weight_total(wd, mk(p1), 0.3, 1.0);
  const double wb = wheel::weight_total(wd, mk(p2), 0.3, 1.0);
  const double wc =
      wheel::weight_total(wd, mk(p1 * Polynomial(Rational(2)) + p2 * Polynomial(Rational(3))),
                          0.3, 1.0);
  CHECK(std::abs(wc - (2.0 * wa + 3.0 * wb)) <= 1e-9 * std::max(std::abs(wc), 1.0));
}

TEST_CASE("odd test polynomials integrate to exact zero") {
  const SpaceSignature sig{1, 0, 2};
  TestInput phi = TestInput::diagonal(sig, Polynomial::variable(y_var(1, 1)), {Rational(2)}, {});
  const auto res = wheel::weight_total_result(wheel::WheelData::plain(sig), phi, 0.1, 1.0);
  CHECK(res.value == 0.0);
}

TEST_CASE("derivative orders keep both routes in agreement") {
  const SpaceSignature sig{1, 1, 3};
  const TestInput light = phi_113_light();
  wheel::WheelData wd = wheel::WheelData::plain(sig);
  wd.p = {{1}, {0}, {0}};

  const auto decos = wheel::total_decorations(sig);
  const engine::WheelIntegrand w(light, wd.p, decos);
  const auto post = w.integrate(0.35, 1.0, engine::Route::PostIbp);
  const auto pre = w.integrate(0.35, 1.0, engine::Route::PreIbp);
  REQUIRE(post.converged);
  REQUIRE(pre.converged);
  CHECK(std::isfinite(post.value));
  CHECK(rel_diff(post.value, pre.value) < 1e-6);

  CHECK(wheel::weight_total(wd, light, 0.35, 1.0) == Catch::Approx(post.value).epsilon(1e-10));
}

TEST_CASE("cyclic relabeling transports term weights through sigma") {
  const SpaceSignature sig{1, 1, 3};
  const TestInput rich = phi_113_rich();
  const wheel::WheelData wd = wheel::WheelData::plain(sig);
  const auto sigma_of = [&](const wheel::EdgeDecoration& dec) {
    const std::vector<int> g(static_cast<std::size_t>(sig.k) - dec.S.size(), 1);
    return static_cast<double>(engine::decoration_sigma(sig, wheel::decoration_for(sig, dec, g)));
  };

  // orbit pairs whose orientation factor is nonzero on both sides
  for (const wheel::EdgeDecoration dec : {wheel::EdgeDecoration{{2}, {1}},
                                          wheel::EdgeDecoration{{1, 3}, {1, 1}}}) {
    const auto rot = wheel::rotated(wd, dec, rich);
    const double s0 = sigma_of(dec);
    const double s1 = sigma_of(rot.dec);
    REQUIRE(s0 != 0.0);
    REQUIRE(s1 != 0.0);
    const double base = wheel::weight_term(wd, dec, rich, 0.25, 1.0) / s0;
    const double turned = wheel::weight_term(rot.wd, rot.dec, rot.phi, 0.25, 1.0) / s1;
    REQUIRE(std::abs(base) > 1e-6);
    CHECK(std::abs(base - turned) <= 1e-8 * std::abs(base));
  }

  // rotation moves a term out of sigma support: its image weight is exactly zero
  {
    const wheel::EdgeDecoration dec{{1}, {1}};
    const auto rot = wheel::rotated(wd, dec, rich);
    REQUIRE(sigma_of(dec) != 0.0);
    CHECK(sigma_of(rot.dec) == 0.0);
    CHECK(wheel::weight_term(rot.wd, rot.dec, rot.phi, 0.25, 1.0) == 0.0);
  }

  // k rotations restore the term
  {
    const wheel::EdgeDecoration dec{{1, 3}, {1, 1}};
    const auto r1 = wheel::rotated(wd, dec, rich);
    const auto r2 = wheel::rotated(r1.wd, r1.dec, r1.phi);
    const auto r3 = wheel::rotated(r2.wd, r2.dec, r2.phi);
    CHECK(r3.dec.S == dec.S);
    CHECK(r3.dec.ell == dec.ell);
    CHECK(r3.wd.p == wd.p);
    CHECK(r3.phi.poly == rich.poly);
  }
}

TEST_CASE("two-edge totals are invariant under cyclic relabeling") {
  // with plain p the relabeled wheel differs only by the variable transport,
  // and the symmetric T box absorbs the scale cycling
  const TestInput a = phi_102();
  const TestInput b = phi_012();
  for (const TestInput& phi : {a, b}) {
    const wheel::WheelData wd = wheel::WheelData::plain(phi.sig);
    const double base = wheel::weight_total(wd, phi, 0.1, 1.2);
    const double turned = wheel::weight_total(wd, engine::rotate_test_input(phi), 0.1, 1.2);
    REQUIRE(std::abs(base) > 1e-4);
    CHECK(std::abs(base - turned) <= 1e-8 * std::abs(base));
  }
}

TEST_CASE("weight argument validation") {
  const SpaceSignature sig{1, 1, 3};
  const TestInput light = phi_113_light();
  const wheel::WheelData wd = wheel::WheelData::plain(sig);

  CHECK_THROWS_AS(wheel::weight_total(wd, light, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(wheel::weight_total(wd, light, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(wheel::weight_total(wd, phi_102(), 0.1, 1.0), std::invalid_argument);

  wheel::WheelData bad = wd;
  bad.p = {{1}, {0}};
  CHECK_THROWS_AS(wheel::weight_total(bad, light, 0.1, 1.0), std::invalid_argument);

  CHECK_THROWS_AS(wheel::EdgeDecoration({{2, 1}, {1, 1}}).validate(sig), std::invalid_argument);
  CHECK_THROWS_AS(wheel::EdgeDecoration({{1}, {2}}).validate(sig), std::invalid_argument);
  CHECK_THROWS_AS(wheel::EdgeDecoration({{1}, {}}).validate(sig), std::invalid_argument);
}
