#include "doctest.h"

#include "anchored/algorithms.hpp"
#include "test_util.hpp"

using namespace anchored;
using doctest::Approx;

namespace {

const AnchorMode kModes[] = {AnchorMode::fixed, AnchorMode::moving_pos,
                             AnchorMode::moving_neg_naive, AnchorMode::moving_neg_strict};

SolverSettings<double> settings(Algorithm a, AnchorMode m) {
  SolverSettings<double> s;
  s.algorithm = a;
  s.anchor.mode = m;
  return s;
}

Vector<double> ones2() { return Vector<double>::Ones(2); }

}  // namespace

TEST_CASE("hand-checked fixed-anchor EAG-V step") {
  const auto p = make_almost_bilinear(0.01);
  auto s = settings(Algorithm::eagv, AnchorMode::fixed);
  s.alpha0 = 0.5;
  const auto st = init_state(p, s, ones2());
  CHECK(st.z == st.z_bar);
  // G(1, 1) = (1.01, -0.99), so z^{1/2} = (0.495, 1.495),
  // G(z^{1/2}) = (1.49995, -0.48005) and z^1 = (0.250025, 1.240025).
  const auto out = eagv_step(st, p);
  CHECK(out.half_point[0] == Approx(0.495).epsilon(1e-14));
  CHECK(out.half_point[1] == Approx(1.495).epsilon(1e-14));
  CHECK(out.g_half[0] == Approx(1.49995).epsilon(1e-14));
  CHECK(out.g_half[1] == Approx(-0.48005).epsilon(1e-14));
  CHECK(out.next_state.z[0] == Approx(0.250025).epsilon(1e-14));
  CHECK(out.next_state.z[1] == Approx(1.240025).epsilon(1e-14));
  CHECK(out.gamma_used == 0.0);
  CHECK(out.next_state.k == 1);
  CHECK(out.next_state.alpha == eagv_alpha_next(0.5, 0, p.smoothness()));
}

TEST_CASE("FEG first step ignores rho") {
  for (double rho : {-0.3, 0.0, 0.4}) {
    const auto p = make_comonotone_quadratic(1.0, rho);
    const auto st = init_state(p, settings(Algorithm::feg, AnchorMode::moving_pos), ones2());
    const auto out = feg_step(st, p);
    CHECK(out.half_point == st.z);
    CHECK((out.next_state.z - (st.z - st.g / p.smoothness())).norm() < 1e-15);
  }
}

TEST_CASE("stationary at the saddle point in every mode") {
  for (auto alg : {Algorithm::eagv, Algorithm::feg}) {
    for (auto mode : kModes) {
      for (bool prox : {false, true}) {
        const auto p = make_comonotone_quadratic(1.0, alg == Algorithm::feg ? -1.0 / 3.0 : 0.0);
        auto s = settings(alg, mode);
        if (prox) s.proximal = ProximalSettings<double>{};
        auto st = init_state(p, s, Vector<double>::Zero(2));
        for (int k = 0; k < 5; ++k) st = step(st, p).next_state;
        CHECK(st.z.isZero(0));
        CHECK(st.z_bar.isZero(0));
      }
    }
  }
}

TEST_CASE("fixed anchor matches the independent references for 100 steps") {
  const auto ab = make_almost_bilinear(0.01);
  const auto cq = make_comonotone_quadratic(1.0, -1.0 / 3.0);
  const auto ref_ab = testutil::to_ref(ab);
  const auto ref_cq = testutil::to_ref(cq);

  SUBCASE("EAG-V") {
    auto s = settings(Algorithm::eagv, AnchorMode::fixed);
    s.alpha0 = 0.5;
    const auto expect = ref::eagv_fixed(ref_ab, {1, 1}, 0.5, ab.smoothness(), 100);
    auto st = init_state(ab, s, ones2());
    for (int k = 1; k <= 100; ++k) {
      st = eagv_step(st, ab).next_state;
      REQUIRE(std::abs(st.z[0] - expect[k][0]) <= 1e-12 * std::abs(expect[k][0]));
      REQUIRE(std::abs(st.z[1] - expect[k][1]) <= 1e-12 * std::abs(expect[k][1]));
      REQUIRE(st.z_bar == ones2());
    }
  }
  SUBCASE("FEG, rho = 0") {
    const auto expect = ref::feg_fixed(ref_ab, {1, 1}, ab.smoothness(), 0.0, 100);
    auto st = init_state(ab, settings(Algorithm::feg, AnchorMode::fixed), ones2());
    for (int k = 1; k <= 100; ++k) {
      st = feg_step(st, ab).next_state;
      REQUIRE(std::abs(st.z[0] - expect[k][0]) <= 1e-12 * std::abs(expect[k][0]));
      REQUIRE(std::abs(st.z[1] - expect[k][1]) <= 1e-12 * std::abs(expect[k][1]));
    }
  }
  SUBCASE("FEG, rho = -1/3") {
    const auto expect = ref::feg_fixed(ref_cq, {1, 1}, 1.0, -1.0 / 3.0, 100);
    auto st = init_state(cq, settings(Algorithm::feg, AnchorMode::fixed), ones2());
    for (int k = 1; k <= 100; ++k) {
      st = feg_step(st, cq).next_state;
      REQUIRE(testutil::max_rel_diff(st.z, expect[k]) <= 1e-12);
    }
  }
}

TEST_CASE("moving anchors match the independent reference") {
  const auto ab = make_almost_bilinear(0.01);
  const auto r = testutil::to_ref(ab);
  const double c0 = std::numbers::pi * std::numbers::pi / 6;
  for (auto alg : {Algorithm::eagv, Algorithm::feg}) {
    for (auto mode : {AnchorMode::moving_pos, AnchorMode::moving_neg_naive}) {
      const double sign = mode == AnchorMode::moving_pos ? 1.0 : -1.0;
      auto s = settings(alg, mode);
      s.alpha0 = 0.5;
      const auto t = ref::moving(r, {1, 1}, alg == Algorithm::eagv, 0.5, ab.smoothness(), 0.0, c0,
                                 1.0, sign, 200);
      auto st = init_state(ab, s, ones2());
      for (int k = 1; k <= 200; ++k) {
        st = step(st, ab).next_state;
        REQUIRE(testutil::max_rel_diff(st.z, t.z[k]) <= 1e-10);
        REQUIRE(testutil::max_rel_diff(st.z_bar, t.z_bar[k]) <= 1e-10);
        REQUIRE(st.c() == Approx(t.c[k]).epsilon(1e-12));
        REQUIRE(st.gamma == Approx(t.gamma[k]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("gamma forced to zero recovers the fixed anchor bit for bit") {
  const auto p = make_comonotone_quadratic(1.0, -1.0 / 3.0);
  for (auto alg : {Algorithm::eagv, Algorithm::feg}) {
    auto moving = settings(alg, AnchorMode::moving_pos);
    moving.zero_gamma = true;
    auto a = init_state(p, settings(alg, AnchorMode::fixed), ones2());
    auto b = init_state(p, moving, ones2());
    for (int k = 0; k < 100; ++k) {
      a = step(a, p).next_state;
      b = step(b, p).next_state;
      REQUIRE(a.z == b.z);
      REQUIRE(a.z_bar == b.z_bar);
    }
    CHECK(b.c() < a.c() + 1.0);  // the schedule still advanced
  }
}

TEST_CASE("fixed mode leaves the anchor at z0 exactly") {
  const auto p = make_almost_bilinear(0.01);
  for (auto alg : {Algorithm::eagv, Algorithm::feg}) {
    auto st = init_state(p, settings(alg, AnchorMode::fixed), ones2());
    for (int k = 0; k < 300; ++k) {
      const auto out = step(st, p);
      REQUIRE(out.gamma_used == 0.0);
      st = out.next_state;
      REQUIRE(st.z_bar == ones2());
    }
  }
}

TEST_CASE("step identities") {
  const auto ab = make_almost_bilinear(0.01);
  const auto cq = make_comonotone_quadratic(1.0, -1.0 / 3.0);
  for (auto mode : kModes) {
    for (auto alg : {Algorithm::eagv, Algorithm::feg}) {
      const auto& p = alg == Algorithm::eagv ? ab : cq;
      auto st = init_state(p, settings(alg, mode), ones2());
      for (int k = 0; k < 500; ++k) {
        const auto out = step(st, p);
        const auto& ns = out.next_state;
        // Anchor displacement equals |gamma| ||G(z^{k+1})||.
        const double disp = (ns.z_bar - st.z_bar).norm();
        const double expect = std::abs(out.gamma_used) * out.g_next.norm();
        // Rounding in z_bar + gamma g is relative to the anchor's size.
        REQUIRE(std::abs(disp - expect) <= 1e-14 * (expect + st.z_bar.norm()));
        JointPoint<double> lhs, rhs;
        if (alg == Algorithm::eagv) {
          lhs = out.half_point - ns.z;
          rhs = st.alpha * (out.g_half - st.g);
        } else {
          const double beta = 1.0 / (k + 1.0);
          lhs = ns.z - out.half_point;
          rhs = st.alpha * ((1 - beta) * st.g - out.g_half);
        }
        REQUIRE((lhs - rhs).norm() <= 1e-12 * std::max(rhs.norm(), st.z.norm() * 1e-3));
        st = ns;
      }
    }
  }
}

TEST_CASE("strict negative mode caps gamma") {
  const auto p = make_almost_bilinear(0.01);
  auto st = init_state(p, settings(Algorithm::eagv, AnchorMode::moving_neg_strict), ones2());
  double spent = 0, budget = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto out = step(st, p);
    const double B_next = k + 2.0;
    REQUIRE(out.gamma_used <= 0.0);
    spent += 2 * std::abs(out.gamma_used) * B_next * out.g_next.squaredNorm();
    budget += e_default(k + 1, 1.0);
    REQUIRE(spent <= budget * (1 + 1e-12));
    st = out.next_state;
  }
}

TEST_CASE("init_state validation") {
  const auto p = make_almost_bilinear(0.01);
  auto s = settings(Algorithm::eagv, AnchorMode::fixed);
  s.alpha0 = 1.0;
  CHECK_THROWS_AS(init_state(p, s), std::invalid_argument);
  s.alpha0 = 0.5;
  CHECK_THROWS_AS(init_state(p, s, Vector<double>::Ones(3)), std::invalid_argument);
  CHECK(init_state(p, s).z == ones2());
  CHECK_THROWS_AS(eagv_step(init_state(p, settings(Algorithm::feg, AnchorMode::fixed)), p),
                  std::invalid_argument);
  CHECK_THROWS_AS(feg_step(init_state(p, s), p), std::invalid_argument);
  CHECK_THROWS_AS(projected_step(init_state(p, s), p), std::invalid_argument);

  auto prox = settings(Algorithm::eagv, AnchorMode::fixed);
  prox.proximal = ProximalSettings<double>{};
  prox.proximal->t = -1.0;
  CHECK_THROWS_AS(init_state(p, prox), std::invalid_argument);
}

TEST_CASE("nonfinite values are reported with the iteration") {
  int calls = 0;
  auto op = [&calls](const Vector<double>& z) {
    ++calls;
    Vector<double> g(2);
    g << z[1], -z[0];
    if (calls > 6) g[0] = std::numeric_limits<double>::quiet_NaN();
    return g;
  };
  auto p = SaddleProblem<double>::black_box("nan", {1, 1}, op, 1.0, 0.0);
  auto st = init_state(p, settings(Algorithm::feg, AnchorMode::fixed), ones2());
  try {
    for (int k = 0; k < 10; ++k) st = step(st, p).next_state;
    FAIL("expected NonfiniteError");
  } catch (const NonfiniteError& e) {
    CHECK(e.iteration() == 3);
  }
}

TEST_CASE("proximal anchor update") {
  const auto p = make_almost_bilinear(0.01);
  ProximalSettings<double> prox;
  Vector<double> g(2);
  g << 0.3, -0.2;

  // t = 0 is the plain anchor update.
  prox.t = 0;
  CHECK(proximal_anchor_update<double>(ones2(), g, 0.7, p, prox).point == ones2() + 0.7 * g);

  prox.t = 1;
  // Fixed point when there is nothing to add.
  for (double t : {0.1, 1.0, 10.0}) {
    prox.t = t;
    const auto r = proximal_anchor_update<double>(ones2(), Vector<double>::Zero(2), 0.5, p, prox);
    CHECK((r.point - ones2()).norm() < 1e-14);
  }
  // gamma = 0, t = 1: rhs = (1, 1) + G(1, 1) = (2.01, 0.01) and the solve
  // returns (1, 1).
  prox.t = 1;
  Vector<double> rhs0(2);
  rhs0 << 2.01, 0.01;
  CHECK((Eigen::PartialPivLU<Matrix<double>>(Matrix<double>::Identity(2, 2) + p.matrix())
             .solve(rhs0) -
         ones2())
            .norm() < 1e-14);
  const auto r = proximal_anchor_update<double>(ones2(), g, 0.0, p, prox);
  CHECK((r.point - ones2()).norm() < 1e-14);
  CHECK(r.residual <= prox.tol);

  // Residual of the defining equation for a nontrivial update.
  const auto w = proximal_anchor_update<double>(ones2(), g, 2.0, p, prox).point;
  const Vector<double> lhs = w + p.apply(w);
  const Vector<double> rhs = ones2() + 2.0 * g + p.apply(ones2());
  CHECK((lhs - rhs).norm() <= 1e-12);

  // A black-box H goes through the iterative solver to the same answer.
  auto bb = SaddleProblem<double>::black_box(
      "ab-bb", {1, 1}, [&p](const Vector<double>& z) { return p.apply(z); }, p.smoothness(), 0.0);
  const auto wi = proximal_anchor_update<double>(ones2(), g, 2.0, bb, prox);
  CHECK((wi.point - w).norm() < 1e-11);
  CHECK(wi.residual <= prox.tol);

  // An alternative affine H.
  prox.H = std::make_shared<AffineOperator<double>>(
      AffineOperator<double>{Matrix<double>::Identity(2, 2) * 3.0, Vector<double>::Zero(2)});
  const auto wh = proximal_anchor_update<double>(ones2(), g, 2.0, p, prox).point;
  CHECK((wh - (ones2() + 2.0 * g + 3.0 * ones2()) / 4.0).norm() < 1e-14);
}

TEST_CASE("iterative resolvent reports failure") {
  auto bb = SaddleProblem<double>::black_box(
      "rot", {1, 1},
      [](const Vector<double>& z) {
        Vector<double> g(2);
        g << z[1], -z[0];
        return g;
      },
      1.0, 0.0);
  ProximalSettings<double> prox;
  prox.t = 50;
  prox.max_iterations = 3;
  Vector<double> g(2);
  g << 1, 1;
  CHECK_THROWS_AS(proximal_anchor_update<double>(ones2(), g, 1.0, bb, prox), ResolventError);
}

TEST_CASE("proximal with t = 0 reproduces the plain runs exactly") {
  const auto ab = make_almost_bilinear(0.01);
  for (auto alg : {Algorithm::eagv, Algorithm::feg}) {
    for (auto mode : kModes) {
      auto prox = settings(alg, mode);
      prox.proximal = ProximalSettings<double>{};
      prox.proximal->t = 0;
      auto a = init_state(ab, settings(alg, mode), ones2());
      auto b = init_state(ab, prox, ones2());
      for (int k = 0; k < 200; ++k) {
        a = step(a, ab).next_state;
        b = step(b, ab).next_state;
        REQUIRE((a.z - b.z).lpNorm<Eigen::Infinity>() <= 1e-14);
        REQUIRE((a.z_bar - b.z_bar).lpNorm<Eigen::Infinity>() <= 1e-14);
      }
    }
  }
}

TEST_CASE("proximal runs satisfy the resolvent equation every step") {
  const auto ab = make_almost_bilinear(0.01);
  for (auto alg : {Algorithm::eagv, Algorithm::feg}) {
    auto s = settings(alg, AnchorMode::moving_pos);
    s.proximal = ProximalSettings<double>{};
    auto st = init_state(ab, s, ones2());
    REQUIRE(st.resolvent);
    for (int k = 0; k < 500; ++k) {
      const auto out = step(st, ab);
      const auto& nb = out.next_state.z_bar;
      const Vector<double> lhs = nb + ab.apply(nb);
      const Vector<double> rhs = st.z_bar + out.gamma_used * out.g_next + ab.apply(st.z_bar);
      REQUIRE((lhs - rhs).norm() <= 1e-12);
      REQUIRE(out.resolvent_residual <= 1e-12);
      st = out.next_state;
    }
  }
}

TEST_CASE("projected steps keep iterates on the simplices") {
  const auto p = make_nonlinear_game<double>(5, 10, 25, 1);
  const BlockDims d = p.dims();
  auto feasible = [&](const JointPoint<double>& z) {
    return std::abs(z.head(d.n).sum() - 1) <= 1e-12 && std::abs(z.tail(d.m).sum() - 1) <= 1e-12 &&
           z.minCoeff() >= 0.0;
  };
  for (auto alg : {Algorithm::eagv, Algorithm::feg}) {
    for (auto mode : kModes) {
      auto st = init_state(p, settings(alg, mode));
      REQUIRE(feasible(st.z));
      for (int k = 0; k < 1000; ++k) {
        const auto out = projected_step(st, p);
        REQUIRE(feasible(out.half_point));
        REQUIRE(feasible(out.next_state.z));
        REQUIRE(feasible(out.next_state.z_bar));
        REQUIRE(out.next_state.z.allFinite());
        st = out.next_state;
      }
    }
  }
  CHECK_THROWS_AS(eagv_step(init_state(p, settings(Algorithm::eagv, AnchorMode::fixed)), p),
                  std::invalid_argument);
}

TEST_CASE("projected step is stationary at a feasible fixed point") {
  // For the bilinear game with K = 0 and Q = 0 every feasible point is a
  // solution and G vanishes.
  Matrix<double> M = Matrix<double>::Zero(5, 5);
  auto p = SaddleProblem<double>::affine("zero", {3, 2}, M, Vector<double>::Zero(5), 0.0, {},
                                         std::nullopt, Constraint::product_of_simplices, 0.0);
  // R = 0 is rejected by the solver, so use a black-box wrapper with R = 1.
  auto q = SaddleProblem<double>::black_box(
      "zero", {3, 2}, [](const Vector<double>& z) { return Vector<double>::Zero(z.size()).eval(); },
      1.0, 0.0, {}, std::nullopt, Constraint::product_of_simplices);
  CHECK_THROWS(init_state(p, settings(Algorithm::feg, AnchorMode::fixed)));
  Vector<double> z(5);
  z << 0.2, 0.3, 0.5, 0.6, 0.4;
  auto st = init_state(q, settings(Algorithm::feg, AnchorMode::moving_pos), z);
  const auto out = projected_step(st, q);
  CHECK((out.next_state.z - z).norm() < 1e-15);
  CHECK((out.next_state.z_bar - z).norm() < 1e-15);
}
