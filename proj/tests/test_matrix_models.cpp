#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "toprec/chain.hpp"
#include "toprec/loop_equations.hpp"
#include "toprec/observables.hpp"
#include "toprec/one_matrix.hpp"
#include "toprec/oracle.hpp"

using namespace toprec;
using fixtures::P;

namespace {

Scalar random_rational(std::mt19937& rng, int span = 5, int maxden = 4) {
  std::uniform_int_distribution<int> num(-span, span), den(1, maxden);
  return frac(num(rng), den(rng));
}

Scalar random_nonzero(std::mt19937& rng, int span = 5, int maxden = 4) {
  for (;;) {
    const Scalar q = random_rational(rng, span, maxden);
    if (!is_zero(q)) return q;
  }
}

// Potential of exact degree deg with generic coefficients.
Poly random_potential(std::mt19937& rng, int deg) {
  std::vector<Scalar> c(static_cast<std::size_t>(deg) + 1);
  for (int k = 1; k < deg; ++k) c[static_cast<std::size_t>(k)] = random_rational(rng);
  c[static_cast<std::size_t>(deg)] = random_nonzero(rng);
  return Poly(c);
}

ChainModel random_chain(std::mt19937& rng, int m, int max_deg) {
  std::uniform_int_distribution<int> deg(2, max_deg);
  ChainModel model;
  for (int k = 0; k < m; ++k) model.potentials.push_back(random_potential(rng, deg(rng)));
  for (int k = 0; k < m; ++k) model.couplings.push_back(random_nonzero(rng));
  model.lambdas = {random_rational(rng)};
  return model;
}

// Determinant of a square matrix by Gaussian elimination over Q.
Scalar determinant(std::vector<std::vector<Scalar>> a) {
  const std::size_t n = a.size();
  Scalar det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && is_zero(a[piv][col])) ++piv;
    if (piv == n) return 0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const Scalar f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

}  // namespace

// ---------------------------------------------------------------- one matrix

TEST(OneCutCurve, GaussianMatchesSemicircle) {
  const SpectralCurve c = one_cut_curve(OneMatrixModel{P({0, 0, frac(1, 2)}), Scalar(1), std::nullopt});
  const SpectralCurve g = fixtures::gaussian();
  EXPECT_EQ(c.x(), g.x());
  EXPECT_EQ(c.y(), g.y());
  EXPECT_EQ(c.sigma(), g.sigma());
}

TEST(OneCutCurve, GaussianScalesWithT) {
  // V = x^2/2, t = 4: x = 2(z + 1/z), y = 2/z.
  const SpectralCurve c = one_cut_curve(OneMatrixModel{P({0, 0, frac(1, 2)}), Scalar(4), std::nullopt});
  EXPECT_EQ(c.x(), fixtures::R(P({2, 0, 2}), P({0, 1})));
  EXPECT_EQ(c.y(), fixtures::R(P({2}), P({0, 1})));
}

TEST(OneCutCurve, QuarticExample) {
  const SpectralCurve c = one_cut_curve(OneMatrixModel{fixtures::quartic_potential(), frac(5, 4), std::nullopt});
  const SpectralCurve q = fixtures::quartic();
  EXPECT_EQ(c.x(), q.x());
  EXPECT_EQ(c.y(), q.y());
}

TEST(OneCutCurve, SymmetricQuarticEndpointRelation) {
  // V = x^2/2 + g x^4/4: gamma^2 satisfies 3 g gamma^4 + gamma^2 = t.
  std::mt19937 rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    const Scalar g = frac(std::uniform_int_distribution<int>(1, 6)(rng), std::uniform_int_distribution<int>(6, 30)(rng));
    const Scalar gamma = frac(std::uniform_int_distribution<int>(1, 5)(rng), std::uniform_int_distribution<int>(2, 5)(rng));
    const Scalar t = 3 * g * toprec::pow(gamma, 4) + gamma * gamma;
    const Poly V = P({0, 0, frac(1, 2), 0, g / 4});
    const SpectralCurve c = one_cut_curve(OneMatrixModel{V, t, std::nullopt});
    const Scalar gam = c.x().num().coefficient(2);
    EXPECT_EQ(c.x().den(), Poly::monomial(1, 1));
    EXPECT_EQ(gam, gamma);
    EXPECT_EQ(c.x().num().coefficient(1), 0);
    EXPECT_EQ(3 * g * toprec::pow(gam, 4) + gam * gam - t, 0);
  }
}

TEST(OneCutCurve, OutputPassesPotentialAndTChecks) {
  struct Case {
    Poly V;
    Scalar t;
  };
  const std::vector<Case> cases = {{P({0, 0, frac(1, 2)}), frac(9, 4)}, {P({0, -1, frac(1, 2)}), Scalar(1)}, {fixtures::quartic_potential(), frac(5, 4)}};
  for (const auto& cs : cases) {
    const SpectralCurve c = one_cut_curve(OneMatrixModel{cs.V, cs.t, std::nullopt});
    EXPECT_NO_THROW(check_curve_matches_potential(c, cs.V, cs.t));
    Engine e(c);
    const Expansion ex = expand_observable(c, e.omega(0, 1), {0});
    EXPECT_EQ(ex.at({0}), cs.t);
  }
}

TEST(OneCutCurve, ShiftedGaussianCentersTheCut) {
  // V = (x - 1)^2 / 2 up to a constant: alpha = 1.
  const SpectralCurve c = one_cut_curve(OneMatrixModel{P({0, -1, frac(1, 2)}), Scalar(1), std::nullopt});
  EXPECT_EQ(c.x().num(), P({1, 1, 1}));
}

TEST(OneCutCurve, IrrationalEndpointsAreReported) {
  // V = x^2/2 + x^4/4 at t = 1: 3 gamma^4 + gamma^2 = 1 has no rational root.
  const OneMatrixModel m{P({0, 0, frac(1, 2), 0, frac(1, 4)}), Scalar(1), std::nullopt};
  EXPECT_THROW(one_cut_curve(m), ComputationError);
}

TEST(OneCutCurve, CubicWithoutRationalCutFails) {
  const OneMatrixModel m{P({0, 0, frac(1, 2), frac(1, 3)}), Scalar(1, 10), std::nullopt};
  EXPECT_THROW(one_cut_curve(m), ComputationError);
}

TEST(OneCutCurve, RejectsSeriesModelAndDegeneratePotential) {
  EXPECT_THROW(one_cut_curve(OneMatrixModel{P({0, 0, frac(1, 2)}), SeriesSpec{}, std::nullopt}), Error);
  EXPECT_THROW(one_cut_curve(OneMatrixModel{P({0, 1}), Scalar(1), std::nullopt}), Error);
}

TEST(OneCutSeries, QuarticEndpointSeries) {
  const OneMatrixModel m{fixtures::quartic_potential(), SeriesSpec{"s", 2, 10}, std::nullopt};
  const OneCutSeries s = one_cut_series(m);
  ASSERT_TRUE(s.gamma.has_value());
  // 3 g gamma^4 + gamma^2 = s^2 with g = 1/12.
  EXPECT_EQ(s.gamma->coefficient(1), 1);
  EXPECT_EQ(s.gamma->coefficient(3), frac(-1, 8));
  EXPECT_EQ(s.gamma->coefficient(5), frac(7, 128));
  for (int k = 0; k <= s.alpha.order(); ++k) EXPECT_EQ(s.alpha.coefficient(k), 0);
  const TruncatedSeries g2 = *s.gamma * *s.gamma;
  const TruncatedSeries lhs = frac(1, 4) * g2.pow(2) + g2;
  for (int k = 0; k <= g2.order(); ++k) EXPECT_EQ(lhs.coefficient(k), k == 2 ? 1 : 0) << "s^" << k;
}

TEST(OneCutSeries, NewtonResidualVanishesThroughOrder) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Scalar> c{0, 0, frac(1, 2)};
    c.push_back(random_rational(rng, 3, 5));
    c.push_back(random_rational(rng, 3, 5));
    const Poly V(c);
    const int power = 1 + trial % 2;
    const OneMatrixModel m{V, SeriesSpec{"s", power, 8}, std::nullopt};
    const OneCutSeries s = one_cut_series(m);
    const ZhukovskyCoefficients zc = zhukovsky_coefficients(V);
    const TruncatedSeries r1 = detail::eval_series(zc.F1, s.alpha, s.g2);
    const TruncatedSeries r2 = detail::eval_series(zc.F2, s.alpha, s.g2);
    for (int k = 0; k <= 8; ++k) {
      EXPECT_EQ(r1.coefficient(k), 0) << "trial " << trial << " s^" << k;
      EXPECT_EQ(r2.coefficient(k), k == power ? 1 : 0) << "trial " << trial << " s^" << k;
    }
  }
}

TEST(OneCutSeries, QuarticPlanarMomentsMatchWickOracle) {
  const Poly V = fixtures::quartic_potential();
  const OneMatrixModel m{V, SeriesSpec{"s", 2, 12}, std::nullopt};
  const OneCutSeries s = one_cut_series(m);
  const std::vector<TruncatedSeries> mom = planar_moments(s, 6);
  EXPECT_EQ(mom[2].coefficient(4), 1);
  EXPECT_EQ(mom[2].coefficient(6), frac(-1, 6));
  EXPECT_EQ(mom[2].coefficient(8), frac(1, 16));
  // Depth 6 at j = 6 would need 17!! matchings.
  for (const auto& [j, depth] : std::vector<std::pair<int, int>>{{2, 6}, {4, 6}, {6, 4}}) {
    const CorrelatorSeries o = connected_correlator_series(V, 0, {j}, depth);
    const int top = std::min(o.complete_through, mom[static_cast<std::size_t>(j)].order());
    for (int p = 0; p <= top; ++p) EXPECT_EQ(mom[static_cast<std::size_t>(j)].coefficient(p), o.coefficient(p)) << "j=" << j << " s^" << p;
  }
  for (int j : {1, 3, 5})
    for (int p = 0; p <= mom[static_cast<std::size_t>(j)].order(); ++p) EXPECT_EQ(mom[static_cast<std::size_t>(j)].coefficient(p), 0);
}

TEST(OneCutSeries, AgreesWithExactModeWhereBothApply) {
  // Gaussian: t = s exactly, gamma = s^{1/2} is not a series in s; with t = s^2 it is.
  const OneCutSeries s = one_cut_series(OneMatrixModel{P({0, 0, frac(1, 2)}), SeriesSpec{"s", 2, 6}, std::nullopt});
  ASSERT_TRUE(s.gamma.has_value());
  EXPECT_EQ(s.gamma->coefficient(1), 1);
  for (int k = 2; k <= s.gamma->order(); ++k) EXPECT_EQ(s.gamma->coefficient(k), 0);
  const OneCutSeries odd = one_cut_series(OneMatrixModel{P({0, 0, frac(1, 2)}), SeriesSpec{"s", 1, 6}, std::nullopt});
  EXPECT_FALSE(odd.gamma.has_value());
  EXPECT_THROW(planar_moments(odd, 2), ComputationError);
}

TEST(OneCutSeries, RejectsBadSpecs) {
  EXPECT_THROW(one_cut_series(OneMatrixModel{P({0, 0, frac(1, 2)}), Scalar(1), std::nullopt}), PreconditionError);
  EXPECT_THROW(one_cut_series(OneMatrixModel{P({0, 0, frac(1, 2)}), SeriesSpec{"s", 3, 2}, std::nullopt}), PreconditionError);
}

// ---------------------------------------------------------------- chain

TEST(Chain, FExamples) {
  ChainModel model{{P({0, 0, frac(1, 2)}), P({0, 0, frac(1, 2)})}, {frac(1, 2)}};
  const MPoly x1 = MPoly::variable(2, 0), x2 = MPoly::variable(2, 1);
  EXPECT_EQ(f_chain_polynomial(model, 1, 1), x1);
  EXPECT_EQ(f_chain_polynomial(model, 2, 2), x2);
  EXPECT_EQ(f_chain_polynomial(model, 1, 2), frac(3, 4) * (x1 * x2));
  EXPECT_EQ(f_chain_polynomial(model, 2, 1), MPoly::constant(2, 1));
  EXPECT_EQ(f_chain_polynomial(model, 3, 1), MPoly(2));
  EXPECT_THROW(f_chain_polynomial(model, 1, 3), PreconditionError);
}

TEST(Chain, FMatchesDeterminantAndCofactorRecursion) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = std::uniform_int_distribution<int>(1, 4)(rng);
    const ChainModel model = random_chain(rng, m, 3);
    std::vector<Scalar> pt;
    for (int k = 0; k < m; ++k) {
      pt.push_back(random_rational(rng, 7, 5));
    }
    for (int i = 1; i <= m; ++i)
      for (int j = i; j <= m; ++j) {
        const MPoly f = f_chain_polynomial(model, i, j);
        // Cofactor expansion along the first row.
        const Scalar ci = model.coupling(i);
        const MPoly xi = MPoly::variable(m, i - 1);
        MPoly rhs = compose(model.potentials[static_cast<std::size_t>(i - 1)].derivative(), xi) * f_chain_polynomial(model, i + 1, j);
        if (i + 1 <= j) rhs -= (ci * ci) * (xi * MPoly::variable(m, i) * f_chain_polynomial(model, i + 2, j));
        EXPECT_EQ(f, rhs) << "trial " << trial << " (" << i << "," << j << ")";
        // Tridiagonal determinant with diagonal V'_k(x_k), off-diagonal c_k x_k and c_k x_{k+1}.
        const std::size_t n = static_cast<std::size_t>(j - i + 1);
        std::vector<std::vector<Scalar>> a(n, std::vector<Scalar>(n, Scalar(0)));
        for (std::size_t r = 0; r < n; ++r) {
          const int k = i + static_cast<int>(r);
          a[r][r] = model.potentials[static_cast<std::size_t>(k - 1)].derivative()(pt[static_cast<std::size_t>(k - 1)]);
          if (r + 1 < n) {
            a[r][r + 1] = model.coupling(k) * pt[static_cast<std::size_t>(k - 1)];
            a[r + 1][r] = model.coupling(k) * pt[static_cast<std::size_t>(k)];
          }
        }
        EXPECT_EQ(f.evaluate(pt), determinant(a)) << "trial " << trial << " (" << i << "," << j << ")";
      }
  }
}

TEST(Chain, HatXUnitQuadraticChain) {
  const Poly q = P({0, 0, frac(1, 2)});
  const ChainModel model{{q, q, q}, {1, 1, 1}};
  const MPoly x1 = MPoly::variable(2, 0), x2 = MPoly::variable(2, 1);
  EXPECT_EQ(hat_x_sequence(model, 1), x1);
  EXPECT_EQ(hat_x_sequence(model, 2), x2);
  EXPECT_EQ(hat_x_sequence(model, 3), x2 - x1);
  EXPECT_EQ(hat_x_sequence(model, 4), -x1);
  EXPECT_THROW(hat_x_sequence(model, 5), PreconditionError);
}

TEST(Chain, HatXFollowsForwardIteration) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = std::uniform_int_distribution<int>(1, 4)(rng);
    const ChainModel model = random_chain(rng, m, 3);
    const Scalar a = random_rational(rng), b = random_rational(rng);
    // xi_{k+1} = (V'_k(xi_k) - c_{k-1,k} xi_{k-1}) / c_{k,k+1}, iterated numerically.
    std::vector<Scalar> xi{a, b};
    for (int k = 2; k <= m; ++k)
      xi.push_back((model.potentials[static_cast<std::size_t>(k - 1)].derivative()(xi[static_cast<std::size_t>(k - 1)]) -
                    model.coupling(k - 1) * xi[static_cast<std::size_t>(k - 2)]) /
                   model.coupling(k));
    HatXTable table(model);
    for (int i = 1; i <= m + 1; ++i) EXPECT_EQ(table.at(i).evaluate({a, b}), xi[static_cast<std::size_t>(i - 1)]) << "trial " << trial << " i=" << i;
  }
}

TEST(Chain, HatXRejectsVanishingCoupling) {
  const Poly q = P({0, 0, frac(1, 2)});
  EXPECT_THROW(hat_x_sequence(ChainModel{{q, q, q}, {1, 0}}, 4), PreconditionError);
}

TEST(Chain, SaddleCountExamples) {
  // m = 2 with cubic potentials and one external eigenvalue: D = 1 * 2 * 2.
  ChainModel cubic{{P({0, 1, 1, frac(1, 3)}), P({0, -1, frac(1, 2), frac(1, 3)})}, {2, 3}};
  const SaddleCount sc = saddle_count(cubic);
  EXPECT_EQ(sc.degree, 4);
  EXPECT_EQ(sc.expected, 4);
  // m = 1: S(V'_1(xi)/c) = 0 has deg V' solutions.
  ChainModel single{{P({0, 0, 0, 0, 1})}, {frac(1, 2)}};
  EXPECT_EQ(saddle_count(single).degree, 3);
  // Two external eigenvalues double the count.
  ChainModel two = cubic;
  two.lambdas = {0, 1};
  two.weights = {1, 1};
  EXPECT_EQ(saddle_count(two).degree, 8);
}

TEST(Chain, SaddleCountPolynomialVanishesOnSaddles) {
  // m = 1, V = x^2/2, c = 1, lambda = 3: saddle xi = 3.
  ChainModel model{{P({0, 0, frac(1, 2)})}, {1}};
  model.lambdas = {3};
  const SaddleCount sc = saddle_count(model);
  EXPECT_EQ(sc.degree, 1);
  EXPECT_EQ(sc.polynomial(Scalar(3)), 0);
}

TEST(Chain, SaddleCountDegreeOnRandomModels) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = std::uniform_int_distribution<int>(1, 4)(rng);
    ChainModel model = random_chain(rng, m, 3);
    const int s = std::uniform_int_distribution<int>(1, 2)(rng);
    model.lambdas = {0};
    if (s == 2) model.lambdas.push_back(1);
    model.weights.assign(model.lambdas.size(), Scalar(1));
    int expected = s;
    for (const auto& v : model.potentials) expected *= v.degree() - 1;
    const SaddleCount sc = saddle_count(model);
    EXPECT_EQ(sc.degree, expected) << "trial " << trial;
  }
}

TEST(Chain, ValidateRejectsMalformedModels) {
  const Poly q = P({0, 0, frac(1, 2)});
  EXPECT_THROW(ChainModel{}.validate(), PreconditionError);
  EXPECT_THROW((ChainModel{{q, q}, {}}.validate()), PreconditionError);
  EXPECT_THROW((ChainModel{{P({0, 1}), q}, {1}}.validate()), PreconditionError);
  ChainModel dup{{q}, {1}};
  dup.lambdas = {1, 1};
  dup.weights = {1, 1};
  EXPECT_THROW(dup.validate(), PreconditionError);
}

TEST(GaussianChain, SingleMatrixIsOneMatrixGaussian) {
  const ChainModel model{{P({0, 0, frac(1, 2)})}, {}};
  const GaussianChainCurve g = gaussian_chain_curve(model);
  const SpectralCurve c = g.to_spectral_curve();
  const SpectralCurve ref = fixtures::gaussian();
  EXPECT_EQ(c.x(), ref.x());
  EXPECT_EQ(c.y(), ref.y());
}

TEST(GaussianChain, ZeroCouplingDecouples) {
  const ChainModel model{{P({0, 0, frac(1, 2)}), P({0, 0, frac(1, 2)})}, {0}};
  const GaussianChainCurve g = gaussian_chain_curve(model);
  EXPECT_EQ(g.gamma2, 1);
  const SpectralCurve c = g.to_spectral_curve();
  EXPECT_EQ(c.x(), fixtures::gaussian().x());
  EXPECT_EQ(c.y(), fixtures::gaussian().y());
}

TEST(GaussianChain, HalfCouplingGamma) {
  const ChainModel model{{P({0, 0, frac(1, 2)}), P({0, 0, frac(1, 2)})}, {frac(1, 2)}};
  const GaussianChainCurve g = gaussian_chain_curve(model);
  EXPECT_EQ(g.gamma2, frac(4, 3));
  EXPECT_FALSE(g.gamma.has_value());
  EXPECT_THROW(g.to_spectral_curve(), ComputationError);
}

TEST(GaussianChain, PlanarMomentsMatchTwoMatrixWick) {
  // Action (N/t)(M1^2/2 + M2^2/2 - c M1 M2): covariance Q^{-1}, Q = [[1, -c], [-c, 1]].
  for (const Scalar& t : {Scalar(1), Scalar(3)}) {
    const Scalar c = frac(1, 2);
    ChainModel model{{P({0, 0, frac(1, 2)}), P({0, 0, frac(1, 2)})}, {c}};
    model.t = t;
    const GaussianChainCurve g = gaussian_chain_curve(model);
    const Scalar det = 1 - c * c;
    const WickModel wick{t, {{1 / det, c / det}, {c / det, 1 / det}}};
    const std::vector<Scalar> planar = g.planar_moments(6);
    for (int k = 1; k <= 3; ++k) {
      const MomentResult r = gaussian_species_moment(wick, {std::vector<int>(static_cast<std::size_t>(2 * k), 0)});
      // W_1 = (N/t) W_1^(0) + ...: the planar part is t times the N^1 coefficient.
      EXPECT_EQ(planar[static_cast<std::size_t>(2 * k)], t * r.connected_genus(0)) << "t=" << t << " k=" << k;
      EXPECT_EQ(planar[static_cast<std::size_t>(2 * k - 1)], 0);
    }
  }
}

TEST(GaussianChain, ThreeMatrixChainMatchesWick) {
  // V_k = a_k x^2/2, couplings c12, c23; quadratic form is tridiagonal.
  const Scalar a1 = 2, a2 = 3, a3 = frac(5, 2), c12 = 1, c23 = frac(1, 2);
  const ChainModel model{{P({0, 0, a1 / 2}), P({0, 0, a2 / 2}), P({0, 0, a3 / 2})}, {c12, c23}};
  const GaussianChainCurve g = gaussian_chain_curve(model);
  // (Q^{-1})_{11} = (a2 a3 - c23^2) / det Q.
  const Scalar detQ = a1 * (a2 * a3 - c23 * c23) - c12 * c12 * a3;
  EXPECT_EQ(g.gamma2, (a2 * a3 - c23 * c23) / detQ);
}

TEST(GaussianChain, RejectsNonGaussianAndDegenerate) {
  EXPECT_THROW(gaussian_chain_curve(ChainModel{{P({0, 0, frac(1, 2), 1})}, {}}), PreconditionError);
  // A_2 = 1, A_1 = 1 - 1 = 0.
  EXPECT_THROW(gaussian_chain_curve(ChainModel{{P({0, 0, frac(1, 2)}), P({0, 0, frac(1, 2)})}, {1}}), ComputationError);
  ChainModel shifted{{P({0, 0, frac(1, 2)})}, {}};
  shifted.lambdas = {1};
  EXPECT_THROW(gaussian_chain_curve(shifted), PreconditionError);
}
