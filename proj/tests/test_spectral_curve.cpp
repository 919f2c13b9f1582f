#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "toprec/spectral_curve.hpp"

using namespace toprec;
using namespace fixtures;

namespace {

std::string violated(const CurveSpec& s) {
  try {
    validate_curve(s);
  } catch (const ValidationError& e) {
    return e.invariant();
  }
  return "";
}

}  // namespace

TEST(ValidateCurve, GaussianCurve) {
  const SpectralCurve c = gaussian();
  EXPECT_EQ(c.branch_points(), (std::vector<Scalar>{-1, 1}));
  EXPECT_TRUE(c.physical_pole().infinite);
  ASSERT_TRUE(c.t().has_value());
  EXPECT_EQ(*c.t(), 1);
}

TEST(ValidateCurve, AiryCurveWithoutT) {
  const SpectralCurve c = airy();
  EXPECT_EQ(c.branch_points(), (std::vector<Scalar>{0}));
  EXPECT_FALSE(c.t().has_value());
}

TEST(ValidateCurve, RejectsTrivialInvolution) {
  CurveSpec s = airy_spec();
  s.sigma = R(P({0, 1}));
  EXPECT_EQ(violated(s), "y-not-sigma-invariant");
}

TEST(ValidateCurve, RejectsNonInvolution) {
  CurveSpec s = gaussian_spec();
  s.sigma = R(P({-1, 2}));
  EXPECT_EQ(violated(s), "sigma-involution");
}

TEST(ValidateCurve, RejectsSigmaNotPreservingX) {
  CurveSpec s = gaussian_spec();
  s.sigma = R(P({0, -1}));
  EXPECT_EQ(violated(s), "sigma-preserves-x");
}

TEST(ValidateCurve, RejectsTMismatch) {
  CurveSpec s = gaussian_spec();
  s.t = 2;
  EXPECT_EQ(violated(s), "t-normalization");
}

TEST(ValidateCurve, RejectsDoublePoleWhenTDeclared) {
  CurveSpec s = airy_spec();
  s.t = 1;
  EXPECT_EQ(violated(s), "physical-pole-simple");
}

TEST(ValidateCurve, RejectsWrongDeclaredBranchPoints) {
  CurveSpec s = gaussian_spec();
  s.branch_points = std::vector<Scalar>{1};
  EXPECT_EQ(violated(s), "branch-points");
}

TEST(ValidateCurve, InvariantsHoldExactly) {
  for (const SpectralCurve& c : {gaussian(), airy(), quartic()}) {
    EXPECT_EQ(c.x().compose(c.sigma()), c.x());
    EXPECT_EQ(c.sigma().compose(c.sigma()), RationalFunction::identity());
    for (const Scalar& a : c.branch_points()) {
      EXPECT_EQ(c.sigma()(a), a);
      // sigma(z') = a - (z' - a) + O((z' - a)^2)
      const LaurentSeries s = laurent_expand(c.sigma(), Point::at(a), 1);
      EXPECT_EQ(s.coefficient(0), a);
      EXPECT_EQ(s.coefficient(1), -1);
    }
  }
}

TEST(FindBranchPoints, Examples) {
  EXPECT_EQ(find_branch_points(R(P({0, 0, 1}))), (std::vector<Scalar>{0}));
  EXPECT_EQ(find_branch_points(R(P({1, 0, 1}), P({0, 1}))), (std::vector<Scalar>{-1, 1}));
  try {
    find_branch_points(R(P({0, 0, 0, 1})));
    FAIL() << "double zero accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.invariant(), "simple-branch-points");
  }
  try {
    find_branch_points(R(P({0, -2, 0, frac(1, 3)})));  // dx = z^2 - 2
    FAIL() << "irrational branch points accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.invariant(), "rational-branch-points");
  }
}

TEST(KernelData, AiryFactorAndSigma) {
  const KernelData k = kernel_data(airy(), 0, 4);
  // 1 / ((2z') (2z')) = z'^-2 / 4
  EXPECT_EQ(k.factor.valuation(), -2);
  EXPECT_EQ(k.factor.coefficient(-2), frac(1, 4));
  for (int j = -1; j <= 4; ++j) EXPECT_EQ(k.factor.coefficient(j), 0) << j;
  EXPECT_EQ(k.sigma.coefficient(1), -1);
  EXPECT_EQ(k.sigma.coefficient(0), 0);
}

TEST(KernelData, GaussianFactorMatchesHandAlgebra) {
  // z'^3 / ((1 - z'^2)(z'^2 - 1)) expanded at z' = 1
  const RationalFunction hand = R(P({0, 0, 0, 1}), P({1, 0, -1}) * P({-1, 0, 1}));
  const KernelData k = kernel_data(gaussian(), 1, 6);
  const LaurentSeries ref = laurent_expand(hand, Point::at(1), 6);
  EXPECT_EQ(k.factor.valuation(), -2);
  for (int j = -2; j <= 6; ++j) EXPECT_EQ(k.factor.coefficient(j), ref.coefficient(j)) << j;
}

TEST(KernelData, DoublePoleAtEverySimpleBranchPoint) {
  for (const SpectralCurve& c : {gaussian(), airy(), quartic()})
    for (const Scalar& a : c.branch_points()) EXPECT_EQ(kernel_data(c, a, 0).factor.valuation(), -2);
}

TEST(PrimitivePhi, Airy) {
  const LaurentSeries phi = primitive_phi_series(airy(), 0, 6);
  for (int j = 0; j <= 6; ++j) EXPECT_EQ(phi.coefficient(j), j == 3 ? frac(2, 3) : Scalar(0)) << j;
}

TEST(PrimitivePhi, DerivativeReproducesYdx) {
  for (const SpectralCurve& c : {gaussian(), quartic()})
    for (const Scalar& a : c.branch_points()) {
      const LaurentSeries phi = primitive_phi_series(c, a, 8);
      EXPECT_EQ(phi.coefficient(0), 0);
      const LaurentSeries d = phi.derivative();
      const LaurentSeries ydx = laurent_expand(c.ydx(), Point::at(a), 7);
      for (int j = 0; j <= 7; ++j) EXPECT_EQ(d.coefficient(j), ydx.coefficient(j)) << to_string(a) << " " << j;
    }
}

TEST(PrimitivePhi, GaussianMatchesClosedForm) {
  // log z + 1/(2 z^2) - 1/2 expanded at z = 1 + e
  const LaurentSeries phi = primitive_phi_series(gaussian(), 1, 5);
  const std::vector<Scalar> expect{0, 0, 1, frac(-5, 3), frac(9, 4), frac(-14, 5)};
  for (int j = 0; j <= 5; ++j) EXPECT_EQ(phi.coefficient(j), expect[static_cast<std::size_t>(j)]) << j;
}

TEST(YdxExpansion, GaussianCatalan) {
  const PoleExpansion e = ydx_expansion_at_pole(gaussian(), 7);
  EXPECT_EQ(e.t, 1);
  const std::vector<Scalar> expect{0, 1, 0, 1, 0, 2, 0, 5};
  for (int k = 0; k <= 7; ++k) EXPECT_EQ(e.y_series.coefficient(k), expect[static_cast<std::size_t>(k)]) << k;
}

TEST(YdxExpansion, ScaledGaussian) {
  const PoleExpansion e = ydx_expansion_at_pole(validate_curve(gaussian_spec(3)), 5);
  EXPECT_EQ(e.t, 3);
  EXPECT_EQ(e.y_series.coefficient(3), 3);
}
