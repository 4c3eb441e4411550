#include <doctest.h>

#include "fixtures.hpp"
#include "levyou/criteria.hpp"
#include "levyou/errors.hpp"

#include <cmath>
#include <random>

using namespace levyou;
using namespace fixtures;

TEST_CASE("rank conditions on the documented fixtures") {
  CHECK(kalman_check(Matrix::Zero(2, 2), Matrix::Identity(2, 2)).holds);
  const RankReport zero_b = kalman_check(mat({{1, 2}, {3, 4}}), Matrix::Zero(2, 1));
  CHECK(zero_b.rank == 0);
  CHECK_FALSE(zero_b.holds);
  const Matrix A = mat({{1, 0}, {1, 0}});
  const Matrix e1 = mat({{1}, {0}});
  const RankReport k = kalman_check(A, e1);
  CHECK(k.rank == 2);
  CHECK(k.block.isApprox(mat({{1, 1}, {0, 1}})));

  CHECK(h1_check(A, Matrix::Zero(2, 0), e1).holds);
  CHECK(h1_check(Matrix::Zero(3, 3), Matrix::Zero(3, 0), Matrix::Identity(3, 3)).holds);
  CHECK_FALSE(h1_check(Matrix::Zero(2, 2), Matrix::Zero(2, 0), Matrix::Zero(2, 1)).holds);

  const RankReport h2_first = h2_check(A, e1);
  CHECK(h2_first.rank == 1);
  CHECK_FALSE(h2_first.holds);
  CHECK(h2_check(mat({{0, 1}, {1, 0}}), e1).holds);
  CHECK(h2_check(Matrix::Zero(2, 2), Matrix::Identity(2, 2)).rank == 0);

  CHECK(h2prime_check(A, Matrix::Identity(2, 2), e1).holds);
  CHECK_FALSE(h2prime_check(A, Matrix::Zero(2, 0), e1).holds);
  CHECK_THROWS_AS(h1_check(A, Matrix::Zero(3, 1), e1), DimensionError);
}

TEST_CASE("rank verdicts are similarity invariant and reduce correctly") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 3;
    Matrix A(m, m), B(m, 1), D(m, 1), S(m, m);
    for (int i = 0; i < m * m; ++i) A(i / m, i % m) = n(gen);
    for (int i = 0; i < m; ++i) { B(i) = n(gen); D(i) = n(gen); }
    // Degenerate instances: sparse A or zero/collinear columns.
    if (trial % 4 == 1) A.col(0).setZero();
    if (trial % 4 == 2) B.setZero();
    if (trial % 4 == 3) D = A * B;
    for (int i = 0; i < m * m; ++i) S(i / m, i % m) = n(gen);
    Eigen::JacobiSVD<Matrix> svd(S);
    const double cond = svd.singularValues()(0) / svd.singularValues()(m - 1);
    if (cond > 1e3) continue;
    ++checked;
    const Matrix Si = S.inverse();
    const Matrix A2 = S * A * Si, B2 = S * B, D2 = S * D;
    CHECK(kalman_check(A, B).holds == kalman_check(A2, B2).holds);
    CHECK(h1_check(A, B, D).holds == h1_check(A2, B2, D2).holds);
    CHECK(h2_check(A, D).holds == h2_check(A2, D2).holds);
    CHECK(h2prime_check(A, B, D).holds == h2prime_check(A2, B2, D2).holds);
    CHECK(h1_check(A, B, Matrix::Zero(m, 1)).holds == kalman_check(A, B).holds);
    CHECK(h2prime_check(A, Matrix::Zero(m, 1), D).holds == h2_check(A, D).holds);
  }
  CHECK(checked > 100);
}

TEST_CASE("fragile flag") {
  const RankReport r = kalman_check(Matrix::Zero(2, 2), mat({{1, 0}, {0, 1e-8}}));
  CHECK(r.holds);
  CHECK(r.fragile);
}

TEST_CASE("infinite mass check") {
  CHECK(infinite_mass_check(unit_factorial_measure()).infinite);
  LevyMeasure two(1);
  two.add(ExplicitAtoms({Vector::Constant(1, 0.5), Vector::Constant(1, -2.0)}, {2.0, 3.0}));
  const MassReport r = infinite_mass_check(two, 0.3);
  CHECK_FALSE(r.infinite);
  CHECK(r.total_mass == 5.0);
  CHECK(*r.atom_mass == doctest::Approx(std::exp(-1.5)));
  CHECK_FALSE(infinite_mass_check(LevyMeasure(1)).infinite);
}

TEST_CASE("clipped growth diagnostic") {
  CHECK(condition_iii_diagnostic(linear_factorial_measure()).cls == LimitClass::diverges);
  const LimitDiagnostic e3 = condition_iii_diagnostic(unit_factorial_measure());
  CHECK(e3.cls == LimitClass::vanishes);
  REQUIRE(e3.atom_sequence.size() == 8);
  CHECK(e3.atom_sequence[5].second == doctest::Approx(0.6626091645624002).epsilon(1e-10));
  CHECK(condition_iii_diagnostic(LevyMeasure(1)).cls == LimitClass::vanishes);
  CHECK_THROWS_AS(condition_iii_diagnostic(axis_measure()), DomainError);
}

TEST_CASE("one-dimensional Kallenberg diagnostic") {
  CHECK(kallenberg_1d_diagnostic(linear_factorial_measure()).cls != LimitClass::diverges);
  CHECK(kallenberg_1d_diagnostic(isotropic_stable(1, 1.5)).cls == LimitClass::diverges);
  CHECK(kallenberg_1d_diagnostic(LevyMeasure(1)).cls == LimitClass::vanishes);
}

TEST_CASE("directional growth diagnostic") {
  const DirectionalDiagnostic axis = condition32_diagnostic(axis_measure());
  CHECK(axis.cls == LimitClass::vanishes);
  CHECK(std::abs(axis.worst_direction(1)) == doctest::Approx(1.0));
  for (double v : axis.profile.values) CHECK(v == 0.0);

  CHECK(condition32_diagnostic(isotropic_stable(2, 1.5)).cls == LimitClass::diverges);

  // d = 1: same quotient as the Kallenberg form on the dyadic grid.
  const DirectionalDiagnostic one = condition32_diagnostic(linear_factorial_measure());
  const LimitDiagnostic kal = kallenberg_1d_diagnostic(linear_factorial_measure());
  REQUIRE(one.profile.values.size() == kal.dyadic.values.size());
  for (std::size_t i = 0; i < one.profile.values.size(); ++i) {
    CHECK(one.profile.values[i] == doctest::Approx(kal.dyadic.values[i]).epsilon(1e-10));
  }
}

TEST_CASE("adding a component never turns divergence into decay") {
  LevyMeasure both = isotropic_stable(1, 1.5);
  both.add(FactorialFamily::radial(Vector::Constant(1, 1.0), {}));
  CHECK(condition_iii_diagnostic(both).cls == LimitClass::diverges);
  CHECK(condition32_diagnostic(both).cls == LimitClass::diverges);
}

TEST_CASE("jump-span mass") {
  const Matrix Am = mat({{0, 1}, {1, 0}});
  const Matrix e1 = mat({{1}, {0}});
  Vector l(2);
  l << 0.6, -0.8;
  const HypoellipticMass h = hypoellipticity_mass(unit_factorial_measure(), Am, e1, l);
  CHECK(h.infinite);
  CHECK(hypoellipticity_mass(unit_factorial_measure(), Matrix::Zero(2, 2), e1, l).mass == 0.0);
  CHECK(hypoellipticity_mass(unit_factorial_measure(), Am, Matrix::Zero(2, 1), l).mass == 0.0);
}

TEST_CASE("reports on the worked examples") {
  const RegularityReport r2 = assemble_report(scalar_jump_model(linear_factorial_measure(), 1.0), 1.0);
  CHECK(r2.density_smooth.value == Tri::yes);
  CHECK(r2.density_smooth.rule == "scalar_clipped_growth");
  CHECK(r2.density_exists.value == Tri::yes);

  const RegularityReport r3 = assemble_report(scalar_jump_model(unit_factorial_measure(), 1.0), 1.0);
  CHECK(r3.density_exists.value == Tri::yes);
  CHECK(r3.density_smooth.value == Tri::no);
  CHECK(r3.find("infinite_mass")->verdict == Verdict::holds);

  const RegularityReport r4 = assemble_report(kolmogorov_modified(unit_factorial_measure()), 1.0);
  CHECK(r4.find("H2")->verdict == Verdict::holds);
  CHECK(r4.density_exists.value == Tri::yes);
  CHECK(r4.density_exists.rule == "H2_and_yamazato");

  const RegularityReport r4a = assemble_report(kolmogorov_first(unit_factorial_measure()), 1.0);
  CHECK(r4a.find("H1")->verdict == Verdict::holds);
  CHECK(r4a.find("H2")->verdict == Verdict::fails);

  const RegularityReport finite = assemble_report(scalar_jump_model(single_atom(0.5, 2.0), 1.0), 1.0);
  CHECK(finite.density_exists.value == Tri::no);
  CHECK(finite.density_smooth.value == Tri::no);

  const RegularityReport gauss = assemble_report(gaussian_model(), 1.0);
  CHECK(gauss.density_smooth.value == Tri::yes);

  const RegularityReport stable2 = assemble_report(
      make_model(Matrix::Zero(2, 2), Matrix(), Matrix::Identity(2, 2), isotropic_stable(2, 1.5)), 1.0);
  CHECK(stable2.density_smooth.rule == "H1_and_directional_growth");
  // Second moments above 1 diverge for α = 1.5.
  CHECK(stable2.schwartz.value == Tri::undecided);

  CHECK_THROWS_AS(assemble_report(gaussian_model(), 0.0), DomainError);
}

TEST_CASE("report documents round-trip losslessly") {
  const RegularityReport r = assemble_report(kolmogorov_modified(unit_factorial_measure()), 0.5);
  const Json once = to_json(r);
  const Json twice = to_json(report_from_json(Json::parse(once.dump())));
  CHECK(once == twice);
  CHECK(once.at("schema_version") == 1);
}

TEST_CASE("smooth implies exists on random models") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n;
  std::uniform_int_distribution<int> pick(0, 4);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 1 + trial % 2;
    Matrix A(m, m), D(m, 1);
    for (int i = 0; i < m * m; ++i) A(i / m, i % m) = n(gen);
    for (int i = 0; i < m; ++i) D(i) = n(gen);
    LevyMeasure pi(1);
    switch (pick(gen)) {
      case 0: pi = linear_factorial_measure(); break;
      case 1: pi = unit_factorial_measure(); break;
      case 2: pi = isotropic_stable(1, 0.5 + trial * 0.05); break;
      case 3: pi = single_atom(0.3, 1.0); break;
      default: break;
    }
    Matrix B = trial % 3 == 0 ? Matrix(Matrix::Constant(m, 1, 0.5)) : Matrix();
    const RegularityReport r = assemble_report(make_model(A, B, D, pi), 1.0);
    if (r.density_smooth.value == Tri::yes) CHECK(r.density_exists.value == Tri::yes);
    if (r.density_exists.value == Tri::no) CHECK(r.density_smooth.value == Tri::no);
  }
}
