#include <vector>

#include <doctest.h>

#include "smart/basis.hpp"
#include "smart/dataset.hpp"
#include "smart/rng.hpp"

using smart::BasisTerm;
using smart::eval_factor;
using smart::eval_term;
using smart::Factor;
using smart::FactorKind;
using smart::NodeModel;

TEST_SUITE_BEGIN("basis");

TEST_CASE("factor evaluation") {
  std::vector<double> row = {5.0};
  CHECK(eval_factor({FactorKind::Linear, 0, 0.0}, row) == 5.0);
  CHECK(eval_factor({FactorKind::HingePos, 0, 3.0}, row) == 2.0);
  row[0] = 2.0;
  CHECK(eval_factor({FactorKind::HingePos, 0, 3.0}, row) == 0.0);
  CHECK(eval_factor({FactorKind::HingeNeg, 0, 3.0}, row) == 1.0);
  row[0] = 3.0;
  CHECK(eval_factor({FactorKind::HingePos, 0, 3.0}, row) == 0.0);
  CHECK(eval_factor({FactorKind::HingeNeg, 0, 3.0}, row) == 0.0);
}

TEST_CASE("factor with an out-of-range feature index throws") {
  std::vector<double> row = {1.0, 2.0};
  CHECK_THROWS_AS(eval_factor({FactorKind::Linear, 2, 0.0}, row),
                  smart::StructuralError);
}

TEST_CASE("term value is the product of its factors") {
  BasisTerm term;
  term.factors = {{FactorKind::HingePos, 0, 1.0}, {FactorKind::Linear, 1, 0.0}};
  std::vector<double> row = {3.0, 2.0};
  CHECK(eval_term(term, row) == doctest::Approx(4.0));
  CHECK(term.degree() == 2);
}

TEST_CASE("reflected hinge pair reconstructs the centered line") {
  smart::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    double x = rng.uniform(-10.0, 10.0);
    double t = rng.uniform(-5.0, 5.0);
    std::vector<double> row = {x};
    double plus = eval_factor({FactorKind::HingePos, 0, t}, row);
    double minus = eval_factor({FactorKind::HingeNeg, 0, t}, row);
    CHECK(plus - minus == doctest::Approx(x - t).epsilon(1e-12));
    CHECK(plus >= 0.0);
    CHECK(minus >= 0.0);
  }
}

TEST_CASE("predict sums intercept and weighted terms") {
  NodeModel model;
  model.intercept = 1.0;
  BasisTerm lin;
  lin.factors = {{FactorKind::Linear, 0, 0.0}};
  model.terms = {lin};
  model.coefficients = {2.0};
  std::vector<double> row = {3.0};
  CHECK(smart::predict(model, row) == doctest::Approx(7.0));
  CHECK(model.num_coefficients() == 2);
}

TEST_CASE("design matrix layout") {
  smart::Dataset data;
  data.n = 4;
  data.m = 1;
  data.X = {0.0, 1.0, 2.0, 3.0};
  data.Y = {0.0, 0.0, 0.0, 0.0};

  NodeModel intercept_only;
  auto ones = smart::design_matrix(intercept_only, data);
  REQUIRE(ones.size() == 4);
  for (double v : ones) CHECK(v == 1.0);

  NodeModel with_line = intercept_only;
  BasisTerm lin;
  lin.factors = {{FactorKind::Linear, 0, 0.0}};
  with_line.terms = {lin};
  with_line.coefficients = {0.0};
  auto D = smart::design_matrix(with_line, data);
  REQUIRE(D.size() == 8);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(D[i * 2] == 1.0);
    CHECK(D[i * 2 + 1] == data.X[i]);
  }
}

TEST_CASE("canonicalize sorts factors into a stable order") {
  BasisTerm a, b;
  a.factors = {{FactorKind::Linear, 1, 0.0}, {FactorKind::HingePos, 0, 2.0}};
  b.factors = {{FactorKind::HingePos, 0, 2.0}, {FactorKind::Linear, 1, 0.0}};
  a.canonicalize();
  b.canonicalize();
  CHECK(a.factors == b.factors);
}

TEST_CASE("contains and uses_feature") {
  BasisTerm term;
  term.factors = {{FactorKind::HingePos, 2, 1.5}};
  CHECK(term.contains({FactorKind::HingePos, 2, 1.5}));
  CHECK_FALSE(term.contains({FactorKind::HingeNeg, 2, 1.5}));
  CHECK(term.uses_feature(2));
  CHECK_FALSE(term.uses_feature(0));
}

TEST_CASE("knot_count counts distinct (feature, knot) pairs") {
  NodeModel model;
  BasisTerm t1, t2, t3;
  t1.factors = {{FactorKind::HingePos, 0, 1.0}};
  t2.factors = {{FactorKind::HingeNeg, 0, 1.0}};  // same knot as t1
  t3.factors = {{FactorKind::Linear, 1, 0.0}};    // linear: no knot
  model.terms = {t1, t2, t3};
  model.coefficients = {0.0, 0.0, 0.0};
  CHECK(model.knot_count() == 1);
}

TEST_SUITE_END();
