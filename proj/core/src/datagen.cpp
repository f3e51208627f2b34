#include "smart/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "smart/errors.hpp"
#include "smart/rng.hpp"

namespace smart {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

Dataset make_dataset(std::size_t n, std::size_t m, std::uint64_t seed) {
  Dataset d;
  d.n = n;
  d.m = m;
  d.seed = seed;
  d.X.resize(n * m);
  d.Y.resize(n);
  d.truth.resize(n);
  d.column_kinds.assign(m, ColumnKind::Continuous);
  d.column_names.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    d.column_names[j] = "x" + std::to_string(j + 1);
  return d;
}

}  // namespace

Dataset gen_visual(std::size_t n, std::uint64_t seed) {
  Dataset d = make_dataset(n, 1, seed);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    double x = rng.uniform(0.0, 6.0);
    d.X[i] = x;
    double t;
    if (x < 2.0)
      t = std::sin(M_PI * x);
    else if (x < 4.0)
      t = 4.0 * x;
    else
      t = 0.2 * std::exp(x - 3.0);
    d.truth[i] = t;
    d.Y[i] = t + rng.normal();
  }
  return d;
}

Dataset gen_friedman1(std::size_t n, std::size_t d, double sigma,
                      std::uint64_t seed) {
  if (d < 5) throw StructuralError("gen_friedman1: d must be >= 5");
  Dataset ds = make_dataset(n, d, seed);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) ds.X[i * d + j] = rng.uniform();
    const double* x = ds.X.data() + i * d;
    double t = 10.0 * std::sin(M_PI * x[0] * x[1]) +
               20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] + 5.0 * x[4];
    ds.truth[i] = t;
    ds.Y[i] = t + sigma * rng.normal();
  }
  return ds;
}

namespace {

Dataset gen_friedman23(std::size_t n, double sigma, std::uint64_t seed,
                       bool arctan_form) {
  Dataset ds = make_dataset(n, 4, seed);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    double x1;
    do {
      x1 = rng.uniform(0.0, 100.0);
    } while (x1 == 0.0);
    double x2 = rng.uniform(40.0 * M_PI, 560.0 * M_PI);
    double x3 = rng.uniform();
    double x4 = rng.uniform(1.0, 11.0);
    double* x = ds.X.data() + i * 4;
    x[0] = x1;
    x[1] = x2;
    x[2] = x3;
    x[3] = x4;
    double inner = x2 * x3 - 1.0 / (x2 * x4);
    double t = arctan_form ? std::atan(inner / x1)
                           : std::sqrt(x1 * x1 + inner * inner);
    ds.truth[i] = t;
    ds.Y[i] = t + sigma * rng.normal();
  }
  return ds;
}

}  // namespace

Dataset gen_friedman2(std::size_t n, double sigma, std::uint64_t seed) {
  return gen_friedman23(n, sigma, seed, false);
}

Dataset gen_friedman3(std::size_t n, double sigma, std::uint64_t seed) {
  return gen_friedman23(n, sigma, seed, true);
}

namespace {

// Feature sampling ranges by term form. Log features sample U(0, 10) so
// log(x + 1) stays defined.
enum class Form { Linear, Square, Cube, Hinge, Log };

struct SyntheticSpec {
  std::vector<Form> forms;  // per column
  std::function<double(const double*)> truth;
  std::size_t switch_variable;
  double switch_threshold;
};

double sample_form(Form f, Rng& rng) {
  switch (f) {
    case Form::Linear:
      return rng.uniform(-10.0, 10.0);
    case Form::Square:
      return rng.uniform(-3.0, 3.0);
    case Form::Cube:
      return rng.uniform(-2.0, 2.0);
    case Form::Hinge:
      return rng.uniform(-10.0, 10.0);
    case Form::Log:
      return rng.uniform(0.0, 10.0);
  }
  return 0.0;
}

SyntheticSpec synthetic_spec(int k) {
  using F = Form;
  switch (k) {
    case 1:
      return {{F::Cube, F::Square, F::Square, F::Hinge, F::Log},
              [](const double* x) {
                double base = -1.2;
                if (x[0] <= 1.6)
                  return base - 3.1 * x[0] * x[0] * x[0] + 2.1 * x[1] * x[1] -
                         3.7 * x[2] * x[2] + 2.0 * pos(x[3] - 1.2) +
                         1.5 * pos(1.2 - x[3]) + 3.0 * std::log(x[4] + 1.0) -
                         0.5 * x[0] * x[1];
                return base - 3.9 * x[0] * x[0] * x[0] - 0.6 * x[1] * x[1] +
                       2.9 * x[2] * x[2] + 3.0 * pos(x[3] - 1.2) +
                       1.3 * pos(1.2 - x[3]) + 2.4 * std::log(x[4] + 1.0) +
                       0.3 * x[0] * x[1];
              },
              0,
              1.6};
    case 2:
      return {{F::Linear, F::Linear, F::Linear, F::Hinge, F::Log},
              [](const double* x) {
                double base = 2.1;
                if (x[1] <= 8.0)
                  return base - 2.7 * x[0] + 1.3 * x[1] - 1.9 * x[2] +
                         2.7 * pos(x[3] - 2.4) - 2.4 * pos(1.2 - x[3]) +
                         2.2 * std::log(x[4] + 1.0) - 0.2 * x[0] * x[1];
                return base + 3.7 * x[0] + 3.6 * x[1] - 2.0 * x[2] -
                       3.2 * pos(x[3] - 2.4) + 2.8 * pos(2.4 - x[3]) -
                       2.2 * std::log(x[4] + 1.0) + x[0] * x[1];
              },
              1,
              8.0};
    case 3:
      return {{F::Cube, F::Cube, F::Linear, F::Hinge, F::Hinge, F::Log},
              [](const double* x) {
                double base = -4.3;
                if (x[2] <= 8.0)
                  return base - 2.7 * x[0] * x[0] * x[0] +
                         2.7 * x[1] * x[1] * x[1] - 0.7 * x[2] +
                         2.4 * pos(x[3] - 4.4) + 0.4 * pos(4.4 - x[3]) +
                         2.3 * pos(x[4] - 2.9) - 1.8 * pos(2.9 - x[4]) -
                         3.2 * std::log(x[5] + 1.0) - 0.2 * x[0] * x[1];
                return base - 1.6 * x[0] * x[0] * x[0] -
                       3.4 * x[1] * x[1] * x[1] - 2.9 * x[2] -
                       1.0 * pos(x[3] - 4.4) - 2.1 * pos(4.4 - x[3]) +
                       3.0 * pos(x[4] - 2.9) - 1.8 * pos(2.9 - x[4]) +
                       3.9 * std::log(x[5] + 1.0) - 0.2 * x[0] * x[1];
              },
              2,
              8.0};
    case 4:
      return {{F::Square, F::Square, F::Linear, F::Hinge, F::Hinge, F::Log},
              [](const double* x) {
                double base = 6.7;
                if (x[0] >= -2.4)
                  return base - 1.4 * x[0] * x[0] - 3.7 * x[1] * x[1] +
                         2.4 * x[2] - 3.2 * pos(x[3] + 2.8) -
                         1.4 * pos(-2.8 - x[3]) - pos(x[4] + 4.4) -
                         1.2 * pos(-4.4 - x[4]) - std::log(x[5] + 1.0) +
                         0.8 * x[0] * x[1];
                return base + 1.4 * x[0] * x[0] + 0.7 * x[1] * x[1] +
                       2.8 * x[2] - 3.4 * pos(x[3] + 2.8) -
                       1.4 * pos(-2.8 - x[3]) + 0.4 * pos(x[4] + 4.4) -
                       2.5 * pos(-4.4 - x[4]) - 3.5 * std::log(x[5] + 1.0) +
                       0.8 * x[0] * x[1];
              },
              0,
              -2.4};
    case 5:
      return {{F::Square, F::Cube, F::Linear, F::Linear, F::Linear, F::Hinge,
               F::Log},
              [](const double* x) {
                double base = 3.1;
                if (x[4] <= 8.0)
                  return base + 3.3 * x[0] * x[0] - x[1] * x[1] * x[1] -
                         0.8 * x[2] - 2.1 * x[3] + 2.4 * x[4] -
                         1.4 * pos(x[5] + 7.2) - 1.4 * pos(-7.2 - x[5]) -
                         std::log(x[6] + 1.0) - 0.9 * x[0] * x[1];
                return base - 3.5 * x[0] * x[0] - 3.2 * x[1] * x[1] * x[1] -
                       0.5 * x[2] - 0.9 * x[3] + 1.5 * x[4] -
                       2.1 * pos(x[5] + 7.2) + 3.3 * pos(-7.2 - x[5]) -
                       0.5 * std::log(x[6] + 1.0) + 0.4 * x[0] * x[1];
              },
              4,
              8.0};
    default:
      throw StructuralError("gen_synthetic: k must be in 1..5");
  }
}

}  // namespace

Dataset gen_synthetic(int k, std::size_t n, std::uint64_t seed) {
  SyntheticSpec spec = synthetic_spec(k);
  std::size_t m = spec.forms.size();
  Dataset ds = make_dataset(n, m, seed);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      ds.X[i * m + j] = sample_form(spec.forms[j], rng);
    double t = spec.truth(ds.X.data() + i * m);
    ds.truth[i] = t;
    ds.Y[i] = t + 10.0 * rng.normal();
  }
  return ds;
}

SyntheticTruth synthetic_truth(int k) {
  SyntheticSpec spec = synthetic_spec(k);
  return {spec.switch_variable, spec.switch_threshold};
}

Dataset gen_synthetic_recipe(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);

  struct Term {
    Form form;
    std::size_t col;
    double a = 0.0, a2 = 0.0;  // a2: reflected-hinge coefficient
    double b = 0.0;            // hinge knot
  };
  auto coef = [&rng]() {
    double a = rng.uniform(0.4, 4.0);
    return rng.uniform() < 0.5 ? -a : a;
  };

  std::vector<Term> terms;
  std::size_t n_power = 3 + rng.next_below(3);
  for (std::size_t t = 0; t < n_power; ++t) {
    Form f = static_cast<Form>(rng.next_below(3));  // Linear/Square/Cube
    terms.push_back({f, terms.size(), coef(), 0.0, 0.0});
  }
  std::size_t n_hinge = 1 + rng.next_below(2);
  for (std::size_t t = 0; t < n_hinge; ++t)
    terms.push_back(
        {Form::Hinge, terms.size(), coef(), coef(), rng.uniform(-8.0, 8.0)});
  terms.push_back({Form::Log, terms.size(), coef(), 0.0, 0.0});
  double a_inter = coef();
  double a_inter_alt = coef();
  double intercept = rng.uniform(-20.0, 20.0);

  // Re-randomized coefficients for the minor side of the switch.
  std::vector<Term> alt = terms;
  for (auto& t : alt) {
    t.a = coef();
    if (t.form == Form::Hinge) t.a2 = coef();
  }

  std::size_t m = terms.size();
  Dataset ds = make_dataset(n, m, seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      ds.X[i * m + j] = sample_form(terms[j].form, rng);

  // Switch threshold: the 90% quantile of a randomly chosen column, so the
  // minor side holds roughly 10% of the rows.
  std::size_t sw = rng.next_below(m);
  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = ds.X[i * m + sw];
  std::sort(col.begin(), col.end());
  double threshold = col[static_cast<std::size_t>(0.9 * static_cast<double>(n))];

  auto eval_side = [&](const std::vector<Term>& side, double inter,
                       const double* x) {
    double v = intercept;
    for (const auto& t : side) {
      double xv = x[t.col];
      switch (t.form) {
        case Form::Linear:
          v += t.a * xv;
          break;
        case Form::Square:
          v += t.a * xv * xv;
          break;
        case Form::Cube:
          v += t.a * xv * xv * xv;
          break;
        case Form::Hinge:
          v += t.a * pos(xv - t.b) - t.a2 * pos(t.b - xv);
          break;
        case Form::Log:
          v += t.a * std::log(xv + 1.0);
          break;
      }
    }
    v += inter / 4.0 * x[0] * x[1];
    return v;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double* x = ds.X.data() + i * m;
    double t = x[sw] <= threshold ? eval_side(terms, a_inter, x)
                                  : eval_side(alt, a_inter_alt, x);
    ds.truth[i] = t;
    ds.Y[i] = t + 10.0 * rng.normal();
  }
  return ds;
}

Dataset gen_tree_dataset(std::size_t n, std::uint64_t seed) {
  Dataset ds = make_dataset(n, 4, seed);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    double* x = ds.X.data() + i * 4;
    for (std::size_t j = 0; j < 4; ++j) x[j] = rng.uniform(-2.0, 2.0);
    double t;
    if (x[3] > 0.0)
      t = x[1] > 0.0 ? x[0] : x[1];
    else
      t = x[0] > 0.0 ? x[2] : x[3];
    ds.truth[i] = t;
    ds.Y[i] = t + rng.normal();
  }
  return ds;
}

}  // namespace smart
