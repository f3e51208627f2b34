// Acceptance gate: one criterion per invocation (argv[1] = 1..11), printing
// a single "criterion N: PASS/FAIL (detail)" line. Tolerances and seeds are
// pinned here; exit code 0 iff the criterion holds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "smart/bench.hpp"
#include "smart/qr.hpp"
#include "smart/rng.hpp"

using Clock = std::chrono::steady_clock;
using smart::ExperimentResult;
using smart::ExperimentSpec;
using smart::ModelMode;
using smart::Rng;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

ExperimentResult run_one(const std::string& dataset, std::size_t n,
                         std::size_t d, double sigma, int k,
                         std::size_t max_degree, ModelMode mode,
                         std::uint64_t seed) {
  ExperimentSpec spec;
  spec.dataset = dataset;
  spec.n = n;
  spec.d = d;
  spec.sigma = sigma;
  spec.synthetic_k = k;
  spec.forward.max_degree = max_degree;
  spec.model = mode;
  spec.seed = seed;
  return smart::run(spec);
}

// 1. Incremental QR matches batch least squares on random systems.
bool criterion_1(std::string& detail) {
  auto t0 = Clock::now();
  Rng rng(1);
  double worst_beta = 0.0, worst_rss = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t p = 1 + rng.next_below(20);
    std::size_t n = p + rng.next_below(200 - p + 1);
    std::vector<double> X(n * p), Y(n);
    for (auto& v : X) v = rng.normal();
    for (auto& v : Y) v = rng.normal();

    smart::TriangularFactor f(p);
    for (std::size_t i = 0; i < n; ++i)
      f.update({X.data() + i * p, p}, Y[i]);
    auto beta = f.solve();

    auto oracle = test_oracle::normal_equations_ols(X, Y, n, p);
    double oracle_rss = test_oracle::rss_of(X, Y, n, p, oracle);
    worst_beta =
        std::max(worst_beta, test_oracle::max_rel_diff(oracle, beta));
    worst_rss = std::max(worst_rss, std::fabs(f.fit_rss() - oracle_rss) /
                                        std::max(oracle_rss, 1e-12));
  }
  double dt = seconds_since(t0);
  detail = "max coefficient err " + fmt(worst_beta) + ", max rss err " +
           fmt(worst_rss) + ", " + fmt(dt) + "s";
  return worst_beta <= 1e-8 && worst_rss <= 1e-8 && dt < 10.0;
}

// 2. Givens rotations satisfy their defining identities.
bool criterion_2(std::string& detail) {
  Rng rng(2);
  double worst_unit = 0.0, worst_annihilation = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    double scale = std::pow(10.0, rng.uniform(-8.0, 8.0));
    double a = rng.uniform(-1.0, 1.0) * scale;
    double b = rng.uniform(-1.0, 1.0) * scale;
    auto [c, s] = smart::givens(a, b);
    worst_unit = std::max(worst_unit, std::fabs(c * c + s * s - 1.0));
    double h = std::hypot(a, b);
    if (h > 0.0)
      worst_annihilation =
          std::max(worst_annihilation, std::fabs(s * a + c * b) / h);
  }
  detail = "max |c^2+s^2-1| " + fmt(worst_unit) + ", max annihilation " +
           fmt(worst_annihilation) + " (relative)";
  return worst_unit <= 1e-12 && worst_annihilation <= 1e-12;
}

// 3. Jump-discontinuity pipeline beats the no-split baseline.
bool criterion_3(std::string& detail) {
  auto t0 = Clock::now();
  std::vector<double> smart_rmse, mars_rmse;
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto s = run_one("visual", 200, 10, 1.0, 1, 2, ModelMode::Smart, seed);
    auto m = run_one("visual", 200, 10, 1.0, 1, 2, ModelMode::MarsMode, seed);
    smart_rmse.push_back(s.rmse_true);
    mars_rmse.push_back(m.rmse_true);
    if (s.rmse_true < m.rmse_true) ++wins;
  }
  double med_s = median(smart_rmse), med_m = median(mars_rmse);
  double dt = seconds_since(t0);
  detail = "median " + fmt(med_s) + " vs " + fmt(med_m) + ", wins " +
           std::to_string(wins) + "/20, " + fmt(dt) + "s";
  return med_s <= 0.55 && med_m >= 0.9 && wins >= 16 && dt < 60.0;
}

// 4. Friedman 1 parity with both the no-split baseline and the reference
// results (d <= 30 cells).
bool criterion_4(std::string& detail) {
  struct Cell {
    std::size_t d, n;
    double sigma, reference;
  };
  const Cell cells[] = {{10, 1000, 5.0, 1.74},  {10, 5000, 5.0, 0.69},
                        {30, 1000, 5.0, 2.60},  {30, 5000, 5.0, 0.87},
                        {10, 1000, 20.0, 6.70}, {10, 5000, 20.0, 3.02},
                        {30, 1000, 20.0, 9.91}, {30, 5000, 20.0, 4.49}};
  auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream out;
  for (const auto& cell : cells) {
    double s_sum = 0.0, m_sum = 0.0;
    for (std::uint64_t seed : {11, 12, 13}) {
      s_sum += run_one("friedman1", cell.n, cell.d, cell.sigma, 1, 2,
                       ModelMode::Smart, seed)
                   .rmse_true;
      m_sum += run_one("friedman1", cell.n, cell.d, cell.sigma, 1, 2,
                       ModelMode::MarsMode, seed)
                   .rmse_true;
    }
    double s = s_sum / 3.0, m = m_sum / 3.0;
    double vs_baseline = std::fabs(s - m) / m;
    double vs_reference = std::fabs(s - cell.reference) / cell.reference;
    bool cell_ok = vs_baseline <= 0.25 && vs_reference <= 0.30;
    ok = ok && cell_ok;
    if (!cell_ok)
      out << " [d=" << cell.d << " n=" << cell.n << " s=" << cell.sigma
          << ": " << fmt(s) << " vs baseline " << fmt(m) << ", reference "
          << fmt(cell.reference) << "]";
  }
  double dt = seconds_since(t0);
  detail = (ok ? "all 8 cells in band" : "cells out of band:" + out.str()) +
           ", " + fmt(dt) + "s";
  return ok && dt < 900.0;
}

// 5. Friedman 2 at high noise: splitting beats the no-split baseline by 20%.
bool criterion_5(std::string& detail) {
  double s_sum = 0.0, m_sum = 0.0;
  for (std::uint64_t seed : {11, 12, 13}) {
    s_sum += run_one("friedman2", 5000, 10, 20.0, 1, 2, ModelMode::Smart, seed)
                 .rmse_true;
    m_sum +=
        run_one("friedman2", 5000, 10, 20.0, 1, 2, ModelMode::MarsMode, seed)
            .rmse_true;
  }
  double s = s_sum / 3.0, m = m_sum / 3.0;
  detail = fmt(s) + " vs " + fmt(m) + " (need <= " + fmt(0.8 * m) + ")";
  return s <= 0.8 * m;
}

// 6. Friedman 3 at low noise: the gate rejects splitting.
bool criterion_6(std::string& detail) {
  int no_split = 0;
  double worst = 0.0;
  for (std::uint64_t seed : {11, 12, 13}) {
    auto r = run_one("friedman3", 5000, 10, 5.0, 1, 2, ModelMode::Smart, seed);
    if (r.splits.empty()) ++no_split;
    worst = std::max(worst, r.rmse_true);
  }
  detail = std::to_string(no_split) + "/3 seeds split-free, worst rmse " +
           fmt(worst);
  return no_split >= 2 && worst <= 0.45;
}

// 7. The pinned piecewise equations: single split on the true variable.
bool criterion_7(std::string& detail) {
  int single = 0;
  bool variables_ok = true, gaps_ok = true;
  std::ostringstream out;
  for (int k = 1; k <= 5; ++k) {
    auto truth = smart::synthetic_truth(k);
    auto r = run_one("synthetic", 5000, 10, 1.0, k, 3, ModelMode::Smart, 6);
    if (r.splits.size() == 1) ++single;
    out << " [k=" << k << ": " << r.splits.size() << " split(s)";
    if (!r.splits.empty()) {
      bool found = false;
      for (const auto& sp : r.splits)
        if (sp.variable == truth.switch_variable) {
          found = true;
          out << ", x" << sp.variable + 1 << " at " << fmt(sp.value);
          if (std::fabs(sp.value - truth.switch_threshold) > 0.8)
            gaps_ok = false;
        }
      if (!found) variables_ok = false;
    }
    out << "]";
  }
  detail = std::to_string(single) + "/5 single-split," + out.str();
  return single >= 4 && variables_ok && gaps_ok;
}

// 8. Suite-average dominance over the no-split baseline.
bool criterion_8(std::string& detail) {
  double s_sum = 0.0, m_sum = 0.0;
  for (int k = 1; k <= 5; ++k) {
    s_sum += run_one("synthetic", 5000, 10, 1.0, k, 3, ModelMode::Smart, 6)
                 .rmse_true;
    m_sum += run_one("synthetic", 5000, 10, 1.0, k, 3, ModelMode::MarsMode, 6)
                 .rmse_true;
  }
  double s = s_sum / 5.0, m = m_sum / 5.0;
  detail = "suite averages " + fmt(s) + " vs " + fmt(m);
  return s < m && s <= 2.6;
}

// 9. Depth-2 tree recovery with linear leaves.
bool criterion_9(std::string& detail) {
  auto t0 = Clock::now();
  auto r = run_one("tree", 20000, 10, 1.0, 1, 1, ModelMode::Smart, 5);
  double dt = seconds_since(t0);

  std::vector<std::size_t> vars;
  double worst_value = 0.0;
  for (const auto& sp : r.splits) {
    vars.push_back(sp.variable);
    worst_value = std::max(worst_value, std::fabs(sp.value));
  }
  std::sort(vars.begin(), vars.end());
  bool structure = vars == std::vector<std::size_t>{0, 1, 3};

  std::ostringstream out;
  out << r.splits.size() << " splits on {";
  for (std::size_t i = 0; i < vars.size(); ++i)
    out << (i ? "," : "") << "x" << vars[i] + 1;
  out << "}, max |value| " << fmt(worst_value) << ", rmse "
      << fmt(r.rmse_true) << ", " << fmt(dt) << "s";
  detail = out.str();
  return r.splits.size() == 3 && structure && worst_value <= 0.05 &&
         r.rmse_true <= 0.12 && dt < 300.0;
}

// 10. Near-linear scaling of the split scan and the row update.
bool criterion_10(std::string& detail) {
  std::vector<double> split_ms;
  for (std::size_t n : {2500u, 5000u, 10000u}) {
    smart::Dataset d = smart::gen_friedman1(n, 10, 5.0, 3);
    smart::ForwardConfig fc;
    fc.max_terms = 21;
    fc.max_degree = 2;
    smart::NodeModel model = smart::forward_pass(d, fc);
    while (model.terms.size() > 19) {
      model.terms.pop_back();
      model.coefficients.pop_back();
    }
    model = smart::refit(model, d);
    smart::TreeConfig tc;
    auto t0 = Clock::now();
    const int reps = 3;
    for (int rep = 0; rep < reps; ++rep) {
      auto cand = smart::best_split(d, model, tc, 17);
      (void)cand;
    }
    split_ms.push_back(seconds_since(t0) * 1000.0 / reps);
  }
  double r1 = split_ms[1] / split_ms[0];
  double r2 = split_ms[2] / split_ms[1];

  std::vector<double> update_us;
  Rng rng(7);
  for (std::size_t M : {8u, 16u, 32u}) {
    const std::size_t rows = 20000;
    std::vector<double> row(M);
    smart::TriangularFactor f(M);
    auto t0 = Clock::now();
    for (std::size_t i = 0; i < rows; ++i) {
      for (auto& v : row) v = rng.uniform() * 2.0 - 1.0;
      f.update(row, rng.uniform());
    }
    update_us.push_back(seconds_since(t0) * 1e6 /
                        static_cast<double>(rows));
  }
  double u1 = update_us[1] / update_us[0];
  double u2 = update_us[2] / update_us[1];

  detail = "best_split ms " + fmt(split_ms[0]) + "/" + fmt(split_ms[1]) +
           "/" + fmt(split_ms[2]) + " (ratios " + fmt(r1) + ", " + fmt(r2) +
           "); update us " + fmt(update_us[0]) + "/" + fmt(update_us[1]) +
           "/" + fmt(update_us[2]) + " (ratios " + fmt(u1) + ", " + fmt(u2) +
           ")";
  return r1 <= 2.6 && r2 <= 2.6 && u1 <= 5.0 && u2 <= 5.0;
}

// 11. Equal seeds give byte-identical reports.
bool criterion_11(std::string& detail) {
  auto render = [](const std::string& suite, std::size_t reps) {
    std::vector<smart::SuiteRow> rows;
    for (const auto& spec : smart::make_suite(suite, reps, 77))
      rows.push_back({spec, smart::run_replicated(spec)});
    return smart::report(rows, smart::ReportFormat::Csv);
  };
  bool visual_ok = render("visual", 2) == render("visual", 2);
  bool friedman3_ok = render("friedman3", 1) == render("friedman3", 1);
  detail = std::string("visual suite ") + (visual_ok ? "stable" : "UNSTABLE") +
           ", friedman3 suite " + (friedman3_ok ? "stable" : "UNSTABLE");
  return visual_ok && friedman3_ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " <criterion 1..11>\n";
    return 2;
  }
  int n = std::atoi(argv[1]);
  bool (*criteria[])(std::string&) = {
      criterion_1, criterion_2, criterion_3, criterion_4,
      criterion_5, criterion_6, criterion_7, criterion_8,
      criterion_9, criterion_10, criterion_11};
  if (n < 1 || n > 11) {
    std::cerr << "criterion must be in 1..11\n";
    return 2;
  }
  std::string detail;
  bool ok = criteria[n - 1](detail);
  std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  return ok ? 0 : 1;
}
