#include "smart/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "smart/qr.hpp"

namespace smart {

double gcv(double rss, std::size_t n, double effective_params) {
  if (n == 0) throw StructuralError("gcv: n must be >= 1");
  double dn = static_cast<double>(n);
  if (effective_params >= dn) return std::numeric_limits<double>::infinity();
  double denom = 1.0 - effective_params / dn;
  return rss / (denom * denom);
}

double effective_params(const NodeModel& model, double gcv_penalty) {
  return static_cast<double>(model.num_coefficients()) +
         gcv_penalty * static_cast<double>(model.knot_count());
}

NodeModel refit(const NodeModel& model, const Dataset& data) {
  NodeModel out = model;
  std::size_t p = model.num_coefficients();
  auto D = design_matrix(model, data);
  FitStats fit = batch_ols(D, data.Y, data.n, p);
  out.intercept = fit.coefficients[0];
  out.coefficients.assign(fit.coefficients.begin() + 1,
                          fit.coefficients.end());
  return out;
}

namespace {

constexpr double kCandidateTol = 1e-9;

// Scratch for one forward-pass step: the current design, its factor-implied
// inverse-Gram action on each row (z_i = (D^T D)^{-1} d_i), coefficients
// and residuals.
struct StepState {
  std::size_t n = 0, p = 0;
  std::vector<double> D;
  std::vector<double> Z;
  std::vector<double> beta;
  std::vector<double> resid;
  double rss = 0.0;
};

// Solves R^T a = d then R z = a; near-zero pivots contribute zero.
void inverse_gram_apply(const TriangularFactor& F, double tol,
                        const double* d, double* z, std::vector<double>& a) {
  std::size_t p = F.cols();
  std::size_t r = F.rows();
  a.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (j >= r || std::abs(F.entry(j, j)) <= tol) continue;
    double acc = d[j];
    for (std::size_t k = 0; k < j; ++k) acc -= F.entry(k, j) * a[k];
    a[j] = acc / F.entry(j, j);
  }
  for (std::size_t jj = p; jj-- > 0;) {
    if (jj >= r || std::abs(F.entry(jj, jj)) <= tol) {
      z[jj] = 0.0;
      continue;
    }
    double acc = a[jj];
    for (std::size_t k = jj + 1; k < p; ++k) acc -= F.entry(jj, k) * z[k];
    z[jj] = acc / F.entry(jj, jj);
  }
}

StepState build_step(const NodeModel& model, const Dataset& data) {
  StepState st;
  st.n = data.n;
  st.p = model.num_coefficients();
  st.D = design_matrix(model, data);
  TriangularFactor F(st.p);
  for (std::size_t i = 0; i < st.n; ++i)
    F.update({st.D.data() + i * st.p, st.p}, data.Y[i]);
  st.beta = F.solve();
  st.resid.resize(st.n);
  st.rss = 0.0;
  for (std::size_t i = 0; i < st.n; ++i) {
    const double* di = st.D.data() + i * st.p;
    double pred = 0.0;
    for (std::size_t j = 0; j < st.p; ++j) pred += di[j] * st.beta[j];
    st.resid[i] = data.Y[i] - pred;
    st.rss += st.resid[i] * st.resid[i];
  }
  double max_diag = 0.0;
  for (std::size_t j = 0; j < F.rows(); ++j)
    max_diag = std::max(max_diag, std::abs(F.entry(j, j)));
  double tol = kRankTolerance * max_diag;
  st.Z.resize(st.n * st.p);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < st.n; ++i)
    inverse_gram_apply(F, tol, st.D.data() + i * st.p, st.Z.data() + i * st.p,
                       scratch);
  return st;
}

struct Candidate {
  double drss = -1.0;
  int parent = -2;  // -1 = intercept
  std::size_t feature = 0;
  double knot = 0.0;
  bool is_pair = false;
  bool valid() const { return drss >= 0.0; }
};

BasisTerm make_child(const NodeModel& model, int parent, Factor f) {
  BasisTerm t;
  if (parent >= 0) t = model.terms[static_cast<std::size_t>(parent)];
  t.factors.push_back(f);
  t.canonicalize();
  return t;
}

bool term_in_model(const NodeModel& model, const BasisTerm& t) {
  return std::find(model.terms.begin(), model.terms.end(), t) !=
         model.terms.end();
}

// Knots on feature j that would duplicate an existing factor or term when
// combined with this parent.
std::set<double> blocked_knots(const NodeModel& model, int parent,
                               std::size_t j) {
  std::set<double> blocked;
  const BasisTerm* pt =
      parent >= 0 ? &model.terms[static_cast<std::size_t>(parent)] : nullptr;
  if (pt)
    for (const auto& f : pt->factors)
      if (f.feature == j && f.kind != FactorKind::Linear) blocked.insert(f.knot);
  std::size_t child_deg = (pt ? pt->degree() : 0) + 1;
  BasisTerm canon_parent;
  if (pt) {
    canon_parent = *pt;
    canon_parent.canonicalize();
  }
  for (const auto& term : model.terms) {
    if (term.degree() != child_deg) continue;
    for (std::size_t fi = 0; fi < term.factors.size(); ++fi) {
      const Factor& f = term.factors[fi];
      if (f.feature != j || f.kind == FactorKind::Linear) continue;
      BasisTerm reduced = term;
      reduced.factors.erase(reduced.factors.begin() +
                            static_cast<std::ptrdiff_t>(fi));
      reduced.canonicalize();
      if (reduced == canon_parent) blocked.insert(f.knot);
    }
  }
  return blocked;
}

// Sorted distinct-value groups of one column, descending.
struct ColumnGroups {
  std::vector<double> values;                   // descending
  std::vector<std::vector<std::size_t>> rows;   // rows at each value
  std::vector<char> eligible;                   // knot candidacy per value
};

// Knot thinning after Friedman's minspan/endspan rule (alpha = 0.05): only
// every L-th order statistic away from both tails is knot-eligible. Without
// it the dense knot set chases local noise runs and jump edges, which the
// GCV accounting cannot price.
struct KnotSpans {
  std::size_t minspan = 1;
  std::size_t endspan = 1;
};

KnotSpans knot_spans(std::size_t n, std::size_t m) {
  double alpha = 0.05;
  double mn = static_cast<double>(m) * static_cast<double>(n);
  double L = -std::log2(-std::log1p(-alpha) / mn) / 2.5;
  double Le = 3.0 - std::log2(alpha / static_cast<double>(m));
  KnotSpans spans;
  spans.minspan = static_cast<std::size_t>(std::max(1.0, std::floor(L)));
  spans.endspan = static_cast<std::size_t>(std::max(1.0, std::floor(Le)));
  return spans;
}

ColumnGroups group_column_desc(const Dataset& data, std::size_t j,
                               const KnotSpans& spans) {
  std::vector<std::size_t> order(data.n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.x(a, j) > data.x(b, j);
  });
  ColumnGroups g;
  for (std::size_t i : order) {
    double v = data.x(i, j);
    if (g.values.empty() || v != g.values.back()) {
      g.values.push_back(v);
      g.rows.emplace_back();
    }
    g.rows.back().push_back(i);
  }

  // A value is eligible when one of its ascending order statistics q lies in
  // [endspan, n-1-endspan] with (q - endspan) divisible by minspan.
  std::size_t n = data.n;
  std::size_t L = spans.minspan, Le = spans.endspan;
  g.eligible.assign(g.values.size(), 0);
  std::size_t c = 0;
  for (std::size_t gi = 0; gi < g.values.size(); ++gi) {
    std::size_t sz = g.rows[gi].size();
    std::size_t asc_lo = n - c - sz, asc_hi = n - c - 1;
    if (n >= 2 * Le + 1 && asc_hi >= Le && asc_lo <= n - 1 - Le) {
      std::size_t a = std::max(asc_lo, Le);
      std::size_t b = std::min(asc_hi, n - 1 - Le);
      std::size_t q0 = Le + ((a - Le) + L - 1) / L * L;
      if (q0 <= b) g.eligible[gi] = 1;
    }
    c += sz;
  }
  return g;
}

}  // namespace

NodeModel forward_pass(const Dataset& data, const ForwardConfig& config) {
  if (data.n < 2) throw StructuralError("forward_pass: need at least 2 rows");
  if (data.m == 0) throw StructuralError("forward_pass: no feature columns");

  NodeModel model;
  model = refit(model, data);

  double mean_y = std::accumulate(data.Y.begin(), data.Y.end(), 0.0) /
                  static_cast<double>(data.n);
  double var_scale = 0.0;
  for (double y : data.Y) var_scale += (y - mean_y) * (y - mean_y);

  KnotSpans spans = knot_spans(data.n, data.m);
  std::vector<ColumnGroups> groups(data.m);
  for (std::size_t j = 0; j < data.m; ++j)
    if (!data.is_categorical(j)) groups[j] = group_column_desc(data, j, spans);

  std::size_t n = data.n;
  double penalty = config.resolved_gcv_penalty();

  // The loop commits terms while RSS improves, tolerating a few consecutive
  // steps whose full-model GCV fails to beat the best seen; on stop, the
  // model rolls back to the GCV-best prefix. This keeps noise fitting short
  // without cutting off real structure at a local GCV plateau.
  constexpr std::size_t kGcvPatience = 3;
  double best_gcv = std::numeric_limits<double>::infinity();
  std::size_t best_terms = 0;
  std::size_t worsening = 0;

  while (true) {
    std::size_t p = model.num_coefficients();
    if (p + 1 > config.max_terms || p + 1 > n) break;

    StepState st = build_step(model, data);

    double g_cur = gcv(st.rss, n, effective_params(model, penalty));
    if (g_cur < best_gcv) {
      best_gcv = g_cur;
      best_terms = model.terms.size();
      worsening = 0;
    } else if (++worsening > kGcvPatience) {
      break;
    }

    if (st.rss <= 1e-14 * var_scale || st.rss <= 0.0) break;

    bool room_for_pair = p + 2 <= config.max_terms && p + 2 <= n;

    std::vector<int> parents;
    parents.push_back(-1);
    for (std::size_t t = 0; t < model.terms.size(); ++t)
      if (model.terms[t].degree() < config.max_degree)
        parents.push_back(static_cast<int>(t));

    Candidate best_pair, best_linear;
    std::vector<std::vector<double>> dlin(
        parents.size(), std::vector<double>(data.m, -1.0));

    std::vector<double> bcol(n);
    std::vector<double> T_b(st.p), Th_b(st.p), T_xb(st.p), Th_xb(st.p);
    std::vector<double> S_b(st.p), Sh_b(st.p), S_xb(st.p), Sh_xb(st.p);
    std::vector<double> E_b(st.p), Eh_b(st.p);
    std::vector<double> A_p(st.p), Ah_p(st.p), A_m(st.p), Ah_m(st.p);

    for (std::size_t pi = 0; pi < parents.size(); ++pi) {
      int pa = parents[pi];
      std::size_t pcol = static_cast<std::size_t>(pa + 1);
      for (std::size_t i = 0; i < n; ++i) bcol[i] = st.D[i * st.p + pcol];

      std::fill(T_b.begin(), T_b.end(), 0.0);
      std::fill(Th_b.begin(), Th_b.end(), 0.0);
      double T_bb = 0.0, T_br = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double b = bcol[i];
        if (b == 0.0) continue;
        const double* di = st.D.data() + i * st.p;
        const double* zi = st.Z.data() + i * st.p;
        for (std::size_t c = 0; c < st.p; ++c) {
          T_b[c] += b * di[c];
          Th_b[c] += b * zi[c];
        }
        T_bb += b * b;
        T_br += b * st.resid[i];
      }

      const BasisTerm* pt =
          pa >= 0 ? &model.terms[static_cast<std::size_t>(pa)] : nullptr;

      for (std::size_t j = 0; j < data.m; ++j) {
        if (data.is_categorical(j)) continue;
        // Each term uses a feature at most once; interactions combine
        // distinct variables.
        if (pt && pt->uses_feature(j)) continue;

        // First-order (linear-factor) candidate for this parent/feature.
        {
          Factor lf{FactorKind::Linear, j, 0.0};
          {
            BasisTerm cand = make_child(model, pa, lf);
            if (!term_in_model(model, cand)) {
              double A_dot = 0.0, uu = 0.0, v = 0.0;
              std::fill(A_p.begin(), A_p.end(), 0.0);
              std::fill(Ah_p.begin(), Ah_p.end(), 0.0);
              for (std::size_t i = 0; i < n; ++i) {
                double u = bcol[i] * data.x(i, j);
                if (u == 0.0) continue;
                const double* di = st.D.data() + i * st.p;
                const double* zi = st.Z.data() + i * st.p;
                for (std::size_t c = 0; c < st.p; ++c) {
                  A_p[c] += u * di[c];
                  Ah_p[c] += u * zi[c];
                }
                uu += u * u;
                v += u * st.resid[i];
              }
              for (std::size_t c = 0; c < st.p; ++c) A_dot += A_p[c] * Ah_p[c];
              double muu = uu - A_dot;
              if (uu > 0.0 && muu > kCandidateTol * uu) {
                double drss = v * v / muu;
                dlin[pi][j] = drss;
                if (drss > best_linear.drss)
                  best_linear = {drss, pa, j, 0.0, false};
              }
            }
          }
        }

        // Hinge-pair sweep over all distinct knots, descending.
        if (!room_for_pair) continue;
        const ColumnGroups& g = groups[j];
        if (g.values.size() < 2) continue;
        auto blocked = blocked_knots(model, pa, j);

        std::fill(T_xb.begin(), T_xb.end(), 0.0);
        std::fill(Th_xb.begin(), Th_xb.end(), 0.0);
        double T_bbx = 0.0, T_bbxx = 0.0, T_brx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double b = bcol[i];
          if (b == 0.0) continue;
          double xv = data.x(i, j);
          double bx = b * xv;
          const double* di = st.D.data() + i * st.p;
          const double* zi = st.Z.data() + i * st.p;
          for (std::size_t c = 0; c < st.p; ++c) {
            T_xb[c] += bx * di[c];
            Th_xb[c] += bx * zi[c];
          }
          T_bbx += b * b * xv;
          T_bbxx += bx * bx;
          T_brx += bx * st.resid[i];
        }

        std::fill(S_b.begin(), S_b.end(), 0.0);
        std::fill(Sh_b.begin(), Sh_b.end(), 0.0);
        std::fill(S_xb.begin(), S_xb.end(), 0.0);
        std::fill(Sh_xb.begin(), Sh_xb.end(), 0.0);
        double c_bb = 0.0, c_bbx = 0.0, c_bbxx = 0.0, c_br = 0.0, c_brx = 0.0;

        for (std::size_t gi = 0; gi < g.values.size(); ++gi) {
          double t = g.values[gi];
          std::fill(E_b.begin(), E_b.end(), 0.0);
          std::fill(Eh_b.begin(), Eh_b.end(), 0.0);
          double e_bb = 0.0, e_br = 0.0;
          for (std::size_t i : g.rows[gi]) {
            double b = bcol[i];
            if (b == 0.0) continue;
            const double* di = st.D.data() + i * st.p;
            const double* zi = st.Z.data() + i * st.p;
            for (std::size_t c = 0; c < st.p; ++c) {
              E_b[c] += b * di[c];
              Eh_b[c] += b * zi[c];
            }
            e_bb += b * b;
            e_br += b * st.resid[i];
          }

          if (gi > 0 && g.eligible[gi] && !blocked.contains(t)) {
            // u+ = b * (x - t)_+ over active rows {x > t}.
            double uu_p = c_bbxx - 2.0 * t * c_bbx + t * t * c_bb;
            double scale_p = c_bbxx + t * t * c_bb;
            double dot_pp = 0.0;
            for (std::size_t c = 0; c < st.p; ++c) {
              A_p[c] = S_xb[c] - t * S_b[c];
              Ah_p[c] = Sh_xb[c] - t * Sh_b[c];
              dot_pp += A_p[c] * Ah_p[c];
            }
            double q_pp = uu_p - dot_pp;
            double v_p = c_brx - t * c_br;

            // u- = b * (t - x)_+ over {x < t} (totals minus active minus ties).
            double cc_bb = T_bb - c_bb - e_bb;
            double cc_bbx = T_bbx - c_bbx - t * e_bb;
            double cc_bbxx = T_bbxx - c_bbxx - t * t * e_bb;
            double cc_br = T_br - c_br - e_br;
            double cc_brx = T_brx - c_brx - t * e_br;
            double uu_m = t * t * cc_bb - 2.0 * t * cc_bbx + cc_bbxx;
            double scale_m = t * t * cc_bb + cc_bbxx;
            double dot_mm = 0.0, dot_pm = 0.0;
            for (std::size_t c = 0; c < st.p; ++c) {
              double cb = T_b[c] - S_b[c] - E_b[c];
              double cxb = T_xb[c] - S_xb[c] - t * E_b[c];
              double chb = Th_b[c] - Sh_b[c] - Eh_b[c];
              double chxb = Th_xb[c] - Sh_xb[c] - t * Eh_b[c];
              A_m[c] = t * cb - cxb;
              Ah_m[c] = t * chb - chxb;
              dot_mm += A_m[c] * Ah_m[c];
              dot_pm += A_p[c] * Ah_m[c];
            }
            double q_mm = uu_m - dot_mm;
            double q_pm = -dot_pm;
            double v_m = t * cc_br - cc_brx;

            bool ok_p = scale_p > 0.0 && q_pp > kCandidateTol * scale_p;
            bool ok_m = scale_m > 0.0 && q_mm > kCandidateTol * scale_m;
            double drss = -1.0;
            if (ok_p && ok_m) {
              double det = q_pp * q_mm - q_pm * q_pm;
              if (det > 1e-10 * q_pp * q_mm) {
                drss = (v_p * v_p * q_mm - 2.0 * v_p * v_m * q_pm +
                        v_m * v_m * q_pp) /
                       det;
              } else {
                // The pair spans a single new direction (its linear
                // combination x - t is already in the basis); score the
                // rank-1 gain of the better hinge.
                drss = std::max(v_p * v_p / q_pp, v_m * v_m / q_mm);
              }
            } else if (ok_p) {
              drss = v_p * v_p / q_pp;
            } else if (ok_m) {
              drss = v_m * v_m / q_mm;
            }
            if (drss > best_pair.drss) best_pair = {drss, pa, j, t, true};
          }

          for (std::size_t c = 0; c < st.p; ++c) {
            S_b[c] += E_b[c];
            Sh_b[c] += Eh_b[c];
            S_xb[c] += t * E_b[c];
            Sh_xb[c] += t * Eh_b[c];
          }
          c_bb += e_bb;
          c_bbx += t * e_bb;
          c_bbxx += t * t * e_bb;
          c_br += e_br;
          c_brx += t * e_br;
        }
      }
    }

    Candidate chosen =
        best_pair.valid() && best_pair.drss >= best_linear.drss ? best_pair
                                                                : best_linear;
    if (!chosen.valid()) break;

    std::size_t knots = model.knot_count();
    if (chosen.is_pair) {
      // Prefer the single first-order term when its GCV is lower.
      std::size_t pi = 0;
      for (; pi < parents.size(); ++pi)
        if (parents[pi] == chosen.parent) break;
      double drss_lin = dlin[pi][chosen.feature];
      if (drss_lin >= 0.0) {
        bool knot_new = true;
        for (const auto& term : model.terms)
          for (const auto& f : term.factors)
            if (f.kind != FactorKind::Linear && f.feature == chosen.feature &&
                f.knot == chosen.knot)
              knot_new = false;
        double eff_pair = static_cast<double>(p + 2) +
                          penalty * static_cast<double>(knots + (knot_new ? 1 : 0));
        double eff_lin =
            static_cast<double>(p + 1) + penalty * static_cast<double>(knots);
        double g_pair =
            gcv(std::max(0.0, st.rss - chosen.drss), n, eff_pair);
        double g_lin =
            gcv(std::max(0.0, st.rss - drss_lin), n, eff_lin);
        if (g_lin <= g_pair) {
          chosen = {drss_lin, chosen.parent, chosen.feature, 0.0, false};
        }
      }
    }

    double rel = std::min(chosen.drss, st.rss) / st.rss;
    if (rel < config.min_rss_decrease) break;

    if (chosen.is_pair) {
      model.terms.push_back(make_child(
          model, chosen.parent,
          Factor{FactorKind::HingePos, chosen.feature, chosen.knot}));
      model.terms.push_back(make_child(
          model, chosen.parent,
          Factor{FactorKind::HingeNeg, chosen.feature, chosen.knot}));
      model.coefficients.push_back(0.0);
      model.coefficients.push_back(0.0);
    } else {
      model.terms.push_back(
          make_child(model, chosen.parent, Factor{FactorKind::Linear,
                                                  chosen.feature, 0.0}));
      model.coefficients.push_back(0.0);
    }
    model = refit(model, data);
  }

  // Loop exits (budget, stop rule) can leave the last committed state
  // unscored; evaluate it before rolling back.
  {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = data.Y[i] - predict(model, data.row(i));
      rss += r * r;
    }
    double g_final = gcv(rss, n, effective_params(model, penalty));
    if (g_final < best_gcv) best_terms = model.terms.size();
  }

  if (model.terms.size() > best_terms) {
    // Roll back to the GCV-best prefix (terms commit in order).
    model.terms.resize(best_terms);
    model.coefficients.resize(best_terms);
    model = refit(model, data);
  }

  return model;
}

}  // namespace smart
