#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>

#include "extlen/extremal.hpp"

namespace extlen {

namespace {

// Dual coordinate ascent for minimize rho^T W rho subject to A rho >= 1,
// rho >= 0. All row coefficients are nonnegative, so the primal candidate
// rho = A^T lambda / (2w) is automatically nonnegative.
struct DualQP {
  const SurfaceMesh& mesh;
  std::vector<SparseRow>& rows;
  std::vector<double> lambda;
  EdgeMetric rho;
  double kkt = 0.0;

  explicit DualQP(const SurfaceMesh& m, std::vector<SparseRow>& r)
      : mesh(m), rows(r), rho(m.edges.size(), 0.0) {}

  void add_row() { lambda.push_back(0.0); }

  double row_dot(const SparseRow& row) const {
    double v = 0.0;
    for (auto [e, c] : row.entries) v += c * rho[e];
    return v;
  }

  void solve(double tol, int max_sweeps = 50000) {
    std::vector<double> curvature(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      double q = 0.0;
      for (auto [e, c] : rows[i].entries)
        q += c * c / (2.0 * mesh.edges[e].weight);
      curvature[i] = q;
    }
    // rebuild the primal from scratch: incremental updates drift over many
    // sweeps, and exact ascent needs rho == A^T lambda / (2w)
    std::fill(rho.begin(), rho.end(), 0.0);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (lambda[i] == 0.0) continue;
      for (auto [e, c] : rows[i].entries)
        rho[e] += lambda[i] * c / (2.0 * mesh.edges[e].weight);
    }
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      for (size_t i = 0; i < rows.size(); ++i) {
        if (curvature[i] <= 0.0) continue;
        double r = row_dot(rows[i]);
        double nl = std::max(0.0, lambda[i] + (1.0 - r) / curvature[i]);
        double d = nl - lambda[i];
        if (d == 0.0) continue;
        lambda[i] = nl;
        for (auto [e, c] : rows[i].entries)
          rho[e] += d * c / (2.0 * mesh.edges[e].weight);
      }
      kkt = 0.0;
      for (size_t i = 0; i < rows.size(); ++i) {
        double r = row_dot(rows[i]);
        kkt = std::max(kkt, std::max(0.0, 1.0 - r));
        kkt = std::max(kkt, lambda[i] * std::abs(r - 1.0));
      }
      if (kkt < tol) {
        if (std::getenv("EXTLEN_DEBUG2"))
          std::fprintf(stderr, "  qp exit sweep=%d kkt=%.3e tol=%.1e\n", sweep,
                       kkt, tol);
        return;
      }
    }
    if (std::getenv("EXTLEN_DEBUG2")) {
      size_t nz = 0;
      double lmax = 0.0, smax = 0.0;
      for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].entries.empty()) ++nz;
        lmax = std::max(lmax, lambda[i]);
        smax = std::max(smax, std::abs(row_dot(rows[i]) - 1.0));
      }
      std::fprintf(stderr,
                   "  qp SWEEPLIMIT kkt=%.3e tol=%.1e rows=%zu empty=%zu "
                   "lmax=%.3e smax=%.3e lam_sz=%zu\n",
                   kkt, tol, rows.size(), nz, lmax, smax, lambda.size());
    }
  }

  double dual_value() const {
    double s = 0.0;
    for (double l : lambda) s += l;
    return s - discrete_area(mesh, rho);
  }
};

}  // namespace

SolveResult extremal_solve(const SurfaceMesh& mesh,
                           const std::vector<HomotopyClass>& classes,
                           const SolveOptions& opts) {
  if (classes.empty())
    throw ExtremalError("extremal_solve: no constraint classes");
  std::vector<HomotopyOracle> oracles;
  oracles.reserve(classes.size());
  for (const auto& c : classes) oracles.emplace_back(mesh, c);

  SolveResult out;
  DualQP qp(mesh, out.rows);

  auto add_combined_row = [&](const std::vector<EdgePath>& paths) -> bool {
    std::map<int, double> coeff;
    for (size_t i = 0; i < paths.size(); ++i)
      for (int e : paths[i].edge_ids) coeff[e] += classes[i].weight;
    if (coeff.empty())
      throw ExtremalError("extremal_solve: constraint row has no edges");
    SparseRow row;
    row.entries.assign(coeff.begin(), coeff.end());
    for (const auto& r : out.rows)
      if (r.entries == row.entries) return false;
    out.rows.push_back(std::move(row));
    qp.add_row();
    return true;
  };

  // seed with the hyperbolic-length minimizers so the QP starts bounded
  {
    EdgeMetric len(mesh.edges.size());
    for (size_t e = 0; e < len.size(); ++e) len[e] = mesh.edges[e].len;
    std::vector<EdgePath> paths;
    for (auto& o : oracles) paths.push_back(o.shortest(len, false).path);
    add_combined_row(paths);
  }

  int stale = 0;
  double certified_val = 0.0, certified_area = 0.0;
  double last_gap = 1.0;
  std::mt19937 rng(opts.shuffle_seed);
  for (out.iterations = 1; out.iterations <= opts.max_cuts; ++out.iterations) {
    // master accuracy tracks the remaining oracle violation; exactness only
    // matters near convergence
    qp.solve(std::max(opts.kkt_tol, 1e-3 * last_gap));
    // inactive constraints do not contribute to rho; dropping them keeps the
    // master small (they reappear through the oracle if they matter again)
    if (out.rows.size() > 64) {
      size_t keep = 0;
      for (size_t i = 0; i < out.rows.size(); ++i) {
        if (qp.lambda[i] <= 0.0) continue;
        if (keep != i) {
          out.rows[keep] = std::move(out.rows[i]);
          qp.lambda[keep] = qp.lambda[i];
        }
        ++keep;
      }
      out.rows.resize(keep);
      qp.lambda.resize(keep);
    }
    // cheap oracle pass; keep several near-shortest representatives per class
    // so each round can contribute many violated constraints
    double val = 0.0;
    std::vector<EdgePath> paths;
    std::vector<std::vector<PathResult>> multi(oracles.size());
    for (size_t i = 0; i < oracles.size(); ++i) {
      multi[i] = oracles[i].shortest_multi(qp.rho, opts.cuts_per_round);
      val += classes[i].weight * multi[i].front().length;
      paths.push_back(multi[i].front().path);
    }
    bool certified = false;
    if (val >= 1.0 - opts.oracle_tol) {
      // certify before declaring convergence; a single class may stop early
      // once its own share of the budget is provably violated
      val = 0.0;
      paths.clear();
      certified = true;
      for (size_t i = 0; i < oracles.size(); ++i) {
        double target =
            classes.size() == 1 ? (1.0 - opts.oracle_tol) / classes[i].weight
                                : -1.0;
        // resolve each class to its share of the oracle tolerance; the slack
        // is deducted from the certified value below
        double cert_tol =
            0.25 * opts.oracle_tol /
            (static_cast<double>(classes.size()) * classes[i].weight);
        PathResult r = oracles[i].shortest(qp.rho, true, target, cert_tol);
        certified = certified && r.certified;
        val += classes[i].weight * r.length;
        paths.push_back(std::move(r.path));
      }
    }
    if (opts.shuffle_seed != 0) {
      std::vector<size_t> perm(out.rows.size());
      for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<SparseRow> prows(perm.size());
      std::vector<double> plam(perm.size());
      for (size_t i = 0; i < perm.size(); ++i) {
        prows[i] = std::move(out.rows[perm[i]]);
        plam[i] = qp.lambda[perm[i]];
      }
      out.rows = std::move(prows);
      qp.lambda = std::move(plam);
    }
    last_gap = std::max(0.0, 1.0 - val);
    if (std::getenv("EXTLEN_DEBUG"))
      std::fprintf(stderr,
                   "iter=%d rows=%zu val=%.9f dual=%.9f area=%.9f kkt=%.2e "
                   "cert=%d\n",
                   out.iterations, out.rows.size(), val, qp.dual_value(),
                   discrete_area(mesh, qp.rho), qp.kkt, (int)certified);
    if (certified && val >= 1.0 - opts.oracle_tol) {
      certified_val = val - 0.25 * opts.oracle_tol;
      certified_area = discrete_area(mesh, qp.rho);
      out.converged = true;
      break;
    }
    bool added = add_combined_row(paths);
    // secondary representatives (swap one class's path at a time), kept only
    // while still violated
    double cheap_best = 0.0;
    for (size_t i = 0; i < multi.size(); ++i)
      cheap_best += classes[i].weight * multi[i].front().length;
    for (size_t i = 0; i < multi.size(); ++i) {
      for (size_t j = 1; j < multi[i].size(); ++j) {
        double alt_val = cheap_best + classes[i].weight *
                         (multi[i][j].length - multi[i].front().length);
        if (alt_val >= 1.0 - opts.oracle_tol) break;
        std::vector<EdgePath> alt = paths;
        alt[i] = multi[i][j].path;
        added = add_combined_row(alt) || added;
      }
    }
    if (!added) {
      // constraint already present but still violated: the QP was not solved
      // tightly enough -- tighten and retry a few times before giving up
      if (++stale > 5)
        throw ExtremalError(
            "extremal_solve: stalled on an unresolved constraint");
      qp.solve(opts.kkt_tol * 0.01, 200000);
    } else {
      stale = 0;
    }
  }

  // polish the master so the reported metric and multipliers satisfy the
  // first-order conditions tightly (the certified bound keeps its own area)
  qp.solve(opts.kkt_tol);
  out.rho = qp.rho;
  out.lambda = qp.lambda;
  out.kkt = qp.kkt;
  out.area = discrete_area(mesh, out.rho);
  out.ext = out.area > 0.0 ? 1.0 / out.area : 0.0;
  double dual = qp.dual_value();
  out.ext_upper = dual > 0.0 ? 1.0 / dual : 0.0;
  // scaling the certified metric by 1/val makes it feasible for the full
  // problem, so the certified oracle value yields a lower bound on Ext
  out.ext_lower = out.converged && certified_area > 0.0
                      ? certified_val * certified_val / certified_area
                      : 0.0;
  return out;
}

TautReport taut_support_check(const SurfaceMesh& mesh, const SolveResult& res,
                              double tol) {
  double max_rho = 0.0, max_lambda = 0.0;
  for (double r : res.rho) max_rho = std::max(max_rho, r);
  for (double l : res.lambda) max_lambda = std::max(max_lambda, l);
  std::vector<char> covered(mesh.edges.size(), 0);
  for (size_t i = 0; i < res.rows.size(); ++i) {
    if (res.lambda[i] <= tol * max_lambda) continue;
    double r = 0.0;
    for (auto [e, c] : res.rows[i].entries) r += c * res.rho[e];
    if (std::abs(r - 1.0) > 1e-6) continue;  // not taut
    for (auto [e, c] : res.rows[i].entries)
      if (c > 0.0) covered[e] = 1;
  }
  TautReport rep;
  int support = 0, hit = 0;
  for (size_t e = 0; e < res.rho.size(); ++e) {
    if (res.rho[e] <= tol * max_rho) continue;
    ++support;
    if (covered[e])
      ++hit;
    else
      rep.uncovered.push_back(static_cast<int>(e));
  }
  rep.covered_fraction = support == 0 ? 1.0 : static_cast<double>(hit) / support;
  return rep;
}

}  // namespace extlen
