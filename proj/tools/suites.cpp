#include "suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

#include "sigma2lab/calculus.hpp"
#include "sigma2lab/estimates.hpp"
#include "sigma2lab/graphgeom.hpp"
#include "sigma2lab/grid.hpp"
#include "sigma2lab/jets.hpp"
#include "sigma2lab/pointwise.hpp"
#include "sigma2lab/rng.hpp"
#include "sigma2lab/solver.hpp"
#include "sigma2lab/symmat3.hpp"

namespace s2l {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}
std::string fmt3(const Vec3& v) {
  return "(" + fmt(v[0]) + "," + fmt(v[1]) + "," + fmt(v[2]) + ")";
}

template <typename F>
void add_case(std::vector<CaseResult>& out, const std::string& name, F&& body) {
  CaseResult c;
  c.name = name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.status = CaseStatus::Fail;
    c.detail = std::string("exception: ") + e.what();
  }
  c.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  out.push_back(std::move(c));
}

void require(CaseResult& c, bool ok, const std::string& why = "") {
  if (!ok) {
    c.status = CaseStatus::Fail;
    if (!why.empty()) {
      if (!c.detail.empty()) c.detail += "; ";
      c.detail += why;
    }
  }
}

int resolve_workers(const RunConfig& cfg) {
  int w = cfg.workers > 0 ? cfg.workers
                          : (int)std::thread::hardware_concurrency();
  return std::max(1, std::min(w, 64));
}

// Deterministic uniform lattice of sample points in [lo, hi]^3.
std::vector<Vec3> box_lattice(double lo, double hi, int per_axis) {
  std::vector<Vec3> pts;
  pts.reserve((size_t)per_axis * per_axis * per_axis);
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k) {
        auto t = [&](int m) {
          return lo + (hi - lo) * m / double(per_axis - 1);
        };
        pts.push_back({t(i), t(j), t(k)});
      }
  return pts;
}

// Ordered Gamma_2 sample from three box draws; false on rejection.
bool draw_cone_lambda(const CounterRng& rng, uint64_t idx, Vec3& l) {
  for (int d = 0; d < 3; ++d) l[d] = rng.uniform(idx, d, -1.5, 3.0);
  std::sort(l.begin(), l.end(), std::greater<double>());
  Sigmas s = sigma_from_lambda(l);
  return s.s1 > 0 && s.s2 > 0;
}

GridField sample_solution(const ManufacturedSolution& s, int n) {
  return sample_field([&s](const Vec3& x) { return s.jet(x).u; }, -1.0, 1.0,
                      n);
}

const ManufacturedSolution& catalog_entry(
    const std::vector<ManufacturedSolution>& cat, const std::string& name) {
  for (const auto& s : cat)
    if (s.name == name) return s;
  throw std::logic_error("catalog entry missing: " + name);
}

// ---------------------------------------------------------------- identities

struct IdentityAccum {
  double prod = 0, gram = 0, eig = 0, rot = 0;
  double nm = 1e300, l2 = 1e300;
  uint64_t accepted = 0;

  void merge(const IdentityAccum& o) {
    prod = std::max(prod, o.prod);
    gram = std::max(gram, o.gram);
    eig = std::max(eig, o.eig);
    rot = std::max(rot, o.rot);
    nm = std::min(nm, o.nm);
    l2 = std::min(l2, o.l2);
    accepted += o.accepted;
  }
};

IdentityAccum identity_pass(uint64_t budget, uint64_t seed, int workers) {
  CounterRng rng{seed};
  auto worker = [&](uint64_t begin, uint64_t end, IdentityAccum& acc) {
    for (uint64_t i = begin; i < end; ++i) {
      Vec3 l;
      if (!draw_cone_lambda(rng, i, l)) continue;
      ++acc.accepted;
      double lscale = 1.0 + norm(l);

      acc.prod = std::max(
          acc.prod,
          std::fabs(product_identity_residual(l)) / (lscale * lscale * lscale));
      acc.l2 = std::min(acc.l2, l[1] / lscale);

      Mat3 q = rotation_from_quaternion(
          rng.uniform(i, 4, -1, 1), rng.uniform(i, 5, -1, 1),
          rng.uniform(i, 6, -1, 1), rng.uniform(i, 7, -1, 1));
      SymMat3 a = rotate_from(SymMat3::diag(l[0], l[1], l[2]), q);
      double ascale = 1.0 + a.frob();

      acc.gram = std::max(acc.gram, gram_identity_residual(a) /
                                        (ascale * ascale * ascale));
      acc.nm = std::min(acc.nm, in_gamma2(a).newton_maclaurin /
                                    (ascale * ascale * ascale));

      EigenTriple et = eigen_sorted(a);
      SymMat3 rec = rotate_from(
          SymMat3::diag(et.lambda[0], et.lambda[1], et.lambda[2]), et.q);
      acc.eig = std::max(acc.eig, (rec - a).frob() / ascale);

      Sigmas sa = sigma_all(a);
      Sigmas sr = sigma_all(rotate_into(a, q));
      acc.rot = std::max(
          acc.rot,
          std::max({std::fabs(sa.s1 - sr.s1) / lscale,
                    std::fabs(sa.s2 - sr.s2) / (lscale * lscale),
                    std::fabs(sa.s3 - sr.s3) / (lscale * lscale * lscale)}));
    }
  };

  std::vector<IdentityAccum> accs(workers);
  std::vector<std::thread> pool;
  uint64_t chunk = (budget + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    uint64_t b = w * chunk, e = std::min(budget, b + chunk);
    if (b >= e) break;
    pool.emplace_back(worker, b, e, std::ref(accs[w]));
  }
  for (auto& t : pool) t.join();
  IdentityAccum total;
  for (const auto& a : accs) total.merge(a);
  return total;
}

std::vector<CaseResult> suite_identities(const RunConfig& cfg) {
  std::vector<CaseResult> out;
  IdentityAccum acc =
      identity_pass(cfg.budget, cfg.seed, resolve_workers(cfg));
  std::string note = "accepted=" + std::to_string(acc.accepted);

  add_case(out, "identities.product", [&](CaseResult& c) {
    c.value = acc.prod;
    c.tolerance = 1e-12;
    c.detail = note;
    require(c, acc.prod <= 1e-12);
  });
  add_case(out, "identities.gram", [&](CaseResult& c) {
    c.value = acc.gram;
    c.tolerance = 1e-12;
    require(c, acc.gram <= 1e-12);
  });
  add_case(out, "identities.newton_maclaurin", [&](CaseResult& c) {
    c.value = acc.nm;
    c.tolerance = 1e-12;
    require(c, acc.nm >= -1e-12, "sigma1 sigma2 - 9 sigma3 went negative");
  });
  add_case(out, "identities.lambda2_positive", [&](CaseResult& c) {
    c.value = acc.l2;
    require(c, acc.l2 > 0, "middle eigenvalue not positive in ordered cone");
  });
  add_case(out, "identities.eigen_recompose", [&](CaseResult& c) {
    c.value = acc.eig;
    c.tolerance = 1e-12;
    require(c, acc.eig <= 1e-12);
  });
  add_case(out, "identities.rotation_invariance", [&](CaseResult& c) {
    c.value = acc.rot;
    c.tolerance = 1e-12;
    require(c, acc.rot <= 1e-12);
  });
  return out;
}

// ----------------------------------------------------------------- pointwise

std::vector<CaseResult> suite_pointwise(const RunConfig& cfg) {
  std::vector<CaseResult> out;
  int workers = resolve_workers(cfg);

  add_case(out, "pointwise.claim1.exact", [&](CaseResult& c) {
    double v1 = claim1_min_eig({1, 1, 1}, 0.4);
    double v2 = claim2_gap({1, 1, 1}, 0.05);
    c.value = v1;
    c.tolerance = 1e-12;
    c.detail = "claim2@ones=" + fmt(v2);
    require(c, std::fabs(v1 - 2.6) <= 1e-12, "expected 2.6");
    require(c, std::fabs(v2 - 540.0) <= 1e-9, "expected 540");
  });

  add_case(out, "pointwise.claim1.inf", [&](CaseResult& c) {
    InfimumReport rep = infimum_search({Quantity::Claim1, 0.4}, {}, cfg.budget,
                                       cfg.seed, -1e-10, workers);
    double scale = 1.0 + norm(rep.argmin);
    c.value = rep.value;
    c.tolerance = 1e-10 * scale;
    c.detail = "argmin=" + fmt3(rep.argmin) +
               " accepted=" + std::to_string(rep.samples_accepted);
    require(c, rep.value >= -1e-10 * scale, "concavity form dipped negative");
  });

  add_case(out, "pointwise.claim2.inf", [&](CaseResult& c) {
    InfimumReport rep = infimum_search({Quantity::Claim2, 0.05}, {},
                                       cfg.budget, cfg.seed, 0.0, workers);
    double s = 1.0 + norm(rep.argmin);
    double scale = s * s * s * s;
    c.value = rep.value;
    c.tolerance = 1e-8 * scale;
    c.detail = "argmin=" + fmt3(rep.argmin);
    require(c, rep.value >= -1e-8 * scale, "product gap dipped negative");
  });

  add_case(out, "pointwise.claim1.probe", [&](CaseResult& c) {
    SampleRegion box;
    box.normalized = false;
    box.box_lo = 0.75;
    box.box_hi = 1.25;
    InfimumReport rep = infimum_search({Quantity::Claim1, 0.9}, box,
                                       cfg.budget, cfg.seed, -0.3, workers);
    c.value = rep.value;
    c.tolerance = 0.3;
    c.detail = "witness=" + fmt3(rep.argmin);
    require(c, rep.value <= -0.3,
            "inflated eps failed to break the concavity form");
  });

  // the estimator refuses budgets under 1e4; degrade to skips, not an abort
  const bool cone_ok = cfg.budget >= 10000;
  ConeConstants cc, cc2;
  if (cone_ok) {
    cc = estimate_cone_constants(cfg.budget, cfg.seed, {}, workers);
    cc2 = estimate_cone_constants(cfg.budget, cfg.seed + 1, {}, workers);
  }

  add_case(out, "pointwise.cone.c1", [&](CaseResult& c) {
    if (!cone_ok) {
      c.status = CaseStatus::Skip;
      c.detail = "budget below the 1e4 estimator floor";
      return;
    }
    c.value = cc.c1;
    c.tolerance = 0.01;
    c.detail = "arg=" + fmt3(cc.arg1) + " reseeded=" + fmt(cc2.c1);
    require(c, cc.c1 > 0, "c1 not positive");
    require(c, std::fabs(cc.c1 - cc2.c1) <= 0.01 * cc.c1,
            "seed instability beyond 1%");
  });
  add_case(out, "pointwise.cone.c2", [&](CaseResult& c) {
    if (!cone_ok) {
      c.status = CaseStatus::Skip;
      c.detail = "budget below the 1e4 estimator floor";
      return;
    }
    c.value = cc.c2;
    c.tolerance = 0.01;
    c.detail = "arg=" + fmt3(cc.arg2) + " reseeded=" + fmt(cc2.c2);
    require(c, cc.c2 > 0, "c2 not positive");
    require(c, std::fabs(cc.c2 - cc2.c2) <= 0.01 * cc.c2,
            "seed instability beyond 1%");
  });

  add_case(out, "pointwise.cone.family", [&](CaseResult& c) {
    // (1, 1, t) with t -> -1/2 drives min(r2, r3) to 1/3 from above.
    double best = 1e300;
    double best_t = 0;
    for (int j = 1; j <= 7; ++j) {
      double t = -0.5 + std::pow(10.0, -j);
      Lemma2Ratios r = lemma2_ratios({1.0, 1.0, t});
      double m = std::min(r.r2, r.r3);
      if (m < best) {
        best = m;
        best_t = t;
      }
    }
    c.value = best;
    c.tolerance = 1e-3;
    c.detail = "t=" + fmt(best_t);
    require(c, best <= 1.0 / 3.0 + 1e-3, "family fails to pin c2 at 1/3");
    require(c, best >= 1.0 / 3.0 - 1e-12, "ratio dipped below the cone bound");
  });

  return out;
}

// ----------------------------------------------------------------------- mms

std::vector<CaseResult> suite_mms(const RunConfig& cfg) {
  (void)cfg;
  std::vector<CaseResult> out;
  auto cat = standard_catalog();
  auto pts = box_lattice(-0.9, 0.9, 10);

  for (const auto& s : cat) {
    add_case(out, "mms." + s.name + ".residual", [&](CaseResult& c) {
      double worst = 0;
      for (const auto& x : pts)
        worst = std::max(worst, std::fabs(mms_residual(s, x)));
      c.value = worst;
      c.tolerance = 1e-10;
      require(c, worst <= 1e-10);
    });
  }

  add_case(out, "mms.lemma1.analytic", [&](CaseResult& c) {
    double worst = 0;
    for (const auto& s : cat)
      for (const auto& x : pts) {
        Jet3 j = s.jet(x);
        Lemma1Residuals r = lemma1_residuals(j, eval_rhs(s.rhs, j));
        for (int d = 0; d < 3; ++d)
          worst = std::max({worst, std::fabs(r.r1[d]), std::fabs(r.r2[d])});
      }
    c.value = worst;
    c.tolerance = 1e-10;
    require(c, worst <= 1e-10);
  });

  add_case(out, "mms.vdecomp.mismatch", [&](CaseResult& c) {
    double worst = 0, min_sep = 1e300;
    int used = 0, skipped = 0;
    for (const auto& s : cat)
      for (const auto& x : pts) {
        Jet3 j = s.jet(x);
        VParts v = v_decomposition(j, eval_rhs(s.rhs, j), 1e-6);
        if (v.skipped) {
          ++skipped;
          continue;
        }
        ++used;
        min_sep = std::min(min_sep, v.separation);
        worst = std::max(worst, v.mismatch / (1.0 + std::fabs(v.direct)));
      }
    c.value = worst;
    c.tolerance = 1e-9;
    c.detail = "used=" + std::to_string(used) +
               " skipped=" + std::to_string(skipped) +
               " min_sep=" + fmt(min_sep);
    require(c, worst <= 1e-9);
    require(c, used > 0, "no points with separated spectrum");
  });

  add_case(out, "mms.concavity", [&](CaseResult& c) {
    double worst = 1e300;
    for (const auto& s : cat)
      for (const auto& x : pts) {
        Jet3 j = s.jet(x);
        worst = std::min(worst, concavity_margin(j, eval_rhs(s.rhs, j)));
      }
    c.value = worst;
    c.tolerance = 1e-9;
    require(c, worst >= -1e-9, "concavity margin went negative");
  });

  add_case(out, "mms.rescale.residual", [&](CaseResult& c) {
    ManufacturedSolution r = rescale(catalog_entry(cat, "trig-pert"), 0.5);
    double worst = 0;
    for (const auto& x : pts)
      worst = std::max(worst, std::fabs(mms_residual(r, x)));
    c.value = worst;
    c.tolerance = 1e-10;
    require(c, worst <= 1e-10);
  });

  add_case(out, "mms.fd.order", [&](CaseResult& c) {
    const auto& trig = catalog_entry(cat, "trig-pert");
    auto sup_r1 = [&](int n) {
      GridField u = sample_solution(trig, n);
      double worst = 0;
      for (int k = 2; k < n - 2; ++k)
        for (int j = 2; j < n - 2; ++j)
          for (int i = 2; i < n - 2; ++i) {
            Jet3 jet = jet_at(u, i, j, k);
            RhsEval e = trig.rhs.eval(jet.x, jet.u, jet.du);
            Vec3 r = lemma1_r1(jet, e);
            worst = std::max({worst, std::fabs(r[0]), std::fabs(r[1]),
                              std::fabs(r[2])});
          }
      return worst;
    };
    double r17 = sup_r1(17), r33 = sup_r1(33);
    double order = std::log(r17 / r33) / std::log(2.0);
    c.value = order;
    c.tolerance = 0.3;
    c.detail = "sup17=" + fmt(r17) + " sup33=" + fmt(r33);
    require(c, order >= 1.7 && order <= 2.3, "order outside 2.0 +- 0.3");
  });

  add_case(out, "mms.crequired.stability", [&](CaseResult& c) {
    // sup over shared lattice nodes of the two C_required fields, from FD
    // jets plus FD derivatives of the log sigma1 / log weight fields; both
    // sups must be finite and move less than 10% from h to h/2
    const auto& trig = catalog_entry(cat, "trig-pert");
    auto sups = [&](int n) {
      GridField u = sample_solution(trig, n);
      GridField b(-1, 1, n), w(-1, 1, n);
      for (int k = 1; k < n - 1; ++k)
        for (int j = 1; j < n - 1; ++j)
          for (int i = 1; i < n - 1; ++i) {
            Vec3 du;
            SymMat3 d2;
            jet2_at(u, i, j, k, du, d2);
            Sigmas sg = sigma_all(d2);
            double f =
                trig.rhs.eval(u.point(i, j, k), u.at(i, j, k), du).value;
            b.at(i, j, k) = std::log(sg.s1);
            w.at(i, j, k) = std::log(f * sg.s1 - sg.s3);
          }
      std::pair<double, double> s{0, 0};
      int stride = (n - 1) / 8;
      for (int k = 2 * stride; k <= n - 1 - 2 * stride; k += stride)
        for (int j = 2 * stride; j <= n - 1 - 2 * stride; j += stride)
          for (int i = 2 * stride; i <= n - 1 - 2 * stride; i += stride) {
            Jet3 jet = jet_at(u, i, j, k);
            RhsEval e = trig.rhs.eval(jet.x, jet.u, jet.du);
            Vec3 bg, vg;
            SymMat3 bh, vh;
            jet2_at(b, i, j, k, bg, bh);
            jet2_at(w, i, j, k, vg, vh);
            s.first = std::max(
                s.first, logb_residual_given(jet, e, bg, bh).c_required);
            s.second = std::max(
                s.second, subv_residual_given(jet, e, vg, vh).c_required);
          }
      return s;
    };
    auto coarse = sups(17), fine = sups(33);
    double drift = std::max(std::fabs(fine.first / coarse.first - 1.0),
                            std::fabs(fine.second / coarse.second - 1.0));
    c.value = fine.first;
    c.tolerance = 0.10;
    c.detail = "subv=" + fmt(fine.second) + " drift=" + fmt(drift);
    require(c, std::isfinite(fine.first) && std::isfinite(fine.second));
    require(c, drift <= 0.10, "C_required not refinement stable");
  });

  add_case(out, "mms.gradient_bound", [&](CaseResult& c) {
    const auto& trig = catalog_entry(cat, "trig-pert");
    double g = 0, h = 0;
    for (const auto& x : pts) {
      Jet3 j = trig.jet(x);
      GradientBoundRatios r = gradient_bound_ratios(j, eval_rhs(trig.rhs, j));
      g = std::max(g, r.g_ratio);
      h = std::max(h, r.h_ratio);
    }
    c.value = g;
    c.detail = "h_ratio=" + fmt(h);
    require(c, std::isfinite(g) && std::isfinite(h));
  });

  return out;
}

// --------------------------------------------------------------------- solve

std::vector<CaseResult> suite_solve(const RunConfig& cfg) {
  std::vector<CaseResult> out;
  auto cat = standard_catalog();
  SolveParams sp;
  sp.tol = cfg.tol;
  sp.tau = cfg.tau;
  sp.max_iter = cfg.max_iter;
  sp.homotopy_steps = cfg.homotopy;

  auto max_err = [](const GridField& u, const ManufacturedSolution& s) {
    double worst = 0;
    for (int k = 0; k < u.n; ++k)
      for (int j = 0; j < u.n; ++j)
        for (int i = 0; i < u.n; ++i)
          worst = std::max(
              worst, std::fabs(u.at(i, j, k) - s.jet(u.point(i, j, k)).u));
    return worst;
  };

  add_case(out, "solve.quad.exact", [&](CaseResult& c) {
    const auto& s = catalog_entry(cat, "quad-aniso");
    auto g = [&s](const Vec3& x) { return s.jet(x).u; };
    SolveParams qp = sp;
    // sigma2-matched isotropic start: exact at the center node
    Jet3 j0 = s.jet({0, 0, 0});
    qp.init_a = std::sqrt(s.rhs.eval(j0.x, j0.u, j0.du).value / 3.0);
    auto [u, stats] = solve_dirichlet(s.rhs, g, -1, 1, 17, qp);
    c.value = max_err(u, s);
    c.tolerance = 1e-10;
    c.detail = "iters=" + std::to_string(stats.iterations);
    require(c, c.value <= 1e-10, "quadratic not recovered to 1e-10");
    require(c, stats.iterations <= 3, "needed more than 3 Newton steps");
  });

  add_case(out, "solve.cubic.exact", [&](CaseResult& c) {
    const auto& s = catalog_entry(cat, "cubic-pert");
    auto g = [&s](const Vec3& x) { return s.jet(x).u; };
    auto [u, stats] = solve_dirichlet(s.rhs, g, -1, 1, 17, sp);
    c.value = max_err(u, s);
    c.tolerance = 1e-8;
    c.detail = "iters=" + std::to_string(stats.iterations);
    require(c, c.value <= 1e-8, "cubic perturbation not discretely exact");
  });

  add_case(out, "solve.trig.order", [&](CaseResult& c) {
    const auto& s = catalog_entry(cat, "trig-pert");
    auto rows = convergence_study(s, {17, 33}, -1, 1, sp);
    c.value = rows.back().order;
    c.tolerance = 0.4;
    c.detail = "err17=" + fmt(rows[0].max_error) +
               " err33=" + fmt(rows[1].max_error);
    require(c, !rows.back().exact, "unexpectedly exact");
    require(c, c.value >= 1.6 && c.value <= 2.4, "order outside 2.0 +- 0.4");

    if (!cfg.out_dir.empty() && cfg.write_csv) {
      std::ostringstream os;
      os << "n,h,max_error,order,exact\n";
      for (const auto& r : rows)
        os << r.n << "," << fmt(r.h) << "," << fmt(r.max_error) << ","
           << fmt(r.order) << "," << (r.exact ? 1 : 0) << "\n";
      write_file((std::filesystem::path(cfg.out_dir) / "convergence.csv")
                     .string(),
                 os.str());
    }
  });

  add_case(out, "solve.margins", [&](CaseResult& c) {
    const auto& s = catalog_entry(cat, "trig-pert");
    auto g = [&s](const Vec3& x) { return s.jet(x).u; };
    auto [u, stats] = solve_dirichlet(s.rhs, g, -1, 1, 17, sp);
    double worst = 1e300;
    for (double m : stats.cone_margin_history) worst = std::min(worst, m);
    double damp = 1e300;
    for (double d : stats.damping_history) damp = std::min(damp, d);
    c.value = worst;
    c.detail = "min_damping=" + fmt(damp) +
               " mmatrix_violations=" + std::to_string(stats.mmatrix_violations);
    require(c, stats.converged, "solve did not converge");
    require(c, worst > 0, "iterate left the cone");
  });

  add_case(out, "solve.homotopy", [&](CaseResult& c) {
    const auto& s = catalog_entry(cat, "trig-pert");
    auto g = [&s](const Vec3& x) { return s.jet(x).u; };
    SolveParams hp = sp;
    hp.homotopy_steps = 3;
    auto [u, stats] = solve_dirichlet(s.rhs, g, -1, 1, 17, hp);
    c.value = residual_norm(u, s.rhs);
    c.tolerance = hp.tol;
    c.detail = "iters=" + std::to_string(stats.iterations);
    require(c, stats.converged && c.value <= hp.tol);
  });

  add_case(out, "solve.grid.roundtrip", [&](CaseResult& c) {
    const auto& s = catalog_entry(cat, "quad-aniso");
    GridField u = sample_solution(s, 17);
    auto path = std::filesystem::temp_directory_path() / "s2l_roundtrip.grid";
    save_grid(u, path);
    GridField v = load_grid(path);
    std::filesystem::remove(path);
    bool same = v.n == u.n && v.a == u.a && v.b == u.b && v.v == u.v;
    c.value = same ? 0 : 1;
    require(c, same, "grid file round trip not bit exact");
  });

  return out;
}

// --------------------------------------------------------------------- graph

std::vector<CaseResult> suite_graph(const RunConfig& cfg) {
  std::vector<CaseResult> out;
  auto cat = standard_catalog();
  int n = cfg.grid;
  int center = (n - 1) / 2;
  double h = 2.0 / (n - 1);
  NodeIndex y0{center, center, center};
  // Euclidean cells available around the center before the guard layer.
  int room = center - 4;

  auto radii_below = [&](double max_cells) {
    std::vector<double> radii;
    for (int m : {4, 5, 6, 8, 12, 16, 24})
      if (m <= max_cells) radii.push_back(m * h);
    return radii;
  };

  const auto& quad = catalog_entry(cat, "quad-iso");
  GridField uq = sample_solution(quad, n);
  // gauge r = 2 |x - y0| for the isotropic quadratic
  MassProfile prof =
      monotonicity_profile(uq, quad.rhs, y0, radii_below(2.0 * room), {});

  if (!cfg.out_dir.empty() && cfg.write_csv) {
    std::ostringstream os;
    os << "delta,mass,ratio\n";
    for (size_t i = 0; i < prof.radii.size(); ++i)
      os << fmt(prof.radii[i]) << "," << fmt(prof.masses[i]) << ","
         << fmt(prof.ratios[i]) << "\n";
    write_file(
        (std::filesystem::path(cfg.out_dir) / "massprofile.csv").string(),
        os.str());
  }

  add_case(out, "graph.quad.ratio", [&](CaseResult& c) {
    // mass / delta^3 should sit at 4 pi for every radius >= 4h
    double worst = 0;
    for (size_t i = 0; i < prof.radii.size(); ++i) {
      if (prof.radii[i] < 4 * h - 1e-12) continue;
      worst = std::max(worst, std::fabs(prof.ratios[i] / (4 * kPi) - 1.0));
    }
    c.value = worst;
    c.tolerance = 0.02;
    require(c, worst <= 0.02, "ball mass off 4 pi delta^3 by more than 2%");
  });

  add_case(out, "graph.quad.cemp", [&](CaseResult& c) {
    c.value = prof.c_emp;
    c.tolerance = 1.05;
    require(c, prof.c_emp <= 1.05, "monotonicity constant above 1.05");
  });

  add_case(out, "graph.quad.meanvalue", [&](CaseResult& c) {
    double R = std::min(8, room) * h;
    double v = mean_value_ratio(uq, quad.rhs, y0, R, {});
    double target = 3.0 / (32.0 * kPi);
    c.value = v;
    c.tolerance = 0.02 * target;
    c.detail = "target=" + fmt(target);
    require(c, std::fabs(v / target - 1.0) <= 0.02,
            "mean value ratio off 3/(32 pi) by more than 2%");
  });

  add_case(out, "graph.aniso.oracle", [&](CaseResult& c) {
    const auto& s = catalog_entry(cat, "quad-aniso");
    GridField ua = sample_solution(s, n);
    SymMat3 a = s.jet({0, 0, 0}).d2u;
    Sigmas sg = sigma_all(a);
    EigenTriple et = eigen_sorted(a);
    double det = 1;
    for (int d = 0; d < 3; ++d)
      det *= sg.s2 + et.lambda[d] * et.lambda[d];
    double oracle =
        (4 * kPi / 3) * sg.s1 * (sg.s2 * sg.s1 - sg.s3) / std::sqrt(det);
    MassProfile pa =
        monotonicity_profile(ua, s.rhs, y0, radii_below(1.6 * room), {});
    c.value = std::fabs(pa.ratios.back() / oracle - 1.0);
    c.tolerance = 5e-3;
    c.detail = "ratio=" + fmt(pa.ratios.back()) + " oracle=" + fmt(oracle) +
               " cemp=" + fmt(pa.c_emp);
    require(c, c.value <= 5e-3, "gauge ellipsoid volume off the closed form");
    require(c, pa.c_emp <= 1.05);
  });

  add_case(out, "graph.cla.quad", [&](CaseResult& c) {
    const auto& s = catalog_entry(cat, "quad-aniso");
    CounterRng rng{cfg.seed};
    double worst = 0;
    for (uint64_t i = 0; i < 256; ++i) {
      Vec3 x, y;
      for (int d = 0; d < 3; ++d) {
        x[d] = rng.uniform(i, d, -1, 1);
        y[d] = rng.uniform(i, 3 + d, -1, 1);
      }
      Jet3 j = s.jet(x);
      double ratio = cla_ratio(j, eval_rhs(s.rhs, j), y, s.jet(y).du);
      worst = std::max(worst, std::fabs(ratio - 1.0));
    }
    c.value = worst;
    c.tolerance = 1e-6;
    require(c, worst <= 1e-6, "quadratic gauge ratio not pinned at 1");
  });

  add_case(out, "graph.cla.cubic", [&](CaseResult& c) {
    // empirical constant of the gauge gradient bound on a non-quadratic
    const auto& s = catalog_entry(cat, "cubic-pert");
    Vec3 y0x{0, 0, 0};
    Vec3 du0 = s.jet(y0x).du;
    double worst = -1e300;
    for (const auto& x : box_lattice(-0.9, 0.9, 8)) {
      if (norm(x) < 1e-9) continue;
      Jet3 j = s.jet(x);
      RhsEval e = eval_rhs(s.rhs, j);
      double r = graph_radius(j, e, y0x, du0);
      worst = std::max(worst, (cla_ratio(j, e, y0x, du0) - 1.0) / r);
    }
    c.value = worst;
    c.tolerance = 10.0;
    require(c, worst <= 10.0, "gauge ratio excess grows too fast");
  });

  add_case(out, "graph.gauge.gradient", [&](CaseResult& c) {
    const auto& s = catalog_entry(cat, "trig-pert");
    Vec3 y0x{0.1, -0.05, 0.2};
    Vec3 du0 = s.jet(y0x).du;
    double worst = 0;
    double fd = 1e-5;
    for (const auto& x : {Vec3{0.4, 0.3, -0.2}, Vec3{-0.5, 0.1, 0.3},
                          Vec3{0.2, -0.6, 0.25}}) {
      Jet3 j = s.jet(x);
      GraphGauge g = graph_gauge(j, eval_rhs(s.rhs, j), y0x, du0);
      for (int d = 0; d < 3; ++d) {
        Vec3 xp = x, xm = x;
        xp[d] += fd;
        xm[d] -= fd;
        Jet3 jp = s.jet(xp), jm = s.jet(xm);
        double num = (graph_radius(jp, eval_rhs(s.rhs, jp), y0x, du0) -
                      graph_radius(jm, eval_rhs(s.rhs, jm), y0x, du0)) /
                     (2 * fd);
        worst = std::max(worst, std::fabs(num - g.grad[d]));
      }
    }
    c.value = worst;
    c.tolerance = 1e-6;
    require(c, worst <= 1e-6, "gauge gradient disagrees with differences");
  });

  add_case(out, "graph.lambda.chain", [&](CaseResult& c) {
    CounterRng rng{cfg.seed};
    double worst = 1e300, ident = 0;
    uint64_t accepted = 0;
    for (uint64_t i = 0; i < cfg.budget; ++i) {
      Vec3 l;
      if (!draw_cone_lambda(rng, i, l)) continue;
      ++accepted;
      double s = 1.0 + norm(l);
      double scale = s * s * s;
      LambdaChainReport r = lambda_chain(l);
      worst = std::min({worst, r.m_lower / scale, r.m_upper / scale,
                        r.m_neg / scale});
      ident = std::max(ident, std::fabs(r.identity) / scale);
    }
    c.value = worst;
    c.tolerance = 1e-11;
    c.detail = "identity_max=" + fmt(ident) +
               " accepted=" + std::to_string(accepted);
    require(c, worst >= -1e-11, "weight comparison margin went negative");
    require(c, ident <= 1e-12, "eigenvalue identity broken");
  });

  add_case(out, "graph.lambda.witness_lower", [&](CaseResult& c) {
    // the crude minorant f l1 + l2 l3^2 would need ratio_lower <= 1 here
    LambdaChainReport r = lambda_chain({0.3, 0.3, -0.1});
    c.value = r.ratio_lower;
    c.tolerance = 1e-12;
    c.detail = "m_lower=" + fmt(r.m_lower);
    require(c, std::fabs(r.ratio_lower - 1.25) <= 1e-12, "expected 5/4");
    require(c, r.ratio_lower > 1.0);
    require(c, std::fabs(r.m_lower - 0.012) <= 1e-15);
  });

  add_case(out, "graph.lambda.witness_upper", [&](CaseResult& c) {
    // the crude majorant 3N would need ratio_upper <= 3 here
    LambdaChainReport r = lambda_chain({0.8, 0.5, -0.3});
    c.value = r.ratio_upper;
    c.tolerance = 1e-12;
    c.detail = "m_upper=" + fmt(r.m_upper) + " m_neg=" + fmt(r.m_neg);
    require(c, std::fabs(r.ratio_upper - 40.0 / 13.0) <= 1e-12,
            "expected 40/13");
    require(c, r.ratio_upper > 3.0);
    require(c, std::fabs(r.m_upper - 1.0625) <= 1e-12);
    require(c, std::fabs(r.m_neg - 0.082) <= 1e-15);
  });

  add_case(out, "graph.boundary.guard", [&](CaseResult& c) {
    bool threw = false;
    try {
      ball_mass(uq, quad.rhs, y0, 4.0, {});
    } catch (const std::exception&) {
      threw = true;
    }
    c.value = threw ? 1 : 0;
    require(c, threw, "oversized ball must be rejected, not truncated");
  });

  return out;
}

// ----------------------------------------------------------------- estimates

std::vector<CaseResult> suite_estimates(const RunConfig& cfg) {
  std::vector<CaseResult> out;
  auto cat = standard_catalog();
  int n = cfg.grid;
  int center = (n - 1) / 2;

  const auto& quad = catalog_entry(cat, "quad-iso");
  GridField uq = sample_solution(quad, n);
  auto regions = nested_regions(uq);
  TestQuantityParams params = measure_params(uq, quad.rhs, regions);

  add_case(out, "estimates.params.quad", [&](CaseResult& c) {
    c.value = params.beta;
    c.tolerance = 1e-9;
    c.detail = "du_max=" + fmt(params.du_max) + " m1=" + fmt(params.m1) +
               " m5=" + fmt(params.m5);
    require(c, std::fabs(params.beta - 3603.0) <= 1e-9,
            "beta != 1200/c2 + 3 at c2 = 1/3");
    require(c, std::fabs(params.m1 - 3.0) <= 1e-12);
    require(c, std::fabs(params.m5 - 3.0) <= 1e-12);
  });

  add_case(out, "estimates.floor.bits", [&](CaseResult& c) {
    // below the floor the term must be the exact double log(log(floor))
    bool under = floor_term(5.0, 20.0) == std::log(std::log(20.0)) &&
                 floor_term(19.999999, 20.0) == std::log(std::log(20.0));
    bool over = floor_term(30.0, 20.0) == std::log(std::log(30.0));
    c.value = (under && over) ? 1 : 0;
    require(c, under, "floored branch not bit exact");
    require(c, over, "active branch not bit exact");
  });

  add_case(out, "estimates.P.max", [&](CaseResult& c) {
    FieldReport rep = eval_P(uq, quad.rhs, params, regions[4]);
    c.value = rep.max;
    c.detail = "argmax=(" + std::to_string(rep.argmax.i) + "," +
               std::to_string(rep.argmax.j) + "," +
               std::to_string(rep.argmax.k) + ") evaluated=" +
               std::to_string(rep.evaluated);
    require(c, std::isfinite(rep.max) && rep.evaluated > 0);
    require(c,
            rep.argmax.i == center && rep.argmax.j == center &&
                rep.argmax.k == center,
            "max of the test quantity not at the domain center");
  });

  add_case(out, "estimates.phi.max", [&](CaseResult& c) {
    FieldReport rep = eval_phi(uq, quad.rhs, params, regions[4]);
    c.value = rep.max;
    c.detail = "evaluated=" + std::to_string(rep.evaluated);
    require(c, std::isfinite(rep.max) && rep.evaluated > 0);
    require(c,
            rep.argmax.i == center && rep.argmax.j == center &&
                rep.argmax.k == center,
            "max of the gradient test quantity not at the domain center");
  });

  add_case(out, "estimates.doubling.quad", [&](CaseResult& c) {
    c.value = doubling_ratio(uq, regions[0], regions[4]);
    c.tolerance = 1e-12;
    require(c, std::fabs(c.value - 1.0) <= 1e-12,
            "doubling ratio of a constant Hessian must be exactly 1");
  });

  add_case(out, "estimates.v1.quad", [&](CaseResult& c) {
    V1Report rep = v1_check(uq, quad.rhs, regions[2], regions[4]);
    c.value = rep.skipped;
    c.detail = "checked=" + std::to_string(rep.checked) +
               " m5=" + fmt(rep.m5);
    require(c, rep.checked == 0 && rep.violations == 0,
            "weight below the floor must be skipped, not checked");
    require(c, rep.skipped > 0);
  });

  add_case(out, "estimates.v1.bigquad", [&](CaseResult& c) {
    // steep quadratic: the check runs, margins are recorded (the display
    // suppresses its constant, so the sign is reported, never asserted)
    ManufacturedSolution big = mms_quad(SymMat3::diag(6, 5, 4), {}, 0.0);
    GridField ub = sample_solution(big, n);
    auto rb = nested_regions(ub);
    V1Report rep = v1_check(ub, big.rhs, rb[2], rb[4]);
    c.value = rep.min_margin;
    c.tolerance = 1e-6;
    c.detail = "checked=" + std::to_string(rep.checked) +
               " violations=" + std::to_string(rep.violations) +
               " m5=" + fmt(rep.m5);
    require(c, rep.checked > 0 && rep.m5_eligible);
    require(c, std::fabs(rep.min_margin - (-927.1265174356938)) <= 1e-6,
            "constant-field margin moved");
  });

  return out;
}

// --------------------------------------------------------------------- audit

ChainAudit run_audit(const ManufacturedSolution& s, int n, NodeIndex* x0_out) {
  GridField u = sample_solution(s, n);
  auto regions = nested_regions(u);
  NodeIndex x0 = argmax_sigma1(u, regions[0]);
  if (x0_out) *x0_out = x0;
  return integral_chain_audit(u, s.rhs, x0);
}

// The audit needs five h-wide shells inside the stencil margin, so small
// grids are a domain error, not a failure; report those as skips.
struct AuditRun {
  ChainAudit a;
  NodeIndex x0{};
  std::string error;
  bool ok = false;
};

AuditRun try_audit(const ManufacturedSolution& s, int n) {
  AuditRun r;
  try {
    r.a = run_audit(s, n, &r.x0);
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

bool skip_if_failed(CaseResult& c, const AuditRun& r) {
  if (r.ok) return false;
  c.status = CaseStatus::Skip;
  c.detail = r.error;
  return true;
}

std::vector<CaseResult> suite_audit(const RunConfig& cfg) {
  std::vector<CaseResult> out;
  auto cat = standard_catalog();
  int n = cfg.grid;

  AuditRun q = try_audit(catalog_entry(cat, "quad-iso"), n);

  add_case(out, "audit.quad.meanvalue", [&](CaseResult& c) {
    if (skip_if_failed(c, q)) return;
    c.value = q.a.t_meanvalue;
    c.detail = "x0=(" + std::to_string(q.x0.i) + "," + std::to_string(q.x0.j) +
               "," + std::to_string(q.x0.k) + ") entropy=" + fmt(q.a.t_entropy) +
               " nodes=" + std::to_string(q.a.nodes);
    require(c, q.a.t_meanvalue > 0 && std::isfinite(q.a.t_meanvalue));
  });

  add_case(out, "audit.quad.trivial_chain", [&](CaseResult& c) {
    if (skip_if_failed(c, q)) return;
    c.value = std::max(q.a.t_gradb, q.a.t_energy);
    c.tolerance = 1e-10;
    require(c, q.a.t_gradb <= 1e-10 && q.a.t_energy <= 1e-10,
            "constant sigma1 must produce an identically flat chain");
  });

  add_case(out, "audit.quad.cmin", [&](CaseResult& c) {
    if (skip_if_failed(c, q)) return;
    c.value = q.a.c_min;
    c.tolerance = 1e-9;
    require(c, std::fabs(q.a.c_min - 6.0) <= 1e-9,
            "sigma1 sigma2^{ij} floor of the isotropic quadratic is 6");
  });

  add_case(out, "audit.cubic_pert.trivial", [&](CaseResult& c) {
    AuditRun a = try_audit(catalog_entry(cat, "cubic-pert"), n);
    if (skip_if_failed(c, a)) return;
    c.value = std::max(a.a.t_gradb, a.a.t_energy);
    c.tolerance = 1e-9;
    c.detail = "meanvalue=" + fmt(a.a.t_meanvalue) +
               " entropy=" + fmt(a.a.t_entropy);
    require(c, std::isfinite(a.a.t_meanvalue) && a.a.t_meanvalue > 0);
    // harmonic perturbation: the Laplacian stays constant, so the log
    // Laplacian chain is flat and the audit is structurally trivial
    require(c, c.value <= 1e-9);
  });

  auto audited = [&](const std::string& name, const std::string& prefix) {
    AuditRun r = try_audit(catalog_entry(cat, name), n);
    const ChainAudit& a = r.a;
    add_case(out, prefix + ".energy", [&](CaseResult& c) {
      if (skip_if_failed(c, r)) return;
      c.value = a.t_energy;
      c.detail = "gradb=" + fmt(a.t_gradb) + " entropy=" + fmt(a.t_entropy) +
                 " meanvalue=" + fmt(a.t_meanvalue) + " disc=" + fmt(a.disc) +
                 " cstar=" + fmt(a.c_star) + " m1=" + fmt(a.m1);
      require(c, a.t_energy > 0 && std::isfinite(a.t_energy),
              "expected a nontrivial energy term");
      require(c, a.t_gradb > 0, "expected a nontrivial gradient term");
    });
    add_case(out, prefix + ".absorption", [&](CaseResult& c) {
      if (skip_if_failed(c, r)) return;
      c.value = a.absorption_margin;
      c.detail = "implied=" + fmt(a.implied_bound) +
                 " energy=" + fmt(a.t_energy);
      require(c, a.absorption_margin >= -1e-12 * a.implied_bound,
              "energy exceeds the absorption bound");
    });
    add_case(out, prefix + ".holder", [&](CaseResult& c) {
      if (skip_if_failed(c, r)) return;
      c.value = a.holder_margin;
      c.detail = "c_a=" + fmt(a.c_a) + " c_b=" + fmt(a.c_b) +
                 " c_min=" + fmt(a.c_min);
      require(c, a.holder_margin >= -1e-12 * (1.0 + a.t_gradb * a.t_gradb),
              "Cauchy-Schwarz link margin went negative");
    });
  };
  audited("cubic-axis", "audit.cubic_axis");
  audited("trig-pert", "audit.trig");

  add_case(out, "audit.linear_invariance", [&](CaseResult& c) {
    // adding b.x + const leaves every chain integral untouched
    ManufacturedSolution shifted =
        mms_quad(SymMat3::identity(), {0.3, -0.2, 0.1}, 0.5);
    AuditRun a = try_audit(shifted, n);
    if (skip_if_failed(c, q) || skip_if_failed(c, a)) return;
    double de = std::fabs(a.a.t_energy - q.a.t_energy);
    double dg = std::fabs(a.a.t_gradb - q.a.t_gradb);
    double dm = std::fabs(a.a.t_meanvalue - q.a.t_meanvalue);
    c.value = std::max({de, dg, dm});
    c.tolerance = 1e-10;
    require(c, c.value <= 1e-10, "chain integrals saw the linear shift");
  });

  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "identities", "pointwise", "mms", "solve",
      "graph",      "estimates", "audit"};
  return names;
}

std::vector<CaseResult> run_suite(const std::string& name,
                                  const RunConfig& cfg) {
  if (name == "identities") return suite_identities(cfg);
  if (name == "pointwise") return suite_pointwise(cfg);
  if (name == "mms") return suite_mms(cfg);
  if (name == "solve") return suite_solve(cfg);
  if (name == "graph") return suite_graph(cfg);
  if (name == "estimates") return suite_estimates(cfg);
  if (name == "audit") return suite_audit(cfg);
  throw std::invalid_argument("unknown suite: " + name);
}

const std::map<std::string, double>& baseline_tolerances() {
  static const std::map<std::string, double> tols = {
      {"pointwise.claim1.inf", 1e-12}, {"pointwise.claim2.inf", 1e-12},
      {"pointwise.cone.c1", 1e-12},    {"pointwise.cone.c2", 1e-12},
      {"mms.fd.order", 1e-9},          {"mms.crequired.stability", 1e-9},
      {"solve.trig.order", 1e-6},
      {"graph.quad.ratio", 1e-9},      {"graph.quad.cemp", 1e-9},
      {"graph.quad.meanvalue", 1e-9},  {"graph.aniso.oracle", 1e-9},
      {"estimates.P.max", 1e-12},      {"estimates.phi.max", 1e-12},
      {"estimates.v1.bigquad", 1e-9},  {"audit.quad.meanvalue", 1e-12},
      {"audit.cubic_axis.energy", 1e-9}, {"audit.cubic_axis.holder", 1e-9},
      {"audit.trig.energy", 1e-9},     {"audit.trig.holder", 1e-9},
  };
  return tols;
}

}  // namespace s2l
