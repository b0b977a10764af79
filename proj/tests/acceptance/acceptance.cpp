// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "qhinf/analysis.hpp"
#include "qhinf/cavity.hpp"
#include "qhinf/errors.hpp"
#include "qhinf/qmodel.hpp"
#include "qhinf/realization.hpp"
#include "qhinf/riccati.hpp"
#include "qhinf/synthesis.hpp"

using namespace qhinf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

SynthesisConfig cavity_config(double g) {
  SynthesisConfig c;
  c.g = g;
  c.delta_grid = scalar_delta_grid(2);
  return c;
}

// 1
Outcome nominal_synthesis() {
  cavity::Parameters p;
  p.uncertain = false;
  const SynthesisReport r = synthesize(cavity::plant(p), cavity_config(0.35));
  const Matrix I = Matrix::Identity(2, 2);
  const double dev = std::max({max_abs(r.controller.A_K + 0.5 * I),
                               max_abs(r.controller.B_K + 2.2361 * I),
                               max_abs(r.controller.C_K + 0.7071 * I), max_abs(r.X.value),
                               max_abs(r.Y.value)});
  return {r.feasible && dev <= 1e-3, "max deviation " + fmt("%.2e", dev) + " (tol 1e-3)"};
}

// 2
Outcome realization_fixtures() {
  struct Fixture {
    double a, b, c, forced, xi, tol;
  };
  const Fixture fixtures[] = {{-0.5, -2.2361, -0.7071, 0.7071, -4.5, 1e-3},
                              {-34.9604, 13.5894, -0.7058, 0.7058, -115.2494, 0.01}};
  const auto J = canonical_theta(2);
  const Matrix I = Matrix::Identity(2, 2);
  bool pass = true;
  std::string detail;
  for (const auto& f : fixtures) {
    const Matrix xi = noise_channel_defect(f.a * I, f.b * I, f.c * I, J, J, J);
    const CoherentController k = complete_realization(f.a * I, f.b * I, f.c * I, J, J, J);
    const StateSpace ss = k.system();
    const auto res = oracle::realizability(ss.A, ss.B, ss.C, ss.D);
    const double forced_dev = max_abs(k.B_K1.leftCols(2) - f.forced * I);
    const double xi_dev = max_abs(xi - f.xi * oracle::theta(2));
    const double oracle_dev = std::abs(oracle::scalar_defect(f.a, f.b, f.c) - xi(0, 1));
    const double residual = std::max(res.commutation, res.output);
    pass = pass && forced_dev <= 1e-3 && xi_dev <= f.tol && oracle_dev <= 1e-9 && residual < 1e-8;
    detail += "Xi = " + fmt("%.4f", xi(0, 1)) + " J (expect " + fmt("%.4f", f.xi) +
              "), forced block dev " + fmt("%.1e", forced_dev) + ", residual " +
              fmt("%.1e", residual) + "; ";
  }
  return {pass, detail};
}

// 3
Outcome robust_synthesis() {
  const OpenPlant robust_plant = cavity::plant();
  cavity::Parameters np;
  np.uncertain = false;
  const SynthesisConfig config = cavity_config(0.35);
  const SynthesisReport robust = synthesize(robust_plant, config);
  const SynthesisReport nominal = synthesize(cavity::plant(np), config);

  std::vector<double> deltas;
  for (int i = 0; i <= 20; ++i) deltas.push_back(-1.0 + 0.1 * i);
  const SweepResult s = sweep(robust_plant, {robust.controller, nominal.controller}, deltas, 0.35);
  const SweepRow& lo = s.rows.front();
  const SweepRow& mid = s.rows[10];
  const SweepRow& hi = s.rows.back();
  const bool assumptions = robust.assumptions.all_ok() && robust.assumptions.rho_XY < 1.0;
  const bool bounded = s.max_robust() <= 0.35;
  const bool small_delta = *mid.norm_reference < mid.norm_robust;
  const bool large_delta = *lo.norm_reference > lo.norm_robust && *hi.norm_reference > hi.norm_robust;
  std::printf("      info: eps %.6g, X = %.6g I, Y = %.6g I (reference X = %.4f I, Y = %.4f I)\n",
              robust.eps_used, robust.X.value(0, 0), robust.Y.value(0, 0),
              cavity::kReferenceRobustX, cavity::kReferenceRobustY);
  return {robust.feasible && assumptions && bounded && small_delta && large_delta,
          "eps " + fmt("%.4g", robust.eps_used) + ", rho(XY) " +
              fmt("%.3g", robust.assumptions.rho_XY) + ", max norm " +
              fmt("%.6f", s.max_robust()) + " (<= 0.35), delta 0: nominal " +
              fmt("%.2e", *mid.norm_reference) + " < robust " + fmt("%.4f", mid.norm_robust) +
              ", |delta| 1: nominal " + fmt("%.4f", *hi.norm_reference) + " > robust " +
              fmt("%.4f", hi.norm_robust)};
}

// 4
Outcome slh_property() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  bool agree = true;
  for (int trial = 0; trial < 200; ++trial) {
    const int half_n = oracle::uniform_int(rng, 1, 4);
    const int channels = oracle::uniform_int(rng, 1, 4);
    const int ny = 2 * oracle::uniform_int(rng, 1, channels);
    SLHModel m;
    const Matrix r = oracle::randn(rng, 2 * half_n, 2 * half_n);
    m.R = 0.5 * (r + r.transpose());
    m.Lambda = oracle::randn(rng, channels, 2 * half_n).cast<Complex>() +
               Complex(0.0, 1.0) * oracle::randn(rng, channels, 2 * half_n).cast<Complex>();
    m.n_y = ny;
    const auto theta = canonical_theta(2 * half_n);
    const StateSpace ss = slh_to_state_space(m, theta);
    const auto res = oracle::realizability(ss.A, ss.B, ss.C, ss.D);
    worst = std::max({worst, res.commutation, res.output});
    agree = agree && is_physically_realizable(ss, theta).realizable;
  }
  return {worst < 1e-10 && agree, "worst residual " + fmt("%.2e", worst) + " (tol 1e-10)"};
}

// 5
Outcome care_oracle() {
  const double g = 0.35;
  const OpenPlant plant = cavity::plant();
  const oracle::CavityScalars s;
  const Matrix I = Matrix::Identity(2, 2);
  bool pass = true;
  std::string detail;
  for (double eps : {0.1, 1.0, 10.0, 25.14, 100.0}) {
    detail += "eps " + fmt("%g", eps) + ":";
    const auto check = [&](const char* name, std::optional<double> root, double sign,
                           const std::function<CareSolution()>& solve) {
      try {
        const CareSolution sol = solve();
        if (!root) {
          pass = false;
          detail += std::string(" ") + name + " solved but oracle has no real root;";
          return;
        }
        const double dev = max_abs(sol.value - *root * I);
        const bool lib_stable = sol.stabilizing();
        pass = pass && dev <= 1e-10 && lib_stable && sign < 0.0;
        detail += std::string(" ") + name + " " + fmt("%.6g", *root) + " dev " + fmt("%.1e", dev) + ";";
      } catch (const NoStabilizingSolution&) {
        if (root) pass = false;
        detail += std::string(" ") + name + (root ? " MISSED;" : " none (agrees);");
      } catch (const SubspaceSingular&) {
        if (root) pass = false;
        detail += std::string(" ") + name + (root ? " MISSED;" : " none (agrees);");
      }
    };
    const auto x = oracle::cavity_x(s, g, eps);
    const auto y = oracle::cavity_y(s, g, eps);
    check("X", x, x ? oracle::cavity_x_closed_loop(s, g, eps, *x) : 0.0,
          [&] { return riccati_X(plant, g, eps); });
    check("Y", y, y ? oracle::cavity_y_closed_loop(s, g, eps, *y) : 0.0,
          [&] { return riccati_Y(plant, g, eps); });
    detail += " ";
  }
  return {pass, detail};
}

// 6
Outcome hinf_oracle() {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = oracle::uniform_int(rng, 2, 8);
    const int m = oracle::uniform_int(rng, 1, 3);
    const int p = oracle::uniform_int(rng, 1, 3);
    const Matrix a = oracle::random_stable(rng, n);
    const Matrix b = oracle::randn(rng, n, m);
    const Matrix c = oracle::randn(rng, p, n);
    const Matrix d = trial % 2 ? oracle::randn(rng, p, m, 0.5) : Matrix::Zero(p, m);
    const double exact = hinf_norm(a, b, c, d);
    const double grid = oracle::grid_hinf(a, b, c, d);
    worst = std::max(worst, std::abs(exact - grid) / grid);
  }
  return {worst < 1e-4, "worst relative difference " + fmt("%.2e", worst) + " (tol 1e-4)"};
}

// 7
Outcome lemma_witness() {
  std::mt19937_64 rng(7);
  double worst = -std::numeric_limits<double>::infinity();
  int sbr_failures = 0;
  double scaling_dev = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int np = 2 * oracle::uniform_int(rng, 1, 2);
    const int nk = 2 * oracle::uniform_int(rng, 0, 1);
    const int n = np + nk;
    const int m = oracle::uniform_int(rng, 1, 2);
    const int nw = oracle::uniform_int(rng, 1, 3);
    const int nz = oracle::uniform_int(rng, 1, 3);
    const double g = std::exp(oracle::uniform(rng, std::log(0.5), std::log(2.0)));
    const double eps = std::exp(oracle::uniform(rng, std::log(0.1), std::log(10.0)));

    ClosedLoopSystem cl;
    cl.n_plant = np;
    cl.A_tilde = oracle::random_stable(rng, n);
    cl.B_tilde = oracle::randn(rng, n, nw);
    cl.C_tilde = oracle::randn(rng, nz, n);
    cl.Theta_tilde = Matrix::Zero(n, n);
    cl.Theta_tilde.topLeftCorner(np, np) = oracle::theta(np);
    cl.E_tilde = Matrix::Zero(m, n);
    cl.E_tilde.leftCols(np) = oracle::randn(rng, m, np);

    const auto scaled_of = [&](const ClosedLoopSystem& c) {
      Matrix b(n, m + nw), cc(m + nz, n);
      b << 2.0 * std::sqrt(eps) * c.Theta_tilde * c.E_tilde.transpose(), c.B_tilde / g;
      cc << c.E_tilde / std::sqrt(eps), c.C_tilde;
      return std::pair{b, cc};
    };
    auto [b0, c0] = scaled_of(cl);
    const double h = hinf_norm(cl.A_tilde, b0, c0);
    const double s = std::sqrt(0.8 / h);
    cl.B_tilde *= s;
    cl.C_tilde *= s;
    cl.E_tilde *= s;
    const auto [bs, cs] = scaled_of(cl);

    const ScaledClosedLoop lib = scaled_closed_loop(cl, g, eps);
    scaling_dev = std::max({scaling_dev, max_abs(lib.B - bs), max_abs(lib.C - cs)});
    const SbrResult sbr = sbr_check(cl.A_tilde, bs, cs, 1.0);
    if (!sbr.verdict || !sbr.witness) {
      ++sbr_failures;
      continue;
    }
    const Matrix& x = *sbr.witness;
    for (int k = 0; k < 11; ++k) {
      Matrix delta;
      if (k < 3) {
        delta = (k - 1.0) * Matrix::Identity(m, m);
      } else {
        const Matrix q = oracle::randn(rng, m, m).householderQr().householderQ();
        Eigen::VectorXd d(m);
        for (int i = 0; i < m; ++i) d(i) = oracle::uniform(rng, -1.0, 1.0);
        delta = q * d.asDiagonal() * q.transpose();
      }
      const Matrix a = cl.A_tilde + 2.0 * cl.Theta_tilde * cl.E_tilde.transpose() * delta * cl.E_tilde;
      const Matrix lhs = a.transpose() * x + x * a +
                         x * cl.B_tilde * cl.B_tilde.transpose() * x / (g * g) +
                         cl.C_tilde.transpose() * cl.C_tilde;
      worst = std::max(worst, oracle::max_eig(lhs));
    }
  }
  return {sbr_failures == 0 && worst < 0.0 && scaling_dev < 1e-12,
          "max eigenvalue over 550 samples " + fmt("%.3e", worst) + " (< 0), SBR failures " +
              std::to_string(sbr_failures)};
}

// 8
Outcome interconnection_oracle() {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  const auto even = [&](int lo, int hi) { return 2 * oracle::uniform_int(rng, lo, hi); };
  for (int trial = 0; trial < 20; ++trial) {
    const int n = even(1, 2), nv = even(1, 2), nw = even(1, 2), nu = even(1, 2), nz = even(1, 2),
              ny = even(1, 2), nk = even(1, 2), nvk = even(1, 2);
    OpenPlant p;
    p.A = oracle::randn(rng, n, n);
    p.B0 = oracle::randn(rng, n, nv);
    p.B1 = oracle::randn(rng, n, nw);
    p.B2 = oracle::randn(rng, n, nu);
    p.C1 = oracle::randn(rng, nz, n);
    p.D12 = oracle::randn(rng, nz, nu);
    p.C2 = oracle::randn(rng, ny, n);
    p.D20 = oracle::randn(rng, ny, nv);
    p.D21 = oracle::randn(rng, ny, nw);
    p.theta = canonical_theta(n);
    p.uncertainty.E = oracle::randn(rng, 2, n);
    CoherentController k;
    k.A_K = oracle::randn(rng, nk, nk);
    k.B_K1 = oracle::randn(rng, nk, nvk);
    k.B_K = oracle::randn(rng, nk, ny);
    k.C_K = oracle::randn(rng, nu, nk);
    k.B_K0 = oracle::randn(rng, nu, nvk);
    k.theta_K = canonical_theta(nk);
    const ClosedLoopSystem cl = close_loop(p, k);

    for (int f = 0; f < 10; ++f) {
      const Complex s(0.0, std::exp(oracle::uniform(rng, std::log(1e-2), std::log(1e2))));
      const auto tf = [&](const Matrix& c, const Matrix& b, const Matrix& d) {
        return oracle::transfer(p.A, b, c, d, s);
      };
      const oracle::CMatrix pzv = tf(p.C1, p.B0, Matrix::Zero(nz, nv));
      const oracle::CMatrix pzw = tf(p.C1, p.B1, Matrix::Zero(nz, nw));
      const oracle::CMatrix pzu = tf(p.C1, p.B2, p.D12);
      const oracle::CMatrix pyv = tf(p.C2, p.B0, p.D20);
      const oracle::CMatrix pyw = tf(p.C2, p.B1, p.D21);
      const oracle::CMatrix pyu = tf(p.C2, p.B2, Matrix::Zero(ny, nu));
      const oracle::CMatrix ky = oracle::transfer(k.A_K, k.B_K, k.C_K, Matrix::Zero(nu, ny), s);
      const oracle::CMatrix kv = oracle::transfer(k.A_K, k.B_K1, k.C_K, k.B_K0, s);
      const oracle::CMatrix loop =
          (oracle::CMatrix::Identity(nu, nu) - ky * pyu).fullPivLu().inverse();
      const oracle::CMatrix t_w = pzw + pzu * loop * ky * pyw;
      oracle::CMatrix t_noise(nz, nv + nvk);
      t_noise << pzv + pzu * loop * ky * pyv, pzu * loop * kv;

      const oracle::CMatrix lib_w =
          oracle::transfer(cl.A_tilde, cl.B_tilde, cl.C_tilde, Matrix::Zero(nz, nw), s);
      const oracle::CMatrix lib_noise =
          oracle::transfer(cl.A_tilde, cl.G_tilde, cl.C_tilde, cl.H_tilde, s);
      worst = std::max(worst, (lib_w - t_w).norm() / t_w.norm());
      worst = std::max(worst, (lib_noise - t_noise).norm() / t_noise.norm());
    }
  }
  return {worst < 1e-9, "worst relative error " + fmt("%.2e", worst) + " (tol 1e-9)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "uncertainty-free cavity design", 1.0, nominal_synthesis},
      {2, "realization completion fixtures", 1.0, realization_fixtures},
      {3, "robust cavity design and delta sweep", 30.0, robust_synthesis},
      {4, "SLH models are physically realizable", 5.0, slh_property},
      {5, "Riccati solver vs scalar quadratic roots", 1.0, care_oracle},
      {6, "H-infinity norm vs frequency grid", 10.0, hinf_oracle},
      {7, "scaled-system witness certifies every Delta", 10.0, lemma_witness},
      {8, "closed-loop interconnection vs elimination", 2.0, interconnection_oracle},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s  criterion %d: %s | %s | %.3f s (limit %g s)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name, o.detail.c_str(), secs, c.limit_s, in_time ? "" : " TOO SLOW");
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
