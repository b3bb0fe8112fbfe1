#include "qrg/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

namespace qrg {

const char* to_string(LmiStatus s) {
  switch (s) {
    case LmiStatus::optimal: return "optimal";
    case LmiStatus::infeasible: return "infeasible";
    case LmiStatus::unbounded: return "unbounded";
    case LmiStatus::stalled: return "stalled";
  }
  return "stalled";
}

namespace {

// Primal-dual path following with Nesterov–Todd scaling. The primal slack
// X_b = S_b(z) is positive by construction of the steps; the dual iterate Y_b
// is independent and driven onto the affine set Σ_b⟨coeffs_i, Y_b⟩ = cost_i,
// so its feasibility residual decays geometrically with the step length.
//
// The core is generic over the real scalar so that stalled small instances
// can be rerun in extended precision: near weakly complementary optima the
// attainable complementarity is limited by rounding in the scaling and Schur
// stages, and a wider mantissa pushes that floor well below every tolerance
// used by this project.
template <typename Real>
struct CoreTypes {
  using Scalar = std::complex<Real>;
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using V = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  using MR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
};

template <typename Real>
struct CoreProblem {
  typename CoreTypes<Real>::V cost;
  std::vector<typename CoreTypes<Real>::M> f0;
  std::vector<std::vector<typename CoreTypes<Real>::M>> coeffs;
};

template <typename Real>
struct CoreBlock {
  typename CoreTypes<Real>::M x, y;
  Eigen::LLT<typename CoreTypes<Real>::M> xllt;
  bool diagonal_coeffs = false;
  typename CoreTypes<Real>::MR diag;
};

template <typename Real>
typename CoreTypes<Real>::M herm(const typename CoreTypes<Real>::M& m) {
  return typename CoreTypes<Real>::M(Real(0.5) * (m + m.adjoint()));
}

template <typename Real>
bool chol_pd_t(const typename CoreTypes<Real>::M& m,
               Eigen::LLT<typename CoreTypes<Real>::M>& llt) {
  llt.compute(m);
  if (llt.info() != Eigen::Success) return false;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    if (!(l(i, i).real() > Real(0)) ||
        !std::isfinite(static_cast<double>(l(i, i).real())))
      return false;
  return true;
}

template <typename Real>
typename CoreTypes<Real>::M assemble_t(const CoreProblem<Real>& p, size_t b,
                                       const typename CoreTypes<Real>::V& z) {
  typename CoreTypes<Real>::M s = p.f0[b];
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z[i] != Real(0)) s.noalias() += z[i] * p.coeffs[b][i];
  return herm<Real>(s);
}

template <typename Real>
bool refactor_primal_t(const CoreProblem<Real>& p, const typename CoreTypes<Real>::V& z,
                       std::vector<CoreBlock<Real>>& work) {
  for (size_t b = 0; b < p.f0.size(); ++b) {
    work[b].x = assemble_t(p, b, z);
    if (!chol_pd_t<Real>(work[b].x, work[b].xllt)) return false;
  }
  return true;
}

template <typename Real>
Real min_eig_t(const typename CoreTypes<Real>::M& m) {
  Eigen::SelfAdjointEigenSolver<typename CoreTypes<Real>::M> es(herm<Real>(m));
  return es.eigenvalues().minCoeff();
}

/// Largest α with M + α·dM ≻ 0, from λ_min(L⁻¹ dM L⁻ᴴ).
template <typename Real>
Real max_step_t(const Eigen::LLT<typename CoreTypes<Real>::M>& llt,
                const typename CoreTypes<Real>::M& dm) {
  using M = typename CoreTypes<Real>::M;
  const M& l = llt.matrixLLT();
  M w = l.template triangularView<Eigen::Lower>().solve(dm);
  w = l.template triangularView<Eigen::Lower>().solve(M(w.adjoint()));
  const Real lmin = min_eig_t<Real>(M(w.adjoint()));
  if (lmin >= Real(0)) return Real(1e30);
  return Real(1) / (-lmin);
}

struct CoreResult {
  bool converged = false;
  int iters = 0;
  std::string note;
};

template <typename Real>
CoreResult pd_core(const CoreProblem<Real>& p, typename CoreTypes<Real>::V& z,
                   std::vector<CoreBlock<Real>>& work, double gap_tol, double feas_tol,
                   int max_iter, double objective_floor,
                   const std::function<bool(const typename CoreTypes<Real>::V&)>& early_stop) {
  using M = typename CoreTypes<Real>::M;
  using V = typename CoreTypes<Real>::V;
  using MR = typename CoreTypes<Real>::MR;

  const int m = static_cast<int>(p.cost.size());
  const size_t nb = p.f0.size();
  Real n_tot = Real(0);
  for (const auto& f : p.f0) n_tot += Real(f.rows());
  Real cost_scale = Real(1);
  for (int i = 0; i < m; ++i)
    cost_scale = std::max(cost_scale, Real(std::abs(static_cast<double>(p.cost[i]))));
  static const bool trace = std::getenv("QRG_LMI_TRACE") != nullptr;

  CoreResult res;
  std::vector<Real> comp_history;
  for (int iter = 0; iter < max_iter; ++iter) {
    res.iters = iter;
    Real comp = Real(0);
    V resid = p.cost;
    for (auto& w : work) comp += (w.x * w.y).trace().real();
    comp_history.push_back(comp);
    if (iter >= 60 && comp > Real(0.8) * comp_history[iter - 60]) {
      res.note = "complementarity plateau";
      return res;
    }
    for (size_t b = 0; b < nb; ++b)
      for (int i = 0; i < m; ++i)
        resid[i] -= (work[b].y * p.coeffs[b][i]).trace().real();
    Real rmax = Real(0);
    for (int i = 0; i < m; ++i)
      rmax = std::max(rmax, Real(std::abs(static_cast<double>(resid[i]))));

    if (static_cast<double>(comp) <= 0.9 * gap_tol &&
        static_cast<double>(rmax) <= feas_tol * static_cast<double>(cost_scale)) {
      res.converged = true;
      return res;
    }
    if (static_cast<double>(p.cost.dot(z)) <
        objective_floor * static_cast<double>(cost_scale)) {
      res.note = "unbounded";
      return res;
    }

    // Nesterov–Todd scaling per block: G with G X G = Y, computed as
    // G = L^{−†}(L†YL)^{1/2}L^{−1} for X = LL†. The directions keep the
    // computed G·X·G and G·Y⁻¹·G instead of substituting their exact-algebra
    // values Y and X⁻¹, so the linear system below stays self-consistent to
    // working precision.
    MR bmat = MR::Zero(m, m);
    V qt = V::Zero(m), wv = V::Zero(m), tv = V::Zero(m);
    std::vector<M> gyg(nb), gxg(nb), gscale(nb);
    std::vector<Eigen::LLT<M>> yllt(nb);
    for (size_t b = 0; b < nb; ++b) {
      auto& w = work[b];
      const int n = static_cast<int>(p.f0[b].rows());
      // Floor the dual metric so a single noise-depth eigendirection cannot
      // freeze the whole dual update.
      {
        const Real floor = Real(1e-12) * std::max(Real(1), Real(w.y.trace().real()));
        M yf = w.y + floor * M::Identity(n, n);
        if (!chol_pd_t<Real>(yf, yllt[b])) {
          res.note = "dual iterate lost positive definiteness";
          return res;
        }
      }
      {
        const M l = w.xllt.matrixL();
        Eigen::SelfAdjointEigenSolver<M> es(herm<Real>(M(l.adjoint() * w.y * l)));
        if (es.info() != Eigen::Success) {
          res.note = "scaling eigendecomposition failed";
          return res;
        }
        M c = M::Zero(n, n);
        for (int k = 0; k < n; ++k) {
          const Real lam = std::max(es.eigenvalues()[k], Real(1e-300));
          c += std::sqrt(lam) * es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
        }
        const M u = l.adjoint().template triangularView<Eigen::Upper>().solve(c);
        const M v = l.adjoint().template triangularView<Eigen::Upper>().solve(M(u.adjoint()));
        gscale[b] = herm<Real>(M(v.adjoint()));
      }
      gxg[b] = herm<Real>(M(gscale[b] * w.x * gscale[b]));
      gyg[b] = herm<Real>(M(gscale[b] * yllt[b].solve(gscale[b])));

      if (w.diagonal_coeffs) {
        for (int i = 0; i < m; ++i) {
          Real a = Real(0), bb = Real(0), cc = Real(0);
          for (int k = 0; k < n; ++k) {
            a += w.diag(k, i) * gyg[b](k, k).real();
            bb += w.diag(k, i) * gxg[b](k, k).real();
            cc += w.diag(k, i) * w.y(k, k).real();
          }
          qt[i] += a;
          wv[i] += bb;
          tv[i] += cc;
        }
        MR c(n, n);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) c(k, l) = std::norm(gscale[b](k, l));
        bmat.noalias() += w.diag.transpose() * c * w.diag;
      } else {
        std::vector<M> nj(m);
        for (int j = 0; j < m; ++j) {
          qt[j] += (p.coeffs[b][j].cwiseProduct(gyg[b].transpose())).sum().real();
          wv[j] += (p.coeffs[b][j].cwiseProduct(gxg[b].transpose())).sum().real();
          tv[j] += (p.coeffs[b][j].cwiseProduct(w.y.transpose())).sum().real();
          nj[j] = gscale[b] * p.coeffs[b][j] * gscale[b];
        }
        for (int i = 0; i < m; ++i)
          for (int j = i; j < m; ++j) {
            const Real v = (p.coeffs[b][i].cwiseProduct(nj[j].transpose())).sum().real();
            bmat(i, j) += v;
            if (j != i) bmat(j, i) += v;
          }
      }
    }

    Eigen::LDLT<MR> ldlt(bmat);
    const auto schur_solve = [&](const V& rhs) -> V {
      V dz = ldlt.solve(rhs);
      if (!dz.allFinite() || ldlt.info() != Eigen::Success) {
        MR reg = bmat;
        Real top = Real(1);
        for (int i = 0; i < m; ++i)
          top = std::max(top, Real(std::abs(static_cast<double>(bmat(i, i)))));
        reg.diagonal().array() += Real(1e-12) * top;
        dz = Eigen::LDLT<MR>(reg).solve(rhs);
        return dz;
      }
      const V resid2 = rhs - bmat * dz;
      const V corr = ldlt.solve(resid2);
      if (corr.allFinite()) dz += corr;
      return dz;
    };
    const auto directions = [&](const V& dz, Real mu, std::vector<M>& dxs,
                                std::vector<M>& dys, Real& alpha_p, Real& alpha_d) {
      alpha_p = Real(1e30);
      alpha_d = Real(1e30);
      for (size_t b = 0; b < nb; ++b) {
        auto& w = work[b];
        const int n = static_cast<int>(p.f0[b].rows());
        M dx = M::Zero(n, n);
        for (int j = 0; j < m; ++j)
          if (dz[j] != Real(0)) dx.noalias() += dz[j] * p.coeffs[b][j];
        M dy = mu * gyg[b] - gxg[b] - herm<Real>(M(gscale[b] * dx * gscale[b]));
        alpha_p = std::min(alpha_p, max_step_t<Real>(w.xllt, dx));
        alpha_d = std::min(alpha_d, max_step_t<Real>(yllt[b], dy));
        dxs[b] = std::move(dx);
        dys[b] = std::move(dy);
      }
    };

    // Predictor probe fixes a centering weight; a short search over heavier
    // weights keeps blocked iterates moving. A best-progress candidate is
    // taken only when its step is free; otherwise the widest step wins, since
    // greedy blocked steps pin the iterate against the boundary.
    std::vector<M> dxa(nb), dya(nb);
    Real apa = Real(0), ada = Real(0);
    const V base_rhs = tv - wv - p.cost;
    V dz_aff = schur_solve(base_rhs);
    if (!dz_aff.allFinite()) {
      res.note = "singular Schur system";
      return res;
    }
    directions(dz_aff, Real(0), dxa, dya, apa, ada);
    const Real step_a = std::min({Real(1), Real(0.98) * apa, Real(0.98) * ada});
    Real comp_aff = Real(0);
    for (size_t b = 0; b < nb; ++b)
      comp_aff +=
          ((work[b].x + step_a * dxa[b]) * (work[b].y + step_a * dya[b])).trace().real();
    comp_aff = std::max(comp_aff, Real(0));
    Real sigma_m = comp_aff / comp;
    sigma_m = sigma_m * sigma_m * sigma_m;
    sigma_m = std::min(std::max(sigma_m, Real(1e-4)), Real(0.8));

    Real mu = Real(0), ap = Real(0), ad = Real(0);
    std::vector<M> dxs(nb), dys(nb);
    V dz;
    bool have = false;
    Real best_next = Real(1e300), widest_step = Real(-1);
    const Real extra_sigmas[] = {Real(0.3), Real(0.6), Real(0.9), Real(0.99)};
    size_t probe = 0;
    Real sig = sigma_m;
    for (;;) {
      const Real mu_c = sig * comp / n_tot;
      V dz_c = schur_solve(mu_c * qt + base_rhs);
      if (dz_c.allFinite()) {
        std::vector<M> dxc(nb), dyc(nb);
        Real apc = Real(0), adc = Real(0);
        directions(dz_c, mu_c, dxc, dyc, apc, adc);
        const Real sp = std::min(Real(1), Real(0.98) * apc);
        const Real sd = std::min(Real(1), Real(0.98) * adc);
        Real next = Real(0);
        for (size_t b = 0; b < nb; ++b)
          next += ((work[b].x + sp * dxc[b]) * (work[b].y + sd * dyc[b])).trace().real();
        const Real step_c = std::min(sp, sd);
        const bool held_free = have && widest_step >= Real(0.1);
        const bool cand_free = step_c >= Real(0.1);
        bool take = !have;
        if (have) {
          if (cand_free && !held_free)
            take = true;
          else if (cand_free == held_free)
            take = cand_free ? (next < best_next) : (step_c > widest_step);
        }
        if (take) {
          have = true;
          best_next = next;
          widest_step = step_c;
          mu = mu_c;
          dz = dz_c;
          dxs = std::move(dxc);
          dys = std::move(dyc);
          ap = sp;
          ad = sd;
        }
      }
      if ((have && best_next < Real(0.8) * comp && widest_step >= Real(0.1)) ||
          probe >= std::size(extra_sigmas))
        break;
      sig = extra_sigmas[probe++];
    }
    if (!have) {
      res.note = "singular Schur system";
      return res;
    }

    // Take the step; retreat if rounding pushed a factorization over the edge.
    V z_new = z + ap * dz;
    std::vector<CoreBlock<Real>> trial = work;
    bool ok = refactor_primal_t(p, z_new, trial);
    for (int shrink = 0; !ok && shrink < 40; ++shrink) {
      ap *= Real(0.7);
      z_new = z + ap * dz;
      ok = refactor_primal_t(p, z_new, trial);
    }
    if (!ok) {
      res.note = "primal line search failed";
      return res;
    }
    for (size_t b = 0; b < nb; ++b) {
      trial[b].y = herm<Real>(M(work[b].y + ad * dys[b]));
      // Clip boundary grazes; the feasibility bump decays over the next
      // iterations.
      const Real graze = min_eig_t<Real>(trial[b].y);
      if (graze <= Real(0)) {
        const Real lift =
            -graze + Real(1e-13) * std::max(Real(1), Real(trial[b].y.trace().real()));
        trial[b].y += lift * M::Identity(trial[b].y.rows(), trial[b].y.cols());
      }
    }
    z = z_new;
    work = std::move(trial);

    if (trace)
      std::fprintf(stderr, "lmi iter %3d comp %.3e rmax %.3e mu %.3e ap %.3f ad %.3f\n",
                   iter, static_cast<double>(comp), static_cast<double>(rmax),
                   static_cast<double>(mu), static_cast<double>(ap),
                   static_cast<double>(ad));

    if (early_stop && early_stop(z)) {
      res.converged = true;
      res.note = "early stop";
      return res;
    }
  }
  res.note = "iteration limit";
  return res;
}

template <typename Real>
CoreProblem<Real> cast_problem(const LmiProblem& p) {
  CoreProblem<Real> cp;
  cp.cost = p.cost.template cast<Real>();
  cp.f0.reserve(p.blocks.size());
  cp.coeffs.resize(p.blocks.size());
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    cp.f0.push_back(p.blocks[b].f0.template cast<std::complex<Real>>());
    cp.coeffs[b].reserve(p.blocks[b].coeffs.size());
    for (const auto& f : p.blocks[b].coeffs)
      cp.coeffs[b].push_back(f.template cast<std::complex<Real>>());
  }
  return cp;
}

template <typename Real>
void detect_diagonal_t(const CoreProblem<Real>& p, std::vector<CoreBlock<Real>>& work) {
  const int m = static_cast<int>(p.cost.size());
  for (size_t b = 0; b < p.f0.size(); ++b) {
    const int n = static_cast<int>(p.f0[b].rows());
    bool diag = m > 0;
    for (const auto& f : p.coeffs[b]) {
      for (int r = 0; r < n && diag; ++r)
        for (int c = 0; c < n; ++c) {
          if (r == c) {
            if (f(r, c).imag() != Real(0)) {
              diag = false;
              break;
            }
          } else if (f(r, c) != std::complex<Real>(0, 0)) {
            diag = false;
            break;
          }
        }
      if (!diag) break;
    }
    work[b].diagonal_coeffs = diag;
    if (diag) {
      work[b].diag.resize(n, m);
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < n; ++k) work[b].diag(k, i) = p.coeffs[b][i](k, k).real();
    }
  }
}

/// Runs the core at the requested precision and reads out a double solution.
template <typename Real>
std::pair<CoreResult, LmiSolution> run_core(
    const LmiProblem& problem, const RVec& start, const LmiOptions& options,
    const std::function<bool(const RVec&)>& early_stop) {
  using V = typename CoreTypes<Real>::V;
  using M = typename CoreTypes<Real>::M;
  const CoreProblem<Real> cp = cast_problem<Real>(problem);
  const int m = static_cast<int>(problem.cost.size());

  std::vector<CoreBlock<Real>> work(problem.blocks.size());
  detect_diagonal_t(cp, work);
  V z = start.template cast<Real>();
  if (!refactor_primal_t(cp, z, work))
    throw PreconditionError("lmi_solve: starting point is not strictly feasible");
  Real cost_scale = Real(1);
  for (int i = 0; i < m; ++i)
    cost_scale = std::max(cost_scale, Real(std::abs(static_cast<double>(problem.cost[i]))));
  for (size_t b = 0; b < problem.blocks.size(); ++b)
    work[b].y =
        cost_scale * M::Identity(problem.blocks[b].f0.rows(), problem.blocks[b].f0.cols());

  std::function<bool(const V&)> stop;
  if (early_stop)
    stop = [&](const V& v) { return early_stop(v.template cast<double>()); };

  CoreResult core = pd_core<Real>(cp, z, work, options.gap_tol, options.feas_tol,
                                  options.max_newton, options.objective_floor, stop);

  LmiSolution sol;
  sol.z = z.template cast<double>();
  sol.newton_iterations = core.iters;
  sol.primal_objective = m > 0 ? problem.cost.dot(sol.z) : 0.0;
  RVec resid = problem.cost;
  double dual_obj = 0.0;
  bool first = true;
  for (size_t b = 0; b < problem.blocks.size(); ++b) {
    Mat yb = hermitize(work[b].y.template cast<Cplx>());
    dual_obj -= (yb * problem.blocks[b].f0).trace().real();
    for (int i = 0; i < m; ++i) resid[i] -= (yb * problem.blocks[b].coeffs[i]).trace().real();
    Mat slack = problem.blocks[b].f0;
    for (int i = 0; i < m; ++i)
      if (sol.z[i] != 0.0) slack.noalias() += sol.z[i] * problem.blocks[b].coeffs[i];
    const double sx = min_eigenvalue(hermitize(slack));
    sol.min_slack_eig = first ? sx : std::min(sol.min_slack_eig, sx);
    first = false;
    sol.multipliers.push_back(std::move(yb));
  }
  sol.dual_objective = dual_obj;
  sol.gap = sol.primal_objective - sol.dual_objective;
  sol.dual_residual = (m > 0) ? resid.cwiseAbs().maxCoeff() : 0.0;
  return {core, sol};
}

RVec phase_one(const LmiProblem& p, const LmiOptions& options, std::string& note);

}  // namespace

LmiSolution lmi_solve(const LmiProblem& problem, const LmiOptions& options) {
  const int m = static_cast<int>(problem.cost.size());
  long long n_tot = 0;
  for (const auto& b : problem.blocks) {
    if (static_cast<int>(b.coeffs.size()) != m)
      throw ArgumentError("lmi_solve: block coefficient count != variable count");
    if (b.f0.rows() != b.f0.cols()) throw ArgumentError("lmi_solve: block not square");
    for (const auto& f : b.coeffs)
      if (f.rows() != b.f0.rows() || f.cols() != b.f0.cols())
        throw ArgumentError("lmi_solve: coefficient dim mismatch within a block");
    n_tot += b.f0.rows();
  }

  LmiSolution sol;
  if (problem.blocks.empty() || n_tot == 0) {
    sol.z = RVec::Zero(m);
    if (m > 0 && problem.cost.cwiseAbs().maxCoeff() > 0.0) {
      sol.status = LmiStatus::unbounded;
      sol.note = "no constraints and a nonzero objective";
    } else {
      sol.status = LmiStatus::optimal;
    }
    return sol;
  }

  RVec z0;
  if (options.start) {
    z0 = *options.start;
    if (z0.size() != m) throw ArgumentError("lmi_solve: start has wrong length");
  } else if (m == 0) {
    z0 = RVec::Zero(0);
  } else {
    std::string note;
    z0 = phase_one(problem, options, note);
    if (!note.empty()) {
      sol.status = note == "infeasible" ? LmiStatus::infeasible : LmiStatus::stalled;
      sol.note = "phase 1: " + note;
      sol.z = RVec::Zero(m);
      return sol;
    }
  }

  const auto classify = [&](const CoreResult& c, LmiSolution& s) {
    if (c.note == "unbounded") {
      s.status = LmiStatus::unbounded;
      s.note = "objective diverged below the configured floor";
      return;
    }
    const bool gap_ok =
        s.gap <= options.gap_tol * std::max(1.0, std::abs(s.primal_objective)) + 1e-12;
    const double cost_scale = std::max(1.0, m > 0 ? problem.cost.cwiseAbs().maxCoeff() : 0.0);
    const bool feas_ok =
        s.dual_residual <= std::max(options.feas_tol * cost_scale * 100.0, 1e-9);
    if (c.converged && gap_ok && feas_ok) {
      s.status = LmiStatus::optimal;
    } else {
      s.status = LmiStatus::stalled;
      s.note = "stopped after " + std::to_string(c.iters) + " iterations with gap " +
               std::to_string(s.gap) + ", dual residual " + std::to_string(s.dual_residual) +
               (c.note.empty() ? "" : " (" + c.note + ")");
    }
  };

  auto [core, out] = run_core<double>(problem, z0, options, nullptr);
  classify(core, out);

  // Small instances that stall in double precision (weak complementarity,
  // flat optimal faces) are rerun with a wider mantissa, which moves the
  // attainable complementarity floor several digits down.
  if (out.status == LmiStatus::stalled && n_tot <= 64 && m <= 160) {
    auto [core2, out2] = run_core<long double>(problem, z0, options, nullptr);
    classify(core2, out2);
    if (out2.status == LmiStatus::optimal || out2.gap < out.gap) {
      out2.note += out2.note.empty() ? "extended precision rerun"
                                     : "; extended precision rerun";
      return out2;
    }
  }
  return out;
}

namespace {

RVec phase_one(const LmiProblem& p, const LmiOptions& options, std::string& note) {
  const int m = static_cast<int>(p.cost.size());
  LmiProblem ext;
  ext.cost = RVec::Zero(m + 1);
  ext.cost[m] = 1.0;
  double s0 = 1.0;
  for (const auto& b : p.blocks) {
    LmiBlock eb;
    eb.f0 = b.f0;
    eb.coeffs = b.coeffs;
    eb.coeffs.push_back(Mat::Identity(b.f0.rows(), b.f0.cols()));
    s0 = std::max(s0, -min_eigenvalue(hermitize(b.f0)) + 1.0);
    ext.blocks.push_back(std::move(eb));
  }
  {
    // Lower bound s ≥ −(s0+1): keeps the feasibility problem bounded and the
    // Schur system nonsingular when a block already has an identity direction.
    LmiBlock bound;
    bound.f0 = Mat::Constant(1, 1, Cplx(s0 + 1.0, 0));
    bound.coeffs.assign(m + 1, Mat::Zero(1, 1));
    bound.coeffs[m] = Mat::Identity(1, 1);
    ext.blocks.push_back(std::move(bound));
  }
  RVec z0 = RVec::Zero(m + 1);
  z0[m] = s0;

  LmiOptions popt = options;
  popt.gap_tol = 1e-9;
  popt.max_newton = 400;
  try {
    auto [core, sol] =
        run_core<double>(ext, z0, popt, [&](const RVec& cur) { return cur[m] < -1e-7; });
    (void)core;
    if (sol.z[m] < -1e-9) {
      note.clear();
      return sol.z.head(m);
    }
  } catch (const Error& e) {
    note = std::string("failed: ") + e.what();
    return RVec();
  }
  note = "infeasible";
  return RVec();
}

}  // namespace

}  // namespace qrg
