#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrg/linalg.hpp"

namespace qrg {

/// One PSD constraint S(z) = f0 + Σ_i z_i·coeffs[i] ⪰ 0 on complex Hermitians.
struct LmiBlock {
  Mat f0;
  std::vector<Mat> coeffs;  // one per variable, same dim as f0
};

/// minimize costᵀz subject to every block being PSD. The Lagrange dual is
///   maximize −Σ_b ⟨f0_b, Z_b⟩  s.t.  Σ_b ⟨coeffs_i^b, Z_b⟩ = cost_i, Z_b ⪰ 0,
/// and the solver hands back both sides.
struct LmiProblem {
  RVec cost;
  std::vector<LmiBlock> blocks;
};

enum class LmiStatus { optimal, infeasible, unbounded, stalled };

const char* to_string(LmiStatus s);

struct LmiSolution {
  LmiStatus status = LmiStatus::stalled;
  RVec z;                      // primal point (blocks PSD within min_slack_eig)
  std::vector<Mat> multipliers;  // dual blocks Z_b, PSD by construction
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;            // primal − dual, recomputed from the two points
  double dual_residual = 0.0;  // max_i |cost_i − Σ_b ⟨coeffs_i, Z_b⟩|
  double min_slack_eig = 0.0;  // min_b λ_min(S_b(z))
  int newton_iterations = 0;
  std::string note;
};

struct LmiOptions {
  double gap_tol = 1e-8;       // target certified duality gap (absolute)
  double feas_tol = 1e-10;     // target dual feasibility residual
  int max_newton = 2000;
  std::optional<RVec> start;   // strictly feasible start; otherwise phase 1 runs
  double mu_shrink = 0.12;
  double objective_floor = -1e10;  // declare unbounded below this
};

/// Dense log-barrier path-following solver for small LMI instances.
/// Requires a strictly feasible point (supplied or found by an internal
/// phase-1 solve). Multipliers are exact barrier duals μ·S(z)⁻¹, so they are
/// PSD by construction; feasibility residuals are reported, never assumed.
LmiSolution lmi_solve(const LmiProblem& problem, const LmiOptions& options = {});

}  // namespace qrg
