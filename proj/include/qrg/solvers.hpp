#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "qrg/channels.hpp"
#include "qrg/freesets.hpp"
#include "qrg/linalg.hpp"
#include "qrg/lmi.hpp"

namespace qrg {

inline constexpr double kDefaultSolveTol = 1e-7;

// ---------------------------------------------------------------------------
// Robustness
// ---------------------------------------------------------------------------

struct SlackReport {
  double primal_psd_floor = 0.0;      // λ_min of the primal slack (mixture − ρ)
  double witness_psd_floor = 0.0;     // λ_min of the dual witness
  double witness_budget_excess = 0.0; // how far Tr(xω) exceeds 1 over the set
  double cs_weights = 0.0;            // weight-side complementary slackness
  double cs_slack = 0.0;              // Tr[x·(mixture − ρ)]
  double dual_residual = 0.0;
};

/// Certified solution of the robustness program: λ* with a feasible primal
/// mixture (weights over generators, or PSD C-side blocks) and a feasible
/// dual witness, plus the recomputed duality gap.
struct RobustnessCertificate {
  double lambda_star = 0.0;
  RVec weights;                  // polytope model: t_i ≥ 0
  std::vector<Mat> weight_blocks;  // C-flexible model: X_i ⪰ 0 on C
  Mat dual_witness;              // x ⪰ 0 with Tr(xω) ≤ 1 on the free set
  double gap = 0.0;
  SlackReport slack;
  int iterations = 0;
};

/// Constructive infinite-robustness classification: the projector onto the
/// complement of the free support space is a feasible dual ray.
struct InfiniteRobustness {
  Mat projector;
  double tr_p_rho = 0.0;
};

using RobustnessResult = std::variant<RobustnessCertificate, InfiniteRobustness>;

/// Least λ ≥ 0 such that mixing ρ with some noise state at weight λ/(1+λ)
/// lands in the free set; certified by primal and dual feasible points.
RobustnessResult robustness(const DensityMatrix& rho, const FreeSet& f,
                            double tol = kDefaultSolveTol);

/// Revalidates a certificate from scratch against (ρ, F).
SlackReport validate_robustness(const RobustnessCertificate& cert, const DensityMatrix& rho,
                                const FreeSet& f);

/// Noise state τ with (ρ + λ*τ)/(1+λ*) in the free set; empty when λ* ≈ 0.
std::optional<Mat> noise_state(const RobustnessCertificate& cert, const DensityMatrix& rho,
                               const FreeSet& f);

/// Free-set member ω' = (ρ + λ*τ)/(1+λ*) rebuilt from the certificate.
Mat certified_free_mixture(const RobustnessCertificate& cert, const DensityMatrix& rho,
                           const FreeSet& f);

/// Membership test for the C-flexible model: robustness ≤ threshold.
bool cflexible_contains(const DensityMatrix& rho, const CFlexibleFreeSet& f,
                        double threshold = 1e-7);

// ---------------------------------------------------------------------------
// Minimum-error discrimination
// ---------------------------------------------------------------------------

struct WeightedState {
  double prior = 0.0;
  Mat state;  // density matrix
};

struct DiscriminationCertificate {
  Measurement povm;
  double value = 0.0;          // Σ p_n Tr(Π_n ρ_n), achieved by the POVM
  Mat dual_y;                  // Y ⪰ p_nρ_n for all n
  double gap = 0.0;            // Tr(Y) − value
  double optimality_defect = 0.0;  // ‖Σ Π_n p_nρ_n − h.c.‖_max
  int iterations = 0;
};

/// Maximum average success probability for discriminating the weighted states,
/// with the optimal POVM and a feasible dual certificate.
DiscriminationCertificate min_error_discrimination(const std::vector<WeightedState>& states,
                                                   double tol = kDefaultSolveTol);

/// Helstrom value for two weighted states (independent closed form).
double helstrom_value(double p1, const Mat& rho1, double p2, const Mat& rho2);

// ---------------------------------------------------------------------------
// Covariant reductions
// ---------------------------------------------------------------------------

/// Optimal discrimination value for a cyclic-shift covariant uniform ensemble,
/// reduced by covariance: maximize Tr(Q·M) over Q ⪰ 0 with Σ_k X^k Q X^{−k} = I,
/// where M is the output of the power-0 channel on the probe state. Solved in
/// the Fourier basis where the dual variable is diagonal.
struct CovariantDiscrimination {
  double value = 0.0;       // achieved by the covariant POVM (lower bound side)
  double upper_bound = 0.0; // from the feasible dual
  double gap = 0.0;
  Mat base_effect;          // Q: effect for the power-0 outcome
  Mat dual_y;               // full-dimension Y ⪰ p_n ρ_n for every outcome
  int iterations = 0;
};

CovariantDiscrimination cyclic_covariant_discrimination(const Mat& base_output, int order,
                                                        double tol = kDefaultSolveTol);

/// Optimal discrimination value for the shift⊗displacement covariant ensembles
/// on B⊗C⊗C used by the ancilla-game compiler, after the basis dephasing on B.
/// base_blocks[n] = ⟨n|M|n⟩_B with M the identity-element channel output.
struct AncillaCovariantDiscrimination {
  double value = 0.0;
  double upper_bound = 0.0;
  double gap = 0.0;
  std::vector<Mat> base_blocks;  // Q_n on C⊗C: base effect Σ_n |n⟩⟨n|⊗Q_n
  Mat dual_y_c;                  // y on C with I⊗y ⪰ M_n for all n
  int iterations = 0;
};

AncillaCovariantDiscrimination ancilla_covariant_discrimination(
    const std::vector<Mat>& base_blocks, int dim_c, double tol = kDefaultSolveTol);

}  // namespace qrg
