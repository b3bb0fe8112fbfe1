#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrg/channels.hpp"
#include "qrg/freesets.hpp"
#include "qrg/solvers.hpp"

namespace qrg {

/// A channel-discrimination game: channels with prior probabilities, all CPTP
/// with identical dims. With `ancilla_dim` set, probe states live on in⊗anc,
/// the channels act as Λ_n⊗id on the first factor, and measurements live on
/// out⊗anc.
struct ChannelEnsemble {
  std::vector<double> priors;
  std::vector<CPMap> channels;
  std::optional<int> ancilla_dim;

  static ChannelEnsemble make(std::vector<double> priors, std::vector<CPMap> channels,
                              std::optional<int> ancilla_dim = std::nullopt);

  int size() const { return static_cast<int>(channels.size()); }
  int in_dim() const { return channels.empty() ? 0 : channels[0].in_dim(); }
  int out_dim() const { return channels.empty() ? 0 : channels[0].out_dim(); }
  int probe_dim() const { return in_dim() * ancilla_dim.value_or(1); }
  int measured_dim() const { return out_dim() * ancilla_dim.value_or(1); }
};

/// Finite group acting by unitaries on the bare channel-output space, with an
/// explicit multiplication table so label algebra stays exact. Outcome k of an
/// ensemble or measurement corresponds to group position k.
struct GroupAction {
  std::vector<std::string> labels;
  std::vector<Mat> unitaries;
  std::vector<std::vector<int>> mult;  // mult[g][h] = position of g·h
  std::vector<int> inverse;
  int identity = 0;

  int size() const { return static_cast<int>(unitaries.size()); }
  int dim() const { return unitaries.empty() ? 0 : static_cast<int>(unitaries[0].rows()); }

  struct Report {
    bool pass = false;
    double worst_residual = 0.0;  // channel-level ‖U_g∘U_h − U_{gh}‖ (phase-free)
    std::string detail;
  };
  /// Identity unitary, group axioms, and the homomorphism property compared
  /// as channels (Choi form), so global phases are irrelevant.
  Report validate() const;
};

/// Cyclic group of the given order acting by shift powers on dim = order.
/// Position p carries power p; the identity is position 0 (label "order").
GroupAction cyclic_action(int order);

/// Cyclic group generated by powers of a given unitary.
GroupAction cyclic_action(int order, const Mat& generator);

/// Shift ⊗ displacement group on B⊗C used by the ancilla-game compiler:
/// positions (i,q,r) with unitary shiftB^i ⊗ X^q Z^r, flattened as
/// (i·dim_c + q)·dim_c + r.
GroupAction ancilla_game_action(int n_levels, int dim_c);

// ---------------------------------------------------------------------------

/// Σ_n p_n Tr[Π_n·Λ_n(ρ)] (with Λ_n⊗id on the ancilla form).
double success_probability(const DensityMatrix& rho, const Measurement& povm,
                           const ChannelEnsemble& game);

/// Channel outputs (p_n, ρ̃_n) for a probe state.
std::vector<WeightedState> game_output_states(const DensityMatrix& rho,
                                              const ChannelEnsemble& game);

/// Maximum success probability over all measurements, by the dense
/// discrimination solve on the output ensemble.
DiscriminationCertificate optimal_success(const DensityMatrix& rho,
                                          const ChannelEnsemble& game,
                                          double tol = kDefaultSolveTol);

struct CovarianceReport {
  bool pass = false;
  double worst_residual = 0.0;
  int worst_g = -1, worst_h = -1;
  int pairs_checked = 0;
};

/// Verifies Λ_{g·h} = U_g∘Λ_h on channel Chois. Requires uniform priors and
/// one channel per group element. Pairs are subsampled deterministically when
/// the group is too large for the exhaustive scan.
CovarianceReport covariance_check(const ChannelEnsemble& game, const GroupAction& action,
                                  int max_pairs = 40000);

/// Group-average of a measurement: Π^sym_g = |G|⁻¹ Σ_h U_h Π_{h⁻¹g} U_h†.
/// Requires a covariant game; preserves the success probability for every
/// probe state and returns a covariant POVM. For ancilla games the action is
/// extended as U⊗I on the ancilla factor.
Measurement symmetrize_measurement(const Measurement& povm, const GroupAction& action,
                                   const ChannelEnsemble& game);

/// Optimal success for a game covariant under the full cyclic shift action on
/// its output (no ancilla), via the covariance reduction. Group-averaging
/// preserves success probabilities, so this equals the dense solve while
/// staying usable far beyond the dense size cap.
CovariantDiscrimination optimal_success_cyclic(const DensityMatrix& rho,
                                               const ChannelEnsemble& game,
                                               double tol = kDefaultSolveTol);

struct SupOverFree {
  double value = 0.0;
  std::string mode;  // "polytope-exact" or "cflexible-seesaw"
  int argmax_generator = -1;
  int restarts = 0;
  std::optional<double> witness_upper_bound;  // attached by compilation pipelines
};

/// Supremum of the optimal success probability over the free set.
/// Polytope: exact, since the value is convex in the state and therefore
/// attained at a generator. C-flexible: see-saw lower bound over product
/// states with seeded restarts.
SupOverFree sup_over_free(const FreeSet& f, const ChannelEnsemble& game,
                          double tol = kDefaultSolveTol, int restarts = 8,
                          std::uint64_t seed = 17);

/// One game evaluation bundle as recorded by the certification pipelines.
struct GameReport {
  double numerator_value = 0.0;    // P_S for the probe state
  double denominator_value = 0.0;  // sup over the free set
  double ratio = 0.0;
  std::optional<double> covariant_scalar;     // ⟨1|Π^sym_1|1⟩ when applicable
  std::optional<double> robustness_reference; // λ* the game was compiled from
};

}  // namespace qrg
