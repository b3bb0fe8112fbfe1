#pragma once

#include <cstdint>
#include <optional>

#include "qrg/games.hpp"

namespace qrg {

/// Cap on the number of levels N of compiled games (env QRG_NMAX, default 256).
int game_level_cap();
void set_game_level_cap(int cap);

// ---------------------------------------------------------------------------
// Direct (no-ancilla) witness game
// ---------------------------------------------------------------------------

/// Compilation of a robustness certificate into a cyclic-covariant game whose
/// optimal-success ratio against the free set realizes 1 + λ*. The channels
/// read out the normalized witness: Λ_n(σ) = Tr(eσ)|n⟩⟨n| +
/// (1−Tr(eσ))(I−|n⟩⟨n|)/(N−1).
struct DirectGameCompilation {
  Mat witness;            // e = x*/‖x*‖_∞, 0 ⪯ e ⪯ I
  Mat omega_star;         // free-set maximizer of Tr(e·ω)
  double witness_overlap = 0.0;  // Tr(e ω*) > 0
  int n_levels = 0;       // N ≥ max(2, ⌈1 + 1/Tr(eω*)⌉)
  ChannelEnsemble game;   // uniform priors, channels A→B with B = N levels
  GroupAction action;     // cyclic shifts on B
  Measurement designed_povm;  // computational projectors (covariant scalar 1)
};

DirectGameCompilation compile_direct_game(const DensityMatrix& rho, const PolytopeFreeSet& f,
                                          const RobustnessCertificate& cert);

/// Same channel family built from the complement projector of a free set that
/// fails the support condition; the ratio grows linearly in N, witnessing an
/// infinite discrimination power.
struct DivergenceGame {
  Mat projector;
  double tr_p_rho = 0.0;
  int n_levels = 0;
  ChannelEnsemble game;
  GroupAction action;
  double numerator = 0.0;    // optimal success for the probe state
  double denominator = 0.0;  // exact sup over the polytope generators
  double achieved_ratio = 0.0;
};

DivergenceGame compile_divergence_game(const DensityMatrix& rho, const PolytopeFreeSet& f,
                                       int n_levels, double tol = kDefaultSolveTol);

// ---------------------------------------------------------------------------
// Ancilla-assisted witness game
// ---------------------------------------------------------------------------

/// Compilation of a robustness certificate on A⊗C into subchannels A→C and a
/// shift⊗displacement covariant game A→B⊗C played with the C ancilla.
struct AncillaGameCompilation {
  Mat witness;             // e = x*/‖Tr_C x*‖_∞ on A⊗C, so Tr_C e ⪯ I_A
  double c_scale = 0.0;    // 1/‖Tr_C x*‖_∞
  Mat tau;                 // noise state on C fed to the tail subchannels
  double epsilon = 0.0;    // ε ≥ 0 (0 only for the C-flexible model)
  double epsilon_scaled = 0.0;  // ε′ = ε·c_scale
  double witness_overlap = 0.0; // Tr(e ω*) over the free set
  int n_levels = 0;        // N
  int dim_a = 0, dim_c = 0;
  SubchannelCollection subchannels;  // Λ̃_1 = witness readout, tail = τ∘a/(N−1)
  CPMap base_channel = CPMap::identity(1);  // identity-element game channel A→B⊗C
  GroupAction action;      // on B⊗C
  Mat psi_base;            // designed base effect |1⟩⟨1|⊗Φ_C/N_C on B⊗C⊗C
  std::optional<ChannelEnsemble> game;  // materialized only at small sizes
  std::optional<Measurement> psi;       // likewise

  DimensionProfile probe_profile() const {
    return DimensionProfile{{"A", dim_a}, {"C", dim_c}};
  }
};

/// Builds the witness subchannels (and N) from a certificate on A⊗C.
/// ε = 0 requires the exact C-flexible model flag.
AncillaGameCompilation compile_ancilla_subchannels(const RobustnessCertificate& cert,
                                                   const FreeSet& f, int dim_a, int dim_c,
                                                   double epsilon);

/// Assembles the covariant game and the designed measurement on top of any
/// subchannel collection A→C. Partial compilations from
/// compile_ancilla_subchannels pass through this to become playable games.
void assemble_ancilla_game(AncillaGameCompilation& comp, std::uint64_t materialize_budget =
                                                             1ull << 25);

/// Convenience: both steps from a certificate.
AncillaGameCompilation compile_ancilla_game(const RobustnessCertificate& cert, const FreeSet& f,
                                            int dim_a, int dim_c, double epsilon);

/// Success probability with the designed measurement, evaluated through the
/// covariant single-term form.
double ancilla_game_designed_value(const AncillaGameCompilation& comp,
                                   const DensityMatrix& rho);

/// Optimal success probability of the compiled game for a probe state, via the
/// dephased covariant reduction.
AncillaCovariantDiscrimination ancilla_game_optimal(const AncillaGameCompilation& comp,
                                                    const DensityMatrix& rho,
                                                    double tol = kDefaultSolveTol);

/// Witness subchannel readout Tr[Φ_C·(Λ̃_1⊗id)(ρ)]; equals c_scale·Tr(x*ρ).
double witness_readout(const AncillaGameCompilation& comp, const DensityMatrix& rho);

/// See-saw lower bound on the free-set supremum for the compiled game.
double ancilla_game_seesaw(const AncillaGameCompilation& comp, const CFlexibleFreeSet& f,
                           int restarts = 6, std::uint64_t seed = 23,
                           double tol = kDefaultSolveTol);

/// Subchannels on C recovered from a covariant, basis-dephased measurement on
/// B⊗C⊗C (given by its identity-outcome effect).
SubchannelCollection extract_ancilla_subchannels(const Mat& base_effect, int n_levels,
                                                 int dim_c);

/// Measurement-form overload: verifies covariance and dephasing first.
SubchannelCollection extract_ancilla_subchannels(const Measurement& povm_sym,
                                                 const GroupAction& action,
                                                 const AncillaGameCompilation& comp);

}  // namespace qrg
