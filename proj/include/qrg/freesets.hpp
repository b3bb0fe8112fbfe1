#pragma once

#include <variant>
#include <vector>

#include "qrg/channels.hpp"
#include "qrg/linalg.hpp"

namespace qrg {

/// Closed convex free-state set represented by its extreme points. The closure
/// of the hull is handled implicitly by numerical tolerance.
struct PolytopeFreeSet {
  int dim = 0;
  std::vector<DensityMatrix> generators;

  static PolytopeFreeSet make(std::vector<DensityMatrix> generators);
};

/// Free states of the form Σ_i p_i α_i⊗β_i with fixed A-side generators α_i
/// and arbitrary C-side states β_i. Closed under every channel (and TNI-CP
/// map) on C by construction.
struct CFlexibleFreeSet {
  int dim_a = 0;
  int dim_c = 0;
  std::vector<DensityMatrix> a_generators;

  static CFlexibleFreeSet make(int dim_c, std::vector<DensityMatrix> a_generators);
  int dim() const { return dim_a * dim_c; }
  DimensionProfile profile() const {
    return DimensionProfile{{"A", dim_a}, {"C", dim_c}};
  }
};

using FreeSet = std::variant<PolytopeFreeSet, CFlexibleFreeSet>;

int free_set_dim(const FreeSet& f);

/// Span of the free-state supports, with the projector onto its complement.
struct SupportSpace {
  int dim = 0;          // ambient dimension
  Mat basis;            // dim×rank, orthonormal columns spanning the space
  Mat complement_projector;  // P: PP = P, P† = P, P·basis = 0

  int rank() const { return static_cast<int>(basis.cols()); }
  bool full() const { return rank() == dim; }
};

/// Range of the uniform mixture of the generators (eigenvalue threshold
/// 1e−9·λ_max). The hull contains a positive definite element iff full().
SupportSpace support_space(const PolytopeFreeSet& f);

/// A-side support space of a C-flexible set; the set's own support space is
/// (A-side range)⊗C.
SupportSpace support_space_a_side(const CFlexibleFreeSet& f);

/// Support space of either model, on the full state space.
SupportSpace support_space(const FreeSet& f);

/// True iff supp ρ lies inside the free support space (Tr(Pρ) ≤ 1e−9).
/// Decides finiteness of the robustness and of the discrimination power.
bool in_S_T(const DensityMatrix& rho, const PolytopeFreeSet& f);
bool in_S_T(const DensityMatrix& rho, const FreeSet& f);

/// max over the free set of Tr(e·ω), with a maximizer.
struct WitnessMax {
  double value = 0.0;
  int generator_index = -1;
  Mat maximizer;  // ω*: a generator, or α_i⊗ββ† for the C-flexible model
};

WitnessMax max_witness_value(const Mat& e, const PolytopeFreeSet& f);
WitnessMax max_witness_value(const Mat& e, const CFlexibleFreeSet& f);
WitnessMax max_witness_value(const Mat& e, const FreeSet& f);

/// Finite inner approximation of the closure of a free set on A⊗C under
/// channels acting on C: generators' = {(id_A⊗E)(ω)} for E in the list ∪ {id}.
PolytopeFreeSet apply_channel_closure(const PolytopeFreeSet& f,
                                      const DimensionProfile& profile,
                                      const std::vector<CPMap>& channels_on_c);

}  // namespace qrg
