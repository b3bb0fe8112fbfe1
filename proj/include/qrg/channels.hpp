#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrg/linalg.hpp"

namespace qrg {

/// Map classes ordered from weakest to strongest guarantee.
enum class MapKind { cp, tni, cptp };

const char* to_string(MapKind k);

struct ChoiValidation {
  double min_choi_eig = 0.0;   // λ_min of the Choi operator
  double tp_defect = 0.0;      // ‖Tr_out(choi) − I‖_max
  double tni_excess = 0.0;     // λ_max(Tr_out(choi) − I)
  MapKind actual = MapKind::cp;
  bool completely_positive = false;
  bool downgraded = false;     // declared kind was stronger than the actual one
};

/// Completely positive map in Choi form. Index ordering of the Choi operator
/// is input ⊗ output: entry ((a,b),(a',b')) = Λ(|a⟩⟨a'|)_{b,b'}.
///
/// Worked 2×2 example fixing the convention: for the identity qubit channel
/// the Choi operator is |Φ⟩⟨Φ| with |Φ⟩ = |1⟩⊗|1⟩ + |2⟩⊗|2⟩, i.e. rows/cols
/// are indexed (in=1,out=1),(1,2),(2,1),(2,2) so that the (1,1)↔(2,2) corner
/// entries equal 1.
class CPMap {
public:
  /// Classify and build; throws ArgumentError if the Choi operator is not CP.
  static CPMap from_choi(Mat choi, int in_dim, int out_dim,
                         ChoiValidation* report = nullptr);

  /// As from_choi, but with a caller-declared kind. The kind is verified, not
  /// trusted: a misdeclared kind is downgraded and flagged in the report.
  static CPMap from_choi_declared(Mat choi, int in_dim, int out_dim, MapKind declared,
                                  ChoiValidation* report = nullptr);

  /// choi = Σ_k (I⊗K_k) Φ_in (I⊗K_k)†; kind inferred by validation.
  static CPMap from_kraus(const std::vector<Mat>& kraus, int in_dim, int out_dim);

  static CPMap identity(int d);
  /// ρ ↦ Tr(ρ)·I/d (completely depolarizing).
  static CPMap depolarizing(int d);
  /// ρ ↦ UρU†.
  static CPMap conjugation(const Mat& unitary);
  /// Scalar-input preparation map 1 → d: c ↦ c·τ.
  static CPMap prepare(const Mat& tau);
  /// Full trace d → 1.
  static CPMap trace_map(int d);
  /// ρ ↦ Σ_n |n⟩⟨n|ρ|n⟩⟨n| (computational-basis dephasing).
  static CPMap dephasing(int d);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const Mat& choi() const { return choi_; }
  MapKind kind() const { return kind_; }

  /// Apply to a (not necessarily Hermitian) matrix on the input space.
  Mat apply(const Mat& state) const;

  /// Adjoint map with respect to the trace inner product.
  CPMap adjoint() const;

  static ChoiValidation classify(const Mat& choi, int in_dim, int out_dim);

private:
  CPMap(Mat choi, int in_dim, int out_dim, MapKind kind)
      : choi_(std::move(choi)), in_dim_(in_dim), out_dim_(out_dim), kind_(kind) {}

  Mat choi_;
  int in_dim_;
  int out_dim_;
  MapKind kind_;
};

/// apply(tensor(a,b), x⊗y) = apply(a,x) ⊗ apply(b,y); kind = weaker of the two.
CPMap tensor(const CPMap& a, const CPMap& b);

/// apply(compose(second, first)) = apply(second) ∘ apply(first).
CPMap compose(const CPMap& second, const CPMap& first);

/// Apply `map` to the subsystem at `position` of a state over `dims`,
/// acting as the identity elsewhere. Returns the state over the new dims.
Mat apply_to_subsystem(const CPMap& map, const Mat& state, const std::vector<int>& dims,
                       int position);

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

struct Measurement {
  std::vector<Mat> effects;
  std::vector<std::string> labels;  // optional outcome identifiers

  int dim() const { return effects.empty() ? 0 : static_cast<int>(effects[0].rows()); }
  int size() const { return static_cast<int>(effects.size()); }
};

struct PovmReport {
  std::vector<double> effect_min_eigs;
  double sum_defect = 0.0;  // ‖ΣΠ_n − I‖_max
  bool pass = false;
};

PovmReport validate_povm(const Measurement& m, double psd_tol = kPsdTol,
                         double sum_tol = 1e-9);

/// Projective measurement onto the computational basis of dimension d.
Measurement computational_povm(int d);

// ---------------------------------------------------------------------------
// Subchannel collections
// ---------------------------------------------------------------------------

/// CP maps with shared in/out dims whose sum is a channel.
struct SubchannelCollection {
  std::vector<CPMap> maps;

  int in_dim() const { return maps.empty() ? 0 : maps[0].in_dim(); }
  int out_dim() const { return maps.empty() ? 0 : maps[0].out_dim(); }
  int size() const { return static_cast<int>(maps.size()); }
};

struct SubchannelReport {
  double min_choi_eig = 0.0;  // over all members
  double sum_tp_defect = 0.0; // ‖Tr_out(Σ choi) − I‖_max
  bool pass = false;
};

SubchannelReport validate_subchannels(const SubchannelCollection& s,
                                      double psd_tol = kPsdTol, double tp_tol = 1e-9);

}  // namespace qrg
