#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <string>
#include <vector>

#include "qrg/errors.hpp"

namespace qrg {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Default tolerances used by the validated types below.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kDensityEigTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;

/// Total-dimension cap for tensor products (kron). Default 4096.
int dimension_cap();
void set_dimension_cap(int cap);

// ---------------------------------------------------------------------------
// Elementwise / structural helpers
// ---------------------------------------------------------------------------

double max_abs(const Mat& m);
bool all_finite(const Mat& m);

/// ‖M − M†‖_max
double herm_defect(const Mat& m);
bool is_hermitian(const Mat& m, double rel_tol = kHermTol);

/// (M + M†)/2
Mat hermitize(const Mat& m);

// ---------------------------------------------------------------------------
// Hermitian eigenproblems
// ---------------------------------------------------------------------------

struct EigH {
  RVec values;  // ascending
  Mat vectors;  // columns
};

/// Dense Hermitian eigendecomposition. Deterministic for a fixed input.
EigH eigh(const Mat& m);

double min_eigenvalue(const Mat& herm);
double max_eigenvalue(const Mat& herm);

/// Operator infinity norm (largest |eigenvalue|) of a Hermitian matrix.
double opnorm_herm(const Mat& herm);

/// λ_min(M) ≥ −tol·max(1, ‖M‖_∞)
bool is_psd(const Mat& herm, double tol = kPsdTol);

/// Sum of positive eigenvalues.
double positive_part_trace(const Mat& herm);

/// Trace norm ‖M‖₁ = Σ|λ_i| of a Hermitian matrix.
double trace_norm_herm(const Mat& herm);

// ---------------------------------------------------------------------------
// Tensor calculus
// ---------------------------------------------------------------------------

/// Kronecker product, row-major basis order (first factor slowest).
/// Throws TooLargeError beyond the configured dimension cap.
Mat kron(const Mat& a, const Mat& b);

/// Ordered, labeled subsystem dimensions.
struct DimensionProfile {
  struct Subsystem {
    std::string label;
    int dim = 1;
  };
  std::vector<Subsystem> parts;

  DimensionProfile() = default;
  DimensionProfile(std::initializer_list<Subsystem> ps);

  int total() const;
  /// Position of a label; throws ArgumentError if unknown.
  int position(const std::string& label) const;
  int dim_of(const std::string& label) const;
  std::vector<int> dims() const;
};

/// Partial trace keeping the listed positions (0-based, in profile order).
Mat partial_trace_positions(const Mat& m, const std::vector<int>& dims,
                            const std::vector<int>& keep);

/// Partial trace keeping the labeled subsystems.
Mat partial_trace(const Mat& m, const DimensionProfile& profile,
                  const std::vector<std::string>& keep);

// ---------------------------------------------------------------------------
// Standard operators (1-based basis kets |1⟩,…,|d⟩ as in the API contract)
// ---------------------------------------------------------------------------

/// |n⟩ for n ∈ {1..d}.
Vec basis_ket(int n, int d);

/// Reduce an integer to the representative in {1..modulus} modulo `modulus`.
int mod_index(long long n, int modulus);

struct PauliPair {
  Mat shift;  // X: |n⟩ ↦ |n+1⟩ cyclically
  Mat clock;  // Z: |n⟩ ↦ exp(2πin/d)|n⟩
};

/// Generalized Pauli pair of order d; satisfies ZX = exp(2πi/d)XZ, Xᵈ=Zᵈ=I.
PauliPair generalized_pauli(int d);

/// Non-normalized maximally entangled ket Σₙ |n⟩⊗|n⟩ on d·d.
Vec max_entangled_ket(int d);

/// |Φ⟩⟨Φ| with Tr = d; satisfies Tr[Φ(ρ⊗σ)] = Tr(σᵀρ).
Mat max_entangled(int d);

// ---------------------------------------------------------------------------
// Validated wrapper types
// ---------------------------------------------------------------------------

/// Square complex matrix with finite entries.
class ComplexSquareMatrix {
public:
  static ComplexSquareMatrix make(Mat m);
  const Mat& mat() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

protected:
  explicit ComplexSquareMatrix(Mat m) : m_(std::move(m)) {}
  Mat m_;
};

class HermitianOperator : public ComplexSquareMatrix {
public:
  /// Validates the Hermiticity defect and stores the hermitized matrix.
  static HermitianOperator make(const Mat& m);
  /// Skips validation; caller's responsibility (hot paths, already-checked data).
  static HermitianOperator trusted(Mat m) { return HermitianOperator(std::move(m)); }

private:
  explicit HermitianOperator(Mat m) : ComplexSquareMatrix(std::move(m)) {}
};

class DensityMatrix {
public:
  /// Requires λ_min ≥ −1e−10 and |Tr − 1| ≤ 1e−10.
  static DensityMatrix make(const Mat& m);
  static DensityMatrix trusted(Mat m);
  const Mat& mat() const { return op_.mat(); }
  int dim() const { return op_.dim(); }
  const HermitianOperator& herm() const { return op_; }

private:
  explicit DensityMatrix(HermitianOperator op) : op_(std::move(op)) {}
  HermitianOperator op_;
};

class UnitaryOperator {
public:
  /// Requires ‖U†U − I‖_max ≤ 1e−10.
  static UnitaryOperator make(Mat m);
  const Mat& mat() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

private:
  explicit UnitaryOperator(Mat m) : m_(std::move(m)) {}
  Mat m_;
};

// ---------------------------------------------------------------------------
// Real parameterization of Hermitian matrices (used by the conic layer)
// ---------------------------------------------------------------------------

/// Basis of the real vector space of d×d Hermitians: d diagonal units,
/// then for each i<j the pair (|i⟩⟨j|+|j⟩⟨i|) and i(|i⟩⟨j|−|j⟩⟨i|).
std::vector<Mat> hermitian_basis(int d);

/// Coordinates of a Hermitian matrix in hermitian_basis(d) order.
RVec hermitian_coords(const Mat& herm);

Mat hermitian_from_coords(const RVec& coords, int d);

}  // namespace qrg
