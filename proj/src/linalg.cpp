#include "qrg/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

namespace qrg {

namespace {
std::atomic<int> g_dimension_cap{4096};
}

int dimension_cap() { return g_dimension_cap.load(); }

void set_dimension_cap(int cap) {
  if (cap < 1) throw ArgumentError("dimension cap must be positive");
  g_dimension_cap.store(cap);
}

double max_abs(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool all_finite(const Mat& m) { return m.allFinite(); }

double herm_defect(const Mat& m) {
  if (m.rows() != m.cols()) throw ArgumentError("herm_defect: matrix not square");
  return max_abs(m - m.adjoint());
}

bool is_hermitian(const Mat& m, double rel_tol) {
  return herm_defect(m) <= rel_tol * std::max(1.0, max_abs(m));
}

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

EigH eigh(const Mat& m) {
  if (m.rows() != m.cols()) throw ArgumentError("eigh: matrix not square");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m));
  if (es.info() != Eigen::Success)
    throw NumericalError("eigh: Hermitian eigensolver did not converge (dim " +
                         std::to_string(m.rows()) + ")");
  return EigH{es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const Mat& herm) { return eigh(herm).values.minCoeff(); }

double max_eigenvalue(const Mat& herm) { return eigh(herm).values.maxCoeff(); }

double opnorm_herm(const Mat& herm) {
  const auto vals = eigh(herm).values;
  return std::max(std::abs(vals.minCoeff()), std::abs(vals.maxCoeff()));
}

bool is_psd(const Mat& herm, double tol) {
  const auto vals = eigh(herm).values;
  const double scale = std::max(std::abs(vals.minCoeff()), std::abs(vals.maxCoeff()));
  return vals.minCoeff() >= -tol * std::max(1.0, scale);
}

double positive_part_trace(const Mat& herm) {
  const auto vals = eigh(herm).values;
  double s = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) s += std::max(0.0, vals[i]);
  return s;
}

double trace_norm_herm(const Mat& herm) {
  const auto vals = eigh(herm).values;
  return vals.cwiseAbs().sum();
}

Mat kron(const Mat& a, const Mat& b) {
  const long long total = static_cast<long long>(a.rows()) * b.rows();
  if (total > dimension_cap())
    throw TooLargeError("kron: total dimension " + std::to_string(total) +
                        " exceeds cap " + std::to_string(dimension_cap()));
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DimensionProfile::DimensionProfile(std::initializer_list<Subsystem> ps) : parts(ps) {
  for (const auto& p : parts)
    if (p.dim < 1) throw ArgumentError("DimensionProfile: level of '" + p.label + "' must be ≥ 1");
}

int DimensionProfile::total() const {
  long long t = 1;
  for (const auto& p : parts) t *= p.dim;
  if (t > std::max(dimension_cap(), 1 << 20))
    throw TooLargeError("DimensionProfile: total dimension overflow");
  return static_cast<int>(t);
}

int DimensionProfile::position(const std::string& label) const {
  for (size_t i = 0; i < parts.size(); ++i)
    if (parts[i].label == label) return static_cast<int>(i);
  throw ArgumentError("DimensionProfile: unknown subsystem label '" + label + "'");
}

int DimensionProfile::dim_of(const std::string& label) const {
  return parts[position(label)].dim;
}

std::vector<int> DimensionProfile::dims() const {
  std::vector<int> d;
  d.reserve(parts.size());
  for (const auto& p : parts) d.push_back(p.dim);
  return d;
}

namespace {

// Row-major strides for a composite index.
std::vector<long long> strides_of(const std::vector<int>& dims) {
  std::vector<long long> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * dims[i + 1];
  return s;
}

void next_multi_index(std::vector<int>& idx, const std::vector<int>& dims) {
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    if (++idx[i] < dims[i]) return;
    idx[i] = 0;
  }
}

}  // namespace

Mat partial_trace_positions(const Mat& m, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  long long total = 1;
  for (int d : dims) {
    if (d < 1) throw ArgumentError("partial_trace: dims must be ≥ 1");
    total *= d;
  }
  if (m.rows() != total || m.cols() != total)
    throw ArgumentError("partial_trace: matrix dim " + std::to_string(m.rows()) +
                        " does not match profile total " + std::to_string(total));
  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) {
    if (k < 0 || k >= static_cast<int>(dims.size()))
      throw ArgumentError("partial_trace: keep position out of range");
    kept[k] = true;
  }

  std::vector<int> keep_dims, trace_dims, keep_pos, trace_pos;
  for (size_t i = 0; i < dims.size(); ++i) {
    if (kept[i]) {
      keep_dims.push_back(dims[i]);
      keep_pos.push_back(static_cast<int>(i));
    } else {
      trace_dims.push_back(dims[i]);
      trace_pos.push_back(static_cast<int>(i));
    }
  }
  const auto strides = strides_of(dims);
  long long dout = 1;
  for (int d : keep_dims) dout *= d;
  long long dtr = 1;
  for (int d : trace_dims) dtr *= d;

  Mat out = Mat::Zero(dout, dout);
  std::vector<int> a(keep_dims.size(), 0), b(keep_dims.size(), 0), t(trace_dims.size(), 0);
  for (long long ia = 0; ia < dout; ++ia) {
    std::fill(b.begin(), b.end(), 0);
    for (long long ib = 0; ib < dout; ++ib) {
      long long row_base = 0, col_base = 0;
      for (size_t i = 0; i < keep_pos.size(); ++i) {
        row_base += a[i] * strides[keep_pos[i]];
        col_base += b[i] * strides[keep_pos[i]];
      }
      std::fill(t.begin(), t.end(), 0);
      Cplx acc(0, 0);
      for (long long it = 0; it < dtr; ++it) {
        long long off = 0;
        for (size_t i = 0; i < trace_pos.size(); ++i) off += t[i] * strides[trace_pos[i]];
        acc += m(row_base + off, col_base + off);
        if (!trace_dims.empty()) next_multi_index(t, trace_dims);
      }
      out(ia, ib) = acc;
      if (!keep_dims.empty()) next_multi_index(b, keep_dims);
    }
    if (!keep_dims.empty()) next_multi_index(a, keep_dims);
  }
  return out;
}

Mat partial_trace(const Mat& m, const DimensionProfile& profile,
                  const std::vector<std::string>& keep) {
  std::vector<int> keep_pos;
  keep_pos.reserve(keep.size());
  for (const auto& l : keep) keep_pos.push_back(profile.position(l));
  return partial_trace_positions(m, profile.dims(), keep_pos);
}

Vec basis_ket(int n, int d) {
  if (d < 1 || n < 1 || n > d)
    throw ArgumentError("basis_ket: need 1 ≤ n ≤ d");
  Vec v = Vec::Zero(d);
  v[n - 1] = Cplx(1, 0);
  return v;
}

int mod_index(long long n, int modulus) {
  if (modulus < 1) throw ArgumentError("mod_index: modulus must be ≥ 1");
  long long r = (n - 1) % modulus;
  if (r < 0) r += modulus;
  return static_cast<int>(r) + 1;
}

PauliPair generalized_pauli(int d) {
  if (d < 1) throw ArgumentError("generalized_pauli: d must be ≥ 1");
  Mat x = Mat::Zero(d, d);
  Mat z = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    x((k + 1) % d, k) = Cplx(1, 0);
    const double angle = 2.0 * std::numbers::pi * (k + 1) / d;
    z(k, k) = Cplx(std::cos(angle), std::sin(angle));
  }
  return PauliPair{std::move(x), std::move(z)};
}

Vec max_entangled_ket(int d) {
  if (d < 1) throw ArgumentError("max_entangled: d must be ≥ 1");
  Vec v = Vec::Zero(static_cast<long long>(d) * d);
  for (int n = 0; n < d; ++n) v[n * d + n] = Cplx(1, 0);
  return v;
}

Mat max_entangled(int d) {
  const Vec v = max_entangled_ket(d);
  return v * v.adjoint();
}

ComplexSquareMatrix ComplexSquareMatrix::make(Mat m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw ArgumentError("ComplexSquareMatrix: need a nonempty square matrix");
  if (!all_finite(m)) throw ArgumentError("ComplexSquareMatrix: non-finite entries");
  return ComplexSquareMatrix(std::move(m));
}

HermitianOperator HermitianOperator::make(const Mat& m) {
  ComplexSquareMatrix base = ComplexSquareMatrix::make(m);
  if (!is_hermitian(base.mat()))
    throw ArgumentError("HermitianOperator: Hermiticity defect " +
                        std::to_string(herm_defect(base.mat())) + " too large");
  return HermitianOperator(hermitize(base.mat()));
}

DensityMatrix DensityMatrix::make(const Mat& m) {
  HermitianOperator op = HermitianOperator::make(m);
  const double tr = op.mat().trace().real();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw ArgumentError("DensityMatrix: trace " + std::to_string(tr) + " not 1");
  const double lmin = min_eigenvalue(op.mat());
  if (lmin < -kDensityEigTol)
    throw ArgumentError("DensityMatrix: smallest eigenvalue " + std::to_string(lmin) +
                        " below tolerance");
  return DensityMatrix(std::move(op));
}

DensityMatrix DensityMatrix::trusted(Mat m) {
  return DensityMatrix(HermitianOperator::trusted(std::move(m)));
}

UnitaryOperator UnitaryOperator::make(Mat m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw ArgumentError("UnitaryOperator: need a nonempty square matrix");
  if (!all_finite(m)) throw ArgumentError("UnitaryOperator: non-finite entries");
  const double defect = max_abs(m.adjoint() * m - Mat::Identity(m.rows(), m.cols()));
  if (defect > kUnitaryTol)
    throw ArgumentError("UnitaryOperator: ‖U†U − I‖_max = " + std::to_string(defect));
  return UnitaryOperator(std::move(m));
}

std::vector<Mat> hermitian_basis(int d) {
  if (d < 1) throw ArgumentError("hermitian_basis: d must be ≥ 1");
  std::vector<Mat> basis;
  basis.reserve(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    Mat e = Mat::Zero(d, d);
    e(i, i) = Cplx(1, 0);
    basis.push_back(std::move(e));
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Mat er = Mat::Zero(d, d);
      er(i, j) = Cplx(1, 0);
      er(j, i) = Cplx(1, 0);
      basis.push_back(std::move(er));
      Mat ei = Mat::Zero(d, d);
      ei(i, j) = Cplx(0, 1);
      ei(j, i) = Cplx(0, -1);
      basis.push_back(std::move(ei));
    }
  }
  return basis;
}

RVec hermitian_coords(const Mat& herm) {
  const int d = static_cast<int>(herm.rows());
  RVec z(static_cast<long long>(d) * d);
  int k = 0;
  for (int i = 0; i < d; ++i) z[k++] = herm(i, i).real();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      z[k++] = herm(i, j).real();
      z[k++] = herm(i, j).imag();
    }
  return z;
}

Mat hermitian_from_coords(const RVec& coords, int d) {
  if (coords.size() != static_cast<long long>(d) * d)
    throw ArgumentError("hermitian_from_coords: wrong coordinate count");
  Mat m = Mat::Zero(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) m(i, i) = Cplx(coords[k++], 0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double re = coords[k++];
      const double im = coords[k++];
      m(i, j) = Cplx(re, im);
      m(j, i) = Cplx(re, -im);
    }
  return m;
}

}  // namespace qrg
