#include "qrg/rng.hpp"

#include <cmath>
#include <numbers>

namespace qrg {

double Rng::uniform() {
  // 53 bits of the raw draw, as in the standard double conversion.
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw ArgumentError("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(eng_() % span);
}

double Rng::gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Cplx Rng::cgauss() {
  const double re = gauss();
  const double im = gauss();
  return Cplx(re, im) / std::sqrt(2.0);
}

Mat Rng::ginibre(int rows, int cols) {
  Mat g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = cgauss();
  return g;
}

Mat Rng::unitary(int d) {
  const Mat g = ginibre(d, d);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the result is Haar distributed.
  for (int j = 0; j < d; ++j) {
    const Cplx rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= (a > 0) ? rjj / a : Cplx(1, 0);
  }
  return q;
}

Vec Rng::pure_ket(int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = cgauss();
  const double n = v.norm();
  if (n == 0.0) return basis_ket(1, d);
  return v / n;
}

Mat Rng::pure_state(int d) {
  const Vec v = pure_ket(d);
  return v * v.adjoint();
}

Mat Rng::density_with_spectrum(const std::vector<double>& spectrum, int d) {
  if (static_cast<int>(spectrum.size()) != d)
    throw ArgumentError("density_with_spectrum: spectrum length != dim");
  const Mat u = unitary(d);
  Mat diag = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) diag(i, i) = Cplx(spectrum[i], 0);
  return u * diag * u.adjoint();
}

Mat Rng::mixed_state(int d) { return density_with_spectrum(default_spectrum(d), d); }

Mat Rng::psd(int d, int k) {
  if (k < 0) k = d;
  const Mat g = ginibre(d, k);
  return g * g.adjoint();
}

std::vector<double> default_spectrum(int d) {
  static const double base[] = {0.6, 0.3, 0.1};
  std::vector<double> spec(d, 0.0);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    spec[i] = (i < 3) ? base[i] : 0.0;
    sum += spec[i];
  }
  for (auto& s : spec) s /= sum;
  return spec;
}

}  // namespace qrg
