#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qrg/linalg.hpp"

namespace qrg {

/// Seeded random source with explicitly coded distributions, so that a seed
/// produces the same stream on every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in {lo..hi}.
  int uniform_int(int lo, int hi);
  /// Standard normal via Box–Muller.
  double gauss();
  Cplx cgauss();

  /// Matrix of iid complex standard Gaussians.
  Mat ginibre(int rows, int cols);

  /// Haar-distributed unitary (QR of a Ginibre matrix with phase-fixed R).
  Mat unitary(int d);

  /// Normalized random ket.
  Vec pure_ket(int d);
  Mat pure_state(int d);

  /// Fixed spectrum conjugated by a random unitary.
  Mat density_with_spectrum(const std::vector<double>& spectrum, int d);

  /// Default desk-scale mixed state: spectrum (0.6, 0.3, 0.1, 0, …) truncated
  /// to d entries and renormalized.
  Mat mixed_state(int d);

  /// Random PSD matrix G·G† with k columns (k = d by default).
  Mat psd(int d, int k = -1);

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// The default mixed-state spectrum truncated/renormalized to d levels.
std::vector<double> default_spectrum(int d);

}  // namespace qrg
