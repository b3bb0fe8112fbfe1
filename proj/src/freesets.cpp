#include "qrg/freesets.hpp"

#include <algorithm>

namespace qrg {

namespace {
constexpr double kSupportTol = 1e-9;
}

PolytopeFreeSet PolytopeFreeSet::make(std::vector<DensityMatrix> generators) {
  if (generators.empty())
    throw ArgumentError("PolytopeFreeSet: generator list must be nonempty");
  const int d = generators[0].dim();
  for (const auto& g : generators)
    if (g.dim() != d) throw ArgumentError("PolytopeFreeSet: generators of mixed dims");
  return PolytopeFreeSet{d, std::move(generators)};
}

CFlexibleFreeSet CFlexibleFreeSet::make(int dim_c, std::vector<DensityMatrix> a_generators) {
  if (dim_c < 1) throw ArgumentError("CFlexibleFreeSet: dim_c must be ≥ 1");
  if (a_generators.empty())
    throw ArgumentError("CFlexibleFreeSet: A-generator list must be nonempty");
  const int da = a_generators[0].dim();
  for (const auto& g : a_generators)
    if (g.dim() != da) throw ArgumentError("CFlexibleFreeSet: generators of mixed dims");
  return CFlexibleFreeSet{da, dim_c, std::move(a_generators)};
}

int free_set_dim(const FreeSet& f) {
  return std::visit([](const auto& s) {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, PolytopeFreeSet>)
      return s.dim;
    else
      return s.dim();
  }, f);
}

namespace {

SupportSpace support_of_mixture(const Mat& mixture) {
  const int d = static_cast<int>(mixture.rows());
  const EigH eig = eigh(mixture);
  const double lmax = eig.values.maxCoeff();
  const double thresh = 1e-9 * std::max(lmax, 0.0);

  int rank = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values[i] > thresh) ++rank;

  SupportSpace s;
  s.dim = d;
  s.basis = eig.vectors.rightCols(rank);
  s.complement_projector = Mat::Identity(d, d) - s.basis * s.basis.adjoint();
  return s;
}

}  // namespace

SupportSpace support_space(const PolytopeFreeSet& f) {
  Mat mixture = Mat::Zero(f.dim, f.dim);
  for (const auto& g : f.generators) mixture += g.mat();
  mixture /= static_cast<double>(f.generators.size());
  return support_of_mixture(mixture);
}

SupportSpace support_space_a_side(const CFlexibleFreeSet& f) {
  Mat mixture = Mat::Zero(f.dim_a, f.dim_a);
  for (const auto& g : f.a_generators) mixture += g.mat();
  mixture /= static_cast<double>(f.a_generators.size());
  return support_of_mixture(mixture);
}

SupportSpace support_space(const FreeSet& f) {
  if (std::holds_alternative<PolytopeFreeSet>(f))
    return support_space(std::get<PolytopeFreeSet>(f));
  const auto& cf = std::get<CFlexibleFreeSet>(f);
  const SupportSpace a = support_space_a_side(cf);
  SupportSpace s;
  s.dim = cf.dim();
  s.basis = kron(a.basis, Mat::Identity(cf.dim_c, cf.dim_c));
  s.complement_projector = kron(a.complement_projector, Mat::Identity(cf.dim_c, cf.dim_c));
  return s;
}

bool in_S_T(const DensityMatrix& rho, const PolytopeFreeSet& f) {
  if (rho.dim() != f.dim) throw ArgumentError("in_S_T: dimension mismatch");
  const SupportSpace s = support_space(f);
  return (s.complement_projector * rho.mat()).trace().real() <= kSupportTol;
}

bool in_S_T(const DensityMatrix& rho, const FreeSet& f) {
  if (rho.dim() != free_set_dim(f)) throw ArgumentError("in_S_T: dimension mismatch");
  const SupportSpace s = support_space(f);
  return (s.complement_projector * rho.mat()).trace().real() <= kSupportTol;
}

WitnessMax max_witness_value(const Mat& e, const PolytopeFreeSet& f) {
  if (e.rows() != f.dim) throw ArgumentError("max_witness_value: dimension mismatch");
  WitnessMax best;
  best.value = -1e300;
  for (size_t i = 0; i < f.generators.size(); ++i) {
    const double v = (e * f.generators[i].mat()).trace().real();
    // ties broken by lowest index for reproducible compilations
    if (v > best.value) {
      best.value = v;
      best.generator_index = static_cast<int>(i);
    }
  }
  best.maximizer = f.generators[best.generator_index].mat();
  return best;
}

WitnessMax max_witness_value(const Mat& e, const CFlexibleFreeSet& f) {
  if (e.rows() != f.dim()) throw ArgumentError("max_witness_value: dimension mismatch");
  const std::vector<int> dims = {f.dim_a, f.dim_c};
  WitnessMax best;
  best.value = -1e300;
  Vec best_beta;
  for (size_t i = 0; i < f.a_generators.size(); ++i) {
    // K_i = Tr_A[(α_i⊗I_C)·e]; the best C-side state for α_i is its top eigenvector.
    const Mat k = partial_trace_positions(
        kron(f.a_generators[i].mat(), Mat::Identity(f.dim_c, f.dim_c)) * e, dims, {1});
    const EigH eig = eigh(k);
    const double v = eig.values.maxCoeff();
    if (v > best.value) {
      best.value = v;
      best.generator_index = static_cast<int>(i);
      best_beta = eig.vectors.col(f.dim_c - 1);
    }
  }
  best.maximizer =
      kron(f.a_generators[best.generator_index].mat(), best_beta * best_beta.adjoint());
  return best;
}

WitnessMax max_witness_value(const Mat& e, const FreeSet& f) {
  return std::visit([&](const auto& s) { return max_witness_value(e, s); }, f);
}

PolytopeFreeSet apply_channel_closure(const PolytopeFreeSet& f,
                                      const DimensionProfile& profile,
                                      const std::vector<CPMap>& channels_on_c) {
  const int pos_c = profile.position("C");
  const int dim_c = profile.dim_of("C");
  if (profile.total() != f.dim)
    throw ArgumentError("apply_channel_closure: profile does not match set dimension");
  for (const auto& ch : channels_on_c) {
    if (ch.kind() != MapKind::cptp)
      throw ArgumentError("apply_channel_closure: all channels must be CPTP");
    if (ch.in_dim() != dim_c || ch.out_dim() != dim_c)
      throw ArgumentError("apply_channel_closure: channels must act on C");
  }
  std::vector<DensityMatrix> out = f.generators;
  const auto dims = profile.dims();
  for (const auto& g : f.generators)
    for (const auto& ch : channels_on_c)
      out.push_back(DensityMatrix::make(apply_to_subsystem(ch, g.mat(), dims, pos_c)));
  return PolytopeFreeSet::make(std::move(out));
}

}  // namespace qrg
