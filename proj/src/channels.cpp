#include "qrg/channels.hpp"

#include <algorithm>

namespace qrg {

const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::cp: return "cp";
    case MapKind::tni: return "tni";
    case MapKind::cptp: return "cptp";
  }
  return "cp";
}

ChoiValidation CPMap::classify(const Mat& choi, int in_dim, int out_dim) {
  if (in_dim < 1 || out_dim < 1) throw ArgumentError("CPMap: dims must be ≥ 1");
  if (choi.rows() != static_cast<long long>(in_dim) * out_dim || choi.rows() != choi.cols())
    throw ArgumentError("CPMap: Choi dimension does not match in_dim·out_dim");
  if (!is_hermitian(choi, 1e-9))
    throw ArgumentError("CPMap: Choi operator is not Hermitian");

  ChoiValidation v;
  v.min_choi_eig = min_eigenvalue(choi);
  const double scale = std::max(1.0, max_abs(choi));
  v.completely_positive = v.min_choi_eig >= -kPsdTol * scale;

  const Mat marg = partial_trace_positions(choi, {in_dim, out_dim}, {0});
  const Mat defect = marg - Mat::Identity(in_dim, in_dim);
  v.tp_defect = max_abs(defect);
  v.tni_excess = max_eigenvalue(hermitize(defect));

  if (!v.completely_positive)
    v.actual = MapKind::cp;  // placeholder; callers treat non-CP as invalid
  else if (v.tp_defect <= 1e-9)
    v.actual = MapKind::cptp;
  else if (v.tni_excess <= 1e-9 * scale)
    v.actual = MapKind::tni;
  else
    v.actual = MapKind::cp;
  return v;
}

CPMap CPMap::from_choi(Mat choi, int in_dim, int out_dim, ChoiValidation* report) {
  ChoiValidation v = classify(choi, in_dim, out_dim);
  if (report) *report = v;
  if (!v.completely_positive)
    throw ArgumentError("CPMap: Choi operator not PSD (λ_min = " +
                        std::to_string(v.min_choi_eig) + ")");
  return CPMap(hermitize(choi), in_dim, out_dim, v.actual);
}

CPMap CPMap::from_choi_declared(Mat choi, int in_dim, int out_dim, MapKind declared,
                                ChoiValidation* report) {
  ChoiValidation v = classify(choi, in_dim, out_dim);
  if (!v.completely_positive)
    throw ArgumentError("CPMap: Choi operator not PSD (λ_min = " +
                        std::to_string(v.min_choi_eig) + ")");
  MapKind kind = declared;
  if (static_cast<int>(declared) > static_cast<int>(v.actual)) {
    kind = v.actual;
    v.downgraded = true;
  }
  if (report) *report = v;
  return CPMap(hermitize(choi), in_dim, out_dim, kind);
}

CPMap CPMap::from_kraus(const std::vector<Mat>& kraus, int in_dim, int out_dim) {
  if (kraus.empty()) throw ArgumentError("from_kraus: need at least one operator");
  const long long d = static_cast<long long>(in_dim) * out_dim;
  Mat choi = Mat::Zero(d, d);
  for (const auto& k : kraus) {
    if (k.rows() != out_dim || k.cols() != in_dim)
      throw ArgumentError("from_kraus: operator shape " + std::to_string(k.rows()) + "×" +
                          std::to_string(k.cols()) + " does not match out×in");
    // (I⊗K)|Φ⟩ has entry K(b,a) at composite index (a,b).
    Vec v(d);
    for (int a = 0; a < in_dim; ++a)
      for (int b = 0; b < out_dim; ++b) v[static_cast<long long>(a) * out_dim + b] = k(b, a);
    choi.noalias() += v * v.adjoint();
  }
  return from_choi(std::move(choi), in_dim, out_dim);
}

CPMap CPMap::identity(int d) {
  Mat choi = max_entangled(d);
  return CPMap(std::move(choi), d, d, MapKind::cptp);
}

CPMap CPMap::depolarizing(int d) {
  Mat choi = Mat::Identity(static_cast<long long>(d) * d, static_cast<long long>(d) * d) /
             static_cast<double>(d);
  return CPMap(std::move(choi), d, d, MapKind::cptp);
}

CPMap CPMap::conjugation(const Mat& unitary) {
  const int d = static_cast<int>(unitary.rows());
  return from_kraus({unitary}, d, d);
}

CPMap CPMap::prepare(const Mat& tau) {
  if (tau.rows() != tau.cols()) throw ArgumentError("prepare: state must be square");
  Mat choi = tau;  // in_dim = 1, so the Choi operator is the prepared state itself
  return from_choi(std::move(choi), 1, static_cast<int>(tau.rows()));
}

CPMap CPMap::trace_map(int d) {
  Mat choi = Mat::Identity(d, d);
  return CPMap(std::move(choi), d, 1, MapKind::cptp);
}

CPMap CPMap::dephasing(int d) {
  std::vector<Mat> kraus;
  kraus.reserve(d);
  for (int n = 1; n <= d; ++n) {
    const Vec e = basis_ket(n, d);
    kraus.push_back(e * e.adjoint());
  }
  return from_kraus(kraus, d, d);
}

Mat CPMap::apply(const Mat& state) const {
  if (state.rows() != in_dim_ || state.cols() != in_dim_)
    throw ArgumentError("CPMap::apply: state dim " + std::to_string(state.rows()) +
                        " != in_dim " + std::to_string(in_dim_));
  Mat out = Mat::Zero(out_dim_, out_dim_);
  for (int a = 0; a < in_dim_; ++a)
    for (int a2 = 0; a2 < in_dim_; ++a2) {
      const Cplx w = state(a, a2);
      if (w == Cplx(0, 0)) continue;
      out.noalias() +=
          w * choi_.block(static_cast<long long>(a) * out_dim_,
                          static_cast<long long>(a2) * out_dim_, out_dim_, out_dim_);
    }
  return out;
}

CPMap CPMap::adjoint() const {
  // J†[(b,a),(b',a')] = J[(a',b'),(a,b)]
  const int din = out_dim_, dout = in_dim_;
  Mat j(static_cast<long long>(din) * dout, static_cast<long long>(din) * dout);
  for (int b = 0; b < din; ++b)
    for (int a = 0; a < dout; ++a)
      for (int b2 = 0; b2 < din; ++b2)
        for (int a2 = 0; a2 < dout; ++a2)
          j(static_cast<long long>(b) * dout + a, static_cast<long long>(b2) * dout + a2) =
              choi_(static_cast<long long>(a2) * out_dim_ + b2,
                    static_cast<long long>(a) * out_dim_ + b);
  // The adjoint of a CP map is CP; kind is re-derived (CPTP ↦ unital, not TP).
  return from_choi(std::move(j), din, dout);
}

CPMap tensor(const CPMap& a, const CPMap& b) {
  const int in = a.in_dim() * b.in_dim();
  const int out = a.out_dim() * b.out_dim();
  if (static_cast<long long>(in) * out > dimension_cap())
    throw TooLargeError("tensor: Choi dimension exceeds cap");
  Mat j(static_cast<long long>(in) * out, static_cast<long long>(in) * out);
  const int ao = a.out_dim(), bo = b.out_dim(), bi = b.in_dim();
  for (int a1 = 0; a1 < a.in_dim(); ++a1)
    for (int a2 = 0; a2 < bi; ++a2)
      for (int b1 = 0; b1 < ao; ++b1)
        for (int b2 = 0; b2 < bo; ++b2) {
          const long long row =
              ((static_cast<long long>(a1) * bi + a2) * ao + b1) * bo + b2;
          for (int a1p = 0; a1p < a.in_dim(); ++a1p)
            for (int a2p = 0; a2p < bi; ++a2p)
              for (int b1p = 0; b1p < ao; ++b1p)
                for (int b2p = 0; b2p < bo; ++b2p) {
                  const long long col =
                      ((static_cast<long long>(a1p) * bi + a2p) * ao + b1p) * bo + b2p;
                  j(row, col) =
                      a.choi()(static_cast<long long>(a1) * ao + b1,
                               static_cast<long long>(a1p) * ao + b1p) *
                      b.choi()(static_cast<long long>(a2) * bo + b2,
                               static_cast<long long>(a2p) * bo + b2p);
                }
        }
  const MapKind kind = std::min(a.kind(), b.kind());
  ChoiValidation rep;
  CPMap t = CPMap::from_choi_declared(std::move(j), in, out, kind, &rep);
  return t;
}

CPMap compose(const CPMap& second, const CPMap& first) {
  if (first.out_dim() != second.in_dim())
    throw ArgumentError("compose: out_dim(first) != in_dim(second)");
  const int in = first.in_dim(), out = second.out_dim();
  Mat j(static_cast<long long>(in) * out, static_cast<long long>(in) * out);
  for (int i = 0; i < in; ++i)
    for (int i2 = 0; i2 < in; ++i2) {
      Mat unit = Mat::Zero(in, in);
      unit(i, i2) = Cplx(1, 0);
      const Mat img = second.apply(first.apply(unit));
      for (int b = 0; b < out; ++b)
        for (int b2 = 0; b2 < out; ++b2)
          j(static_cast<long long>(i) * out + b, static_cast<long long>(i2) * out + b2) =
              img(b, b2);
    }
  const MapKind kind = std::min(first.kind(), second.kind());
  return CPMap::from_choi_declared(std::move(j), in, out, kind);
}

Mat apply_to_subsystem(const CPMap& map, const Mat& state, const std::vector<int>& dims,
                       int position) {
  if (position < 0 || position >= static_cast<int>(dims.size()))
    throw ArgumentError("apply_to_subsystem: position out of range");
  if (dims[position] != map.in_dim())
    throw ArgumentError("apply_to_subsystem: subsystem dim != map in_dim");
  long long left = 1, right = 1, total = 1;
  for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
    total *= dims[i];
    if (i < position) left *= dims[i];
    if (i > position) right *= dims[i];
  }
  if (state.rows() != total || state.cols() != total)
    throw ArgumentError("apply_to_subsystem: state dim does not match profile");

  const int din = map.in_dim(), dout = map.out_dim();
  const long long out_total = left * dout * right;
  Mat out = Mat::Zero(out_total, out_total);
  const Mat& j = map.choi();

  for (long long l = 0; l < left; ++l)
    for (long long l2 = 0; l2 < left; ++l2)
      for (int a = 0; a < din; ++a)
        for (int a2 = 0; a2 < din; ++a2)
          for (long long r = 0; r < right; ++r)
            for (long long r2 = 0; r2 < right; ++r2) {
              const Cplx w = state((l * din + a) * right + r, (l2 * din + a2) * right + r2);
              if (w == Cplx(0, 0)) continue;
              for (int b = 0; b < dout; ++b)
                for (int b2 = 0; b2 < dout; ++b2)
                  out((l * dout + b) * right + r, (l2 * dout + b2) * right + r2) +=
                      w * j(static_cast<long long>(a) * dout + b,
                            static_cast<long long>(a2) * dout + b2);
            }
  return out;
}

PovmReport validate_povm(const Measurement& m, double psd_tol, double sum_tol) {
  PovmReport rep;
  if (m.effects.empty()) return rep;
  const int d = m.dim();
  Mat sum = Mat::Zero(d, d);
  bool all_psd = true;
  for (const auto& e : m.effects) {
    if (e.rows() != d || e.cols() != d)
      throw ArgumentError("validate_povm: effects have inconsistent dims");
    const double lmin = min_eigenvalue(e);
    rep.effect_min_eigs.push_back(lmin);
    const double scale = std::max(1.0, max_abs(e));
    if (lmin < -psd_tol * scale) all_psd = false;
    sum += e;
  }
  rep.sum_defect = max_abs(sum - Mat::Identity(d, d));
  rep.pass = all_psd && rep.sum_defect <= sum_tol;
  return rep;
}

Measurement computational_povm(int d) {
  Measurement m;
  for (int n = 1; n <= d; ++n) {
    const Vec e = basis_ket(n, d);
    m.effects.push_back(e * e.adjoint());
    m.labels.push_back(std::to_string(n));
  }
  return m;
}

SubchannelReport validate_subchannels(const SubchannelCollection& s, double psd_tol,
                                      double tp_tol) {
  SubchannelReport rep;
  if (s.maps.empty()) return rep;
  const int in = s.in_dim(), out = s.out_dim();
  Mat sum = Mat::Zero(static_cast<long long>(in) * out, static_cast<long long>(in) * out);
  rep.min_choi_eig = 0.0;
  bool all_cp = true;
  for (const auto& m : s.maps) {
    if (m.in_dim() != in || m.out_dim() != out)
      throw ArgumentError("validate_subchannels: inconsistent dims");
    const double lmin = min_eigenvalue(m.choi());
    rep.min_choi_eig = std::min(rep.min_choi_eig, lmin);
    if (lmin < -psd_tol * std::max(1.0, max_abs(m.choi()))) all_cp = false;
    sum += m.choi();
  }
  const Mat marg = partial_trace_positions(sum, {in, out}, {0});
  rep.sum_tp_defect = max_abs(marg - Mat::Identity(in, in));
  rep.pass = all_cp && rep.sum_tp_defect <= tp_tol;
  return rep;
}

}  // namespace qrg
