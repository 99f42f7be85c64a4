#include "telesim/nongauss.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace telesim {

namespace {

constexpr double kMinHeralding = 1e-14;

bool is_pa(NgKind kind) {
  return kind == NgKind::symmetric_pa || kind == NgKind::delocalized_pa;
}

}  // namespace

void NgOpSpec::validate() const {
  switch (kind) {
    case NgKind::none:
      return;
    case NgKind::delocalized_ps:
    case NgKind::delocalized_pa:
      if (placement != NgPlacement::before)
        throw PreconditionError(
            "NgOpSpec: delocalized operations act before transmission");
      if (target != NgTarget::both)
        throw PreconditionError(
            "NgOpSpec: delocalized operations involve both modes");
      return;
    case NgKind::scissors:
      if (placement != NgPlacement::after)
        throw PreconditionError(
            "NgOpSpec: scissors act after the state is distributed");
      if (ts <= 0.0 || ts >= 1.0)
        throw PreconditionError("NgOpSpec: ts must be in (0, 1)");
      return;
    case NgKind::catalysis:
      if (tc <= 0.0 || tc >= 1.0)
        throw PreconditionError("NgOpSpec: tc must be in (0, 1)");
      return;
    case NgKind::symmetric_ps:
    case NgKind::symmetric_pa:
      if (target != NgTarget::both)
        throw PreconditionError(
            "NgOpSpec: symmetric subtraction/addition uses both modes");
      return;
  }
}

ResourceType NgOpSpec::resource_type() const {
  return (kind == NgKind::delocalized_ps || kind == NgKind::delocalized_pa)
             ? ResourceType::psi_like
             : ResourceType::phi_like;
}

bool NgOpSpec::idealized_heralding() const {
  switch (kind) {
    case NgKind::symmetric_ps:
    case NgKind::symmetric_pa:
    case NgKind::delocalized_ps:
    case NgKind::delocalized_pa:
      return true;
    default:
      return false;
  }
}

const char* ng_kind_name(NgKind kind) {
  switch (kind) {
    case NgKind::none: return "none";
    case NgKind::symmetric_ps: return "symmetric-ps";
    case NgKind::symmetric_pa: return "symmetric-pa";
    case NgKind::delocalized_ps: return "delocalized-ps";
    case NgKind::delocalized_pa: return "delocalized-pa";
    case NgKind::catalysis: return "catalysis";
    case NgKind::scissors: return "scissors";
  }
  return "none";
}

NgKind ng_kind_from_name(const std::string& name) {
  for (NgKind k : {NgKind::none, NgKind::symmetric_ps, NgKind::symmetric_pa,
                   NgKind::delocalized_ps, NgKind::delocalized_pa,
                   NgKind::catalysis, NgKind::scissors})
    if (name == ng_kind_name(k)) return k;
  throw ConfigError("unknown non-Gaussian operation: " + name);
}

const char* ng_placement_name(NgPlacement placement) {
  return placement == NgPlacement::before ? "before" : "after";
}

const char* ng_target_name(NgTarget target) {
  switch (target) {
    case NgTarget::both: return "both";
    case NgTarget::sender: return "sender";
    case NgTarget::receiver: return "receiver";
  }
  return "both";
}

Matrix catalysis_op(double tc, int d) {
  if (tc <= 0.0 || tc >= 1.0)
    throw PreconditionError("catalysis_op: tc must be in (0, 1)");
  if (d < 1) throw DimensionError("catalysis_op: cutoff must be >= 1");
  Matrix r = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n)
    r(n, n) = std::sqrt(tc) * ((tc - 1.0) / tc * n + 1.0) *
              std::pow(std::sqrt(tc), n);
  return r;
}

Matrix scissors_op(double ts, int d) {
  if (ts <= 0.0 || ts >= 1.0)
    throw PreconditionError("scissors_op: ts must be in (0, 1)");
  if (d < 2) throw DimensionError("scissors_op: cutoff must be >= 2");
  Matrix m = Matrix::Zero(d, d);
  m(0, 0) = std::sqrt(ts);
  m(1, 1) = std::sqrt(1.0 - ts);
  return m;
}

namespace {

// Two-mode operator realizing the requested operation at the given cutoffs
// (already grown for photon addition).
Matrix ng_operator(const NgOpSpec& spec, int d1, int d2) {
  const Matrix i1 = Matrix::Identity(d1, d1);
  const Matrix i2 = Matrix::Identity(d2, d2);
  switch (spec.kind) {
    case NgKind::none:
      return Eigen::kroneckerProduct(i1, i2);
    case NgKind::symmetric_ps:
      return Eigen::kroneckerProduct(annihilation(d1).matrix(),
                                     annihilation(d2).matrix());
    case NgKind::symmetric_pa:
      return Eigen::kroneckerProduct(creation(d1).matrix(),
                                     creation(d2).matrix());
    case NgKind::delocalized_ps:
      return (Eigen::kroneckerProduct(annihilation(d1).matrix(), i2) +
              Eigen::kroneckerProduct(i1, annihilation(d2).matrix())) /
             std::sqrt(2.0);
    case NgKind::delocalized_pa:
      return (Eigen::kroneckerProduct(creation(d1).matrix(), i2) +
              Eigen::kroneckerProduct(i1, creation(d2).matrix())) /
             std::sqrt(2.0);
    case NgKind::catalysis: {
      const Matrix r1 = (spec.target != NgTarget::receiver)
                            ? catalysis_op(spec.tc, d1)
                            : i1;
      const Matrix r2 = (spec.target != NgTarget::sender)
                            ? catalysis_op(spec.tc, d2)
                            : i2;
      return Eigen::kroneckerProduct(r1, r2);
    }
    case NgKind::scissors: {
      const Matrix m1 = (spec.target != NgTarget::receiver)
                            ? scissors_op(spec.ts, d1)
                            : i1;
      const Matrix m2 = (spec.target != NgTarget::sender)
                            ? scissors_op(spec.ts, d2)
                            : i2;
      return Eigen::kroneckerProduct(m1, m2);
    }
  }
  throw PreconditionError("ng_operator: unknown kind");
}

FockDims grown_dims(const FockDims& dims, const NgOpSpec& spec) {
  if (!is_pa(spec.kind)) return dims;
  std::vector<int> d = dims.per_mode();
  for (int& x : d) {
    if (x + 1 > kHardMaxCutoff)
      throw DimensionError("photon addition would exceed the cutoff ceiling");
    x += 1;
  }
  return FockDims(d);
}

}  // namespace

std::pair<FockOperator, NgResult> apply_ng(const FockOperator& rho,
                                           const NgOpSpec& spec) {
  spec.validate();
  if (rho.dims().n_modes() != 2)
    throw DimensionError("apply_ng: expects a two-mode resource");
  NgResult res;
  res.resource_type = spec.resource_type();
  if (spec.kind == NgKind::none) return {rho, res};

  const FockDims dims = grown_dims(rho.dims(), spec);
  const FockOperator grown =
      is_pa(spec.kind) ? pad_cutoff(rho, dims) : rho;
  const Matrix op = ng_operator(spec, dims.dim(0), dims.dim(1));
  Matrix heralded = op * grown.matrix() * op.adjoint();
  res.p_operation = heralded.trace().real();
  if (res.p_operation < kMinHeralding)
    throw HeraldingError("apply_ng: heralding probability vanishes");
  return {FockOperator{dims, heralded / res.p_operation}, res};
}

namespace {

// Mode-local update of a two-mode ket; avoids materializing the Kronecker
// operator inside optimizer loops.
Vector ng_apply_ket(const NgOpSpec& spec, const Vector& v, int d1, int d2) {
  auto at = [&](const Vector& x, int a, int b) -> Complex {
    return x(long(a) * d2 + b);
  };
  Vector out = Vector::Zero(long(d1) * d2);
  switch (spec.kind) {
    case NgKind::none:
      return v;
    case NgKind::symmetric_ps:
      for (int a = 0; a + 1 < d1; ++a)
        for (int b = 0; b + 1 < d2; ++b)
          out(long(a) * d2 + b) = std::sqrt(double(a + 1)) *
                                  std::sqrt(double(b + 1)) *
                                  at(v, a + 1, b + 1);
      return out;
    case NgKind::symmetric_pa:
      for (int a = 1; a < d1; ++a)
        for (int b = 1; b < d2; ++b)
          out(long(a) * d2 + b) = std::sqrt(double(a)) *
                                  std::sqrt(double(b)) * at(v, a - 1, b - 1);
      return out;
    case NgKind::delocalized_ps: {
      const double s = 1.0 / std::sqrt(2.0);
      for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) {
          Complex acc = 0.0;
          if (a + 1 < d1) acc += std::sqrt(double(a + 1)) * at(v, a + 1, b);
          if (b + 1 < d2) acc += std::sqrt(double(b + 1)) * at(v, a, b + 1);
          out(long(a) * d2 + b) = s * acc;
        }
      return out;
    }
    case NgKind::delocalized_pa: {
      const double s = 1.0 / std::sqrt(2.0);
      for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) {
          Complex acc = 0.0;
          if (a > 0) acc += std::sqrt(double(a)) * at(v, a - 1, b);
          if (b > 0) acc += std::sqrt(double(b)) * at(v, a, b - 1);
          out(long(a) * d2 + b) = s * acc;
        }
      return out;
    }
    case NgKind::catalysis: {
      const Matrix r1 = (spec.target != NgTarget::receiver)
                            ? catalysis_op(spec.tc, d1)
                            : Matrix(Matrix::Identity(d1, d1));
      const Matrix r2 = (spec.target != NgTarget::sender)
                            ? catalysis_op(spec.tc, d2)
                            : Matrix(Matrix::Identity(d2, d2));
      for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b)
          out(long(a) * d2 + b) = r1(a, a) * r2(b, b) * at(v, a, b);
      return out;
    }
    case NgKind::scissors: {
      const double m0 = std::sqrt(spec.ts), m1 = std::sqrt(1.0 - spec.ts);
      const bool on1 = spec.target != NgTarget::receiver;
      const bool on2 = spec.target != NgTarget::sender;
      for (int a = 0; a < (on1 ? 2 : d1); ++a)
        for (int b = 0; b < (on2 ? 2 : d2); ++b) {
          const double f1 = on1 ? (a == 0 ? m0 : m1) : 1.0;
          const double f2 = on2 ? (b == 0 ? m0 : m1) : 1.0;
          out(long(a) * d2 + b) = f1 * f2 * at(v, a, b);
        }
      return out;
    }
  }
  throw PreconditionError("ng_apply_ket: unknown kind");
}

}  // namespace

NgResult apply_ng_ensemble(PureEnsemble& ens, const NgOpSpec& spec) {
  spec.validate();
  if (ens.dims.n_modes() != 2)
    throw DimensionError("apply_ng_ensemble: expects a two-mode resource");
  NgResult res;
  res.resource_type = spec.resource_type();
  if (spec.kind == NgKind::none) return res;

  const FockDims dims = grown_dims(ens.dims, spec);
  if (is_pa(spec.kind)) {
    for (Vector& v : ens.vectors) v = pad_ket(v, ens.dims, dims);
    ens.dims = dims;
  }
  double weight = 0.0;
  for (Vector& v : ens.vectors) {
    v = ng_apply_ket(spec, v, dims.dim(0), dims.dim(1));
    weight += v.squaredNorm();
  }
  if (weight < kMinHeralding)
    throw HeraldingError("apply_ng_ensemble: heralding probability vanishes");
  const double scale = 1.0 / std::sqrt(weight);
  std::vector<Vector> kept;
  kept.reserve(ens.vectors.size());
  for (Vector& v : ens.vectors) {
    v *= scale;
    if (v.squaredNorm() > 1e-15) kept.push_back(std::move(v));
  }
  ens.vectors = std::move(kept);
  res.p_operation = weight;
  return res;
}

}  // namespace telesim
