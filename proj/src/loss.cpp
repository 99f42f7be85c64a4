#include "telesim/loss.hpp"

#include <cmath>

namespace telesim {

void ChannelSpec::validate() const {
  if (t1 <= 0.0 || t1 > 1.0 || t2 <= 0.0 || t2 > 1.0)
    throw PreconditionError("ChannelSpec: transmissivities must be in (0, 1]");
}

ChannelSpec ChannelSpec::symmetric_from_total_db(double total_loss_db) {
  if (total_loss_db < 0.0)
    throw PreconditionError("ChannelSpec: loss in dB must be >= 0");
  const double t = db_to_transmissivity(total_loss_db / 2.0);
  return {t, t};
}

ChannelSpec ChannelSpec::from_db(double loss1_db, double loss2_db) {
  return {db_to_transmissivity(loss1_db), db_to_transmissivity(loss2_db)};
}

double db_to_transmissivity(double loss_db) {
  if (loss_db < 0.0)
    throw PreconditionError("db_to_transmissivity: loss must be >= 0 dB");
  return std::pow(10.0, -loss_db / 10.0);
}

double transmissivity_to_db(double t) {
  if (t <= 0.0 || t > 1.0)
    throw PreconditionError("transmissivity_to_db: t must be in (0, 1]");
  return -10.0 * std::log10(t);
}

double squeeze_db_to_r(double r_db) {
  if (r_db <= 0.0)
    throw PreconditionError("squeeze_db_to_r: squeezing must be > 0 dB");
  return r_db * std::log(10.0) / 20.0;
}

double r_to_squeeze_db(double r) { return 20.0 * r / std::log(10.0); }

std::vector<Matrix> kraus_set(double t, int d) {
  if (t <= 0.0 || t > 1.0)
    throw PreconditionError("kraus_set: t must be in (0, 1]");
  if (d < 1) throw DimensionError("kraus_set: cutoff must be >= 1");
  // G_l |n> = sqrt(C(n,l) (1-t)^l t^(n-l)) |n-l>
  std::vector<Matrix> ops;
  ops.reserve(d);
  const double log_t = std::log(t);
  const double log_1mt = (t < 1.0) ? std::log(1.0 - t) : 0.0;
  for (int l = 0; l < d; ++l) {
    Matrix g = Matrix::Zero(d, d);
    for (int n = l; n < d; ++n) {
      if (t == 1.0 && l > 0) break;
      const double log_binom =
          factorial_log(n) - factorial_log(l) - factorial_log(n - l);
      g(n - l, n) = std::exp(
          0.5 * (log_binom + double(l) * log_1mt + double(n - l) * log_t));
    }
    ops.push_back(std::move(g));
  }
  return ops;
}

FockOperator apply_loss(const FockOperator& rho, int mode, double t) {
  const FockDims& dims = rho.dims();
  if (mode < 0 || mode >= dims.n_modes())
    throw DimensionError("apply_loss: mode index out of range");
  const auto kraus = kraus_set(t, dims.dim(mode));
  Matrix out = Matrix::Zero(dims.total(), dims.total());
  for (const Matrix& g : kraus) {
    const FockOperator lifted = lift_to_mode(g, dims, mode);
    out.noalias() += lifted.matrix() * rho.matrix() * lifted.matrix().adjoint();
  }
  return {dims, std::move(out)};
}

double PureEnsemble::total_weight() const {
  double w = 0.0;
  for (const auto& v : vectors) w += v.squaredNorm();
  return w;
}

FockOperator PureEnsemble::to_density() const {
  Matrix m = Matrix::Zero(dims.total(), dims.total());
  for (const auto& v : vectors) m.noalias() += v * v.adjoint();
  return {dims, std::move(m)};
}

PureEnsemble apply_loss_ensemble(const PureEnsemble& in, int mode, double t,
                                 double weight_floor) {
  const int d = in.dims.dim(mode);
  const auto kraus = kraus_set(t, d);
  const long stride = in.dims.stride(mode);
  const long total = in.dims.total();
  const long outer = total / (long(d) * stride);

  PureEnsemble out;
  out.dims = in.dims;
  for (const Vector& v : in.vectors) {
    for (int l = 0; l < d; ++l) {
      const Matrix& g = kraus[l];
      Vector w = Vector::Zero(total);
      // G_l is a single sub-diagonal band: |n-l><n|.
      for (long o = 0; o < outer; ++o) {
        const long base = o * d * stride;
        for (int n = l; n < d; ++n) {
          const Complex c = g(n - l, n);
          if (c == 0.0) continue;
          w.segment(base + (n - l) * stride, stride) +=
              c * v.segment(base + n * stride, stride);
        }
      }
      if (w.squaredNorm() > weight_floor) out.vectors.push_back(std::move(w));
    }
  }
  return out;
}

}  // namespace telesim
