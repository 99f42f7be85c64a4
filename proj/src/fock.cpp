#include "telesim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace telesim {

FockDims::FockDims(std::vector<int> per_mode) : per_mode_(std::move(per_mode)) {
  if (per_mode_.empty()) throw DimensionError("FockDims: no modes given");
  for (int d : per_mode_)
    if (d < 1) throw DimensionError("FockDims: every cutoff must be >= 1");
}

long FockDims::total() const {
  long t = 1;
  for (int d : per_mode_) t *= d;
  return t;
}

long FockDims::stride(int mode) const {
  long s = 1;
  for (int m = mode + 1; m < n_modes(); ++m) s *= per_mode_[m];
  return s;
}

FockDims FockDims::concat(const FockDims& other) const {
  std::vector<int> dims = per_mode_;
  dims.insert(dims.end(), other.per_mode_.begin(), other.per_mode_.end());
  return FockDims(dims);
}

FockOperator::FockOperator(FockDims dims, Matrix entries)
    : dims_(std::move(dims)), mat_(std::move(entries)) {
  if (mat_.rows() != dims_.total() || mat_.cols() != dims_.total())
    throw DimensionError("FockOperator: matrix shape does not match dims");
}

bool FockOperator::is_hermitian(double tol) const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool FockOperator::is_idempotent(double tol) const {
  return (mat_ * mat_ - mat_).cwiseAbs().maxCoeff() <= tol;
}

double FockOperator::purity() const {
  return (mat_ * mat_).trace().real();
}

double FockOperator::min_eigenvalue() const {
  Matrix herm = 0.5 * (mat_ + mat_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm,
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool FockOperator::is_density_operator(double tol_trace, double tol_herm,
                                       double tol_eig) const {
  if (!is_hermitian(tol_herm)) return false;
  if (std::abs(trace().real() - 1.0) > tol_trace ||
      std::abs(trace().imag()) > tol_trace)
    return false;
  return min_eigenvalue() >= -tol_eig;
}

FockOperator FockOperator::normalized(double min_trace) const {
  const double tr = trace().real();
  if (tr <= 0.0)
    throw DegenerateStateError("normalized: non-positive trace");
  if (min_trace > 0.0 && tr < min_trace)
    throw TruncationError("normalized: pre-normalization trace " +
                          std::to_string(tr) + " below guard " +
                          std::to_string(min_trace));
  return {dims_, mat_ / tr};
}

FockOperator FockOperator::operator*(const FockOperator& rhs) const {
  if (!(dims_ == rhs.dims_))
    throw DimensionError("FockOperator: dims mismatch in product");
  return {dims_, mat_ * rhs.mat_};
}

FockOperator FockOperator::operator+(const FockOperator& rhs) const {
  if (!(dims_ == rhs.dims_))
    throw DimensionError("FockOperator: dims mismatch in sum");
  return {dims_, mat_ + rhs.mat_};
}

FockOperator FockOperator::operator*(Complex scale) const {
  return {dims_, mat_ * scale};
}

FockOperator pure_density(const FockDims& dims, const Vector& ket) {
  if (ket.size() != dims.total())
    throw DimensionError("pure_density: ket length does not match dims");
  return {dims, ket * ket.adjoint()};
}

FockOperator identity_op(const FockDims& dims) {
  return {dims, Matrix::Identity(dims.total(), dims.total())};
}

FockOperator annihilation(int d) {
  if (d < 1) throw DimensionError("annihilation: cutoff must be >= 1");
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return {FockDims::single(d), a};
}

FockOperator creation(int d) { return annihilation(d).dagger(); }

FockOperator number_operator(int d) {
  if (d < 1) throw DimensionError("number_operator: cutoff must be >= 1");
  Matrix n = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = double(k);
  return {FockDims::single(d), n};
}

double factorial_log(int n) {
  static std::vector<double> table = [] {
    std::vector<double> t(256, 0.0);
    for (int k = 1; k < 256; ++k) t[k] = t[k - 1] + std::log(double(k));
    return t;
  }();
  if (n < 0) throw DimensionError("factorial_log: negative argument");
  if (n < 256) return table[n];
  return std::lgamma(double(n) + 1.0);
}

Matrix displacement_matrix(Complex xi, int d) {
  if (d < 1) throw DimensionError("displacement: cutoff must be >= 1");
  const double x = std::norm(xi);
  const double gauss = std::exp(-0.5 * x);
  Matrix D(d, d);
  // <m|D|n> for m >= n: sqrt(n!/m!) xi^(m-n) e^(-x/2) L_n^(m-n)(x), and the
  // m < n elements follow from D(xi)^dag = D(-xi). Laguerre values come from
  // the three-term recurrence in n at fixed offset k = m - n.
  for (int k = 0; k < d; ++k) {
    // Column of associated Laguerre values L_n^(k)(x), n = 0..d-1-k.
    double lag_prev = 1.0;                // L_0^(k)
    double lag = 1.0 + double(k) - x;     // L_1^(k)
    const Complex xik = std::pow(xi, k);
    const Complex xikc = std::pow(-std::conj(xi), k);
    for (int n = 0; n + k < d; ++n) {
      double lagn;
      if (n == 0) {
        lagn = lag_prev;
      } else if (n == 1) {
        lagn = lag;
      } else {
        const double next =
            ((2.0 * (n - 1) + k + 1.0 - x) * lag - (n - 1.0 + k) * lag_prev) /
            double(n);
        lag_prev = lag;
        lag = next;
        lagn = next;
      }
      const double amp =
          std::exp(0.5 * (factorial_log(n) - factorial_log(n + k))) * gauss;
      D(n + k, n) = amp * xik * lagn;
      D(n, n + k) = amp * xikc * lagn;
    }
  }
  return D;
}

Matrix displacement_matrix_expm(Complex xi, int d) {
  if (d < 1) throw DimensionError("displacement: cutoff must be >= 1");
  Matrix gen = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    const double s = std::sqrt(double(n));
    gen(n, n - 1) = xi * s;                // xi a^dag
    gen(n - 1, n) = -std::conj(xi) * s;    // -xi^* a
  }
  return gen.exp();
}

FockOperator displacement(Complex xi, int d) {
  return {FockDims::single(d), displacement_matrix(xi, d)};
}

FockOperator tensor(const FockOperator& a, const FockOperator& b) {
  Matrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return {a.dims().concat(b.dims()), std::move(m)};
}

FockOperator partial_trace(const FockOperator& rho,
                           const std::vector<int>& keep) {
  const FockDims& dims = rho.dims();
  std::vector<bool> kept(dims.n_modes(), false);
  for (int m : keep) {
    if (m < 0 || m >= dims.n_modes())
      throw DimensionError("partial_trace: mode index out of range");
    kept[m] = true;
  }
  std::vector<int> keep_sorted, traced;
  std::vector<int> kept_dims;
  for (int m = 0; m < dims.n_modes(); ++m) {
    if (kept[m]) {
      keep_sorted.push_back(m);
      kept_dims.push_back(dims.dim(m));
    } else {
      traced.push_back(m);
    }
  }
  if (keep_sorted.empty())
    throw DimensionError("partial_trace: must keep at least one mode");

  FockDims out_dims(kept_dims);
  Matrix out = Matrix::Zero(out_dims.total(), out_dims.total());

  const long traced_total = dims.total() / out_dims.total();
  // Decompose flat indices as (kept multi-index, traced multi-index).
  std::vector<long> keep_stride(keep_sorted.size()),
      traced_stride(traced.size());
  for (size_t i = 0; i < keep_sorted.size(); ++i)
    keep_stride[i] = dims.stride(keep_sorted[i]);
  for (size_t i = 0; i < traced.size(); ++i)
    traced_stride[i] = dims.stride(traced[i]);

  auto flat = [&](long kept_flat, long traced_flat) {
    long idx = 0;
    for (size_t i = keep_sorted.size(); i-- > 0;) {
      idx += (kept_flat % out_dims.dim(int(i))) * keep_stride[i];
      kept_flat /= out_dims.dim(int(i));
    }
    for (size_t i = traced.size(); i-- > 0;) {
      const int d = dims.dim(traced[i]);
      idx += (traced_flat % d) * traced_stride[i];
      traced_flat /= d;
    }
    return idx;
  };
  for (long r = 0; r < out_dims.total(); ++r) {
    for (long c = 0; c < out_dims.total(); ++c) {
      Complex acc = 0.0;
      for (long t = 0; t < traced_total; ++t)
        acc += rho.matrix()(flat(r, t), flat(c, t));
      out(r, c) = acc;
    }
  }
  return {out_dims, std::move(out)};
}

double fidelity_pure(const FockOperator& rho_in, const FockOperator& rho_out) {
  if (!(rho_in.dims() == rho_out.dims()))
    throw DimensionError("fidelity_pure: dims mismatch");
  if (rho_in.purity() <= 1.0 - 1e-6)
    throw PreconditionError("fidelity_pure: rho_in is not pure");
  const Complex f = (rho_in.matrix() * rho_out.matrix()).trace();
  if (std::abs(f.imag()) >= 1e-8)
    throw PreconditionError("fidelity_pure: imaginary residue " +
                            std::to_string(f.imag()));
  return std::clamp(f.real(), 0.0, 1.0);
}

FockOperator lift_to_mode(const Matrix& op, const FockDims& dims, int mode) {
  if (mode < 0 || mode >= dims.n_modes())
    throw DimensionError("lift_to_mode: mode index out of range");
  if (op.rows() != dims.dim(mode))
    throw DimensionError("lift_to_mode: operator does not match mode cutoff");
  Matrix m = Matrix::Identity(1, 1);
  for (int k = 0; k < dims.n_modes(); ++k) {
    const Matrix& factor =
        (k == mode) ? op
                    : Matrix(Matrix::Identity(dims.dim(k), dims.dim(k)));
    m = Eigen::kroneckerProduct(m, factor).eval();
  }
  return {dims, std::move(m)};
}

FockOperator pad_cutoff(const FockOperator& op, const FockDims& new_dims) {
  const FockDims& old = op.dims();
  if (new_dims.n_modes() != old.n_modes())
    throw DimensionError("pad_cutoff: mode count mismatch");
  for (int m = 0; m < old.n_modes(); ++m)
    if (new_dims.dim(m) < old.dim(m))
      throw DimensionError("pad_cutoff: cannot shrink a mode");
  Matrix out = Matrix::Zero(new_dims.total(), new_dims.total());
  const long n_old = old.total();
  auto remap = [&](long flat) {
    long idx = 0;
    for (int m = old.n_modes() - 1; m >= 0; --m) {
      idx += (flat % old.dim(m)) * new_dims.stride(m);
      flat /= old.dim(m);
    }
    return idx;
  };
  std::vector<long> map(n_old);
  for (long i = 0; i < n_old; ++i) map[i] = remap(i);
  for (long r = 0; r < n_old; ++r)
    for (long c = 0; c < n_old; ++c)
      out(map[r], map[c]) = op.matrix()(r, c);
  return {new_dims, std::move(out)};
}

Vector pad_ket(const Vector& ket, const FockDims& dims,
               const FockDims& new_dims) {
  if (ket.size() != dims.total())
    throw DimensionError("pad_ket: ket length does not match dims");
  if (new_dims.n_modes() != dims.n_modes())
    throw DimensionError("pad_ket: mode count mismatch");
  Vector out = Vector::Zero(new_dims.total());
  for (long i = 0; i < ket.size(); ++i) {
    long flat = i, idx = 0;
    for (int m = dims.n_modes() - 1; m >= 0; --m) {
      idx += (flat % dims.dim(m)) * new_dims.stride(m);
      flat /= dims.dim(m);
    }
    out(idx) = ket(i);
  }
  return out;
}

Vector swap_modes(const Vector& ket, const FockDims& dims, int mode_a,
                  int mode_b) {
  std::vector<int> swapped = dims.per_mode();
  std::swap(swapped[mode_a], swapped[mode_b]);
  FockDims out_dims(swapped);
  Vector out(ket.size());
  std::vector<long> digits(dims.n_modes());
  for (long i = 0; i < ket.size(); ++i) {
    long flat = i;
    for (int m = dims.n_modes() - 1; m >= 0; --m) {
      digits[m] = flat % dims.dim(m);
      flat /= dims.dim(m);
    }
    std::swap(digits[mode_a], digits[mode_b]);
    long idx = 0;
    for (int m = 0; m < dims.n_modes(); ++m)
      idx += digits[m] * out_dims.stride(m);
    out(idx) = ket(i);
  }
  return out;
}

}  // namespace telesim
