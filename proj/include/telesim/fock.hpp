#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace telesim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr Complex kI{0.0, 1.0};

// Cutoff policy shared across the library. truncation_dim() refuses to pick a
// per-mode cutoff above kMaxCutoff; the +2 refinement pass and photon
// addition may grow a mode up to kHardMaxCutoff.
constexpr int kMaxCutoff = 24;
constexpr int kHardMaxCutoff = 28;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateStateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HeraldingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoOutcomeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-mode cutoff dimensions of a truncated multi-mode Fock space.
/// Mode order is significant: it fixes the index layout of every operator
/// (mode 0 is the slowest-varying index, as in a chained Kronecker product).
class FockDims {
 public:
  FockDims() = default;
  explicit FockDims(std::vector<int> per_mode);
  static FockDims single(int d) { return FockDims({d}); }

  int n_modes() const { return static_cast<int>(per_mode_.size()); }
  int dim(int mode) const { return per_mode_.at(mode); }
  const std::vector<int>& per_mode() const { return per_mode_; }
  long total() const;
  /// Product of the cutoffs of all modes to the right of `mode`.
  long stride(int mode) const;
  FockDims concat(const FockDims& other) const;

  bool operator==(const FockDims& other) const {
    return per_mode_ == other.per_mode_;
  }

 private:
  std::vector<int> per_mode_;
};

/// Dense complex operator on a truncated multi-mode Fock space. Used for
/// density operators, projectors and mode operators alike; the
/// interpretation is up to the caller, checked where contracts demand it.
class FockOperator {
 public:
  FockOperator() = default;
  FockOperator(FockDims dims, Matrix entries);

  const FockDims& dims() const { return dims_; }
  const Matrix& matrix() const { return mat_; }
  Matrix& matrix() { return mat_; }

  Complex trace() const { return mat_.trace(); }
  FockOperator dagger() const { return {dims_, mat_.adjoint()}; }
  bool is_hermitian(double tol = 1e-10) const;
  bool is_idempotent(double tol = 1e-10) const;
  /// tr(rho^2); equals 1 for pure normalized states.
  double purity() const;
  /// Smallest eigenvalue of the Hermitian part (rho + rho^dagger)/2.
  double min_eigenvalue() const;
  bool is_density_operator(double tol_trace = 1e-8,
                           double tol_herm = 1e-10,
                           double tol_eig = 1e-9) const;

  /// Rescales to unit trace. If min_trace > 0, the pre-normalization trace
  /// must not fall below it (truncation leakage guard).
  FockOperator normalized(double min_trace = 0.0) const;

  FockOperator operator*(const FockOperator& rhs) const;
  FockOperator operator+(const FockOperator& rhs) const;
  FockOperator operator*(Complex scale) const;

 private:
  FockDims dims_;
  Matrix mat_;
};

/// |ket><ket| as a density operator.
FockOperator pure_density(const FockDims& dims, const Vector& ket);

FockOperator identity_op(const FockDims& dims);

/// Annihilation operator on a single mode: <n-1| a |n> = sqrt(n).
FockOperator annihilation(int d);
FockOperator creation(int d);
FockOperator number_operator(int d);

/// Matrix elements <m| D(xi) |n> of the displacement operator
/// D(xi) = exp(xi a^dag - xi^* a), evaluated with the associated-Laguerre
/// closed form. These are the exact infinite-dimensional elements projected
/// onto the truncated basis, which is what characteristic-function traces
/// against truncated states require.
Matrix displacement_matrix(Complex xi, int d);

/// Alternative route: matrix exponential of the truncated generator.
/// Exactly unitary on the truncated space; differs from the closed form
/// only near the truncation edge.
Matrix displacement_matrix_expm(Complex xi, int d);

FockOperator displacement(Complex xi, int d);

/// Kronecker composition; dims are concatenated in argument order.
FockOperator tensor(const FockOperator& a, const FockOperator& b);

/// Reduced operator on the kept modes (original order preserved).
FockOperator partial_trace(const FockOperator& rho,
                           const std::vector<int>& keep);

/// Overlap fidelity Re tr(rho_in rho_out) for a pure rho_in, clamped to
/// [0, 1]. Requires tr(rho_in^2) > 1 - 1e-6.
double fidelity_pure(const FockOperator& rho_in, const FockOperator& rho_out);

/// Embeds a single-mode operator into a multi-mode space (identity on the
/// other modes).
FockOperator lift_to_mode(const Matrix& op, const FockDims& dims, int mode);

/// Zero-pads an operator or ket to larger per-mode cutoffs.
FockOperator pad_cutoff(const FockOperator& op, const FockDims& new_dims);
Vector pad_ket(const Vector& ket, const FockDims& dims,
               const FockDims& new_dims);

/// Swaps two modes of a ket (used to reorder targets for comparison).
Vector swap_modes(const Vector& ket, const FockDims& dims, int mode_a,
                  int mode_b);

double factorial_log(int n);

}  // namespace telesim
