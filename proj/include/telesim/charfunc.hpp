#pragma once

#include <functional>

#include "telesim/fock.hpp"
#include "telesim/loss.hpp"

namespace telesim {

using CF1 = std::function<Complex(Complex)>;
using CF2 = std::function<Complex(Complex, Complex)>;

/// Two-mode Gaussian characteristic function
///   chi(xi1, xi2) = exp(c11 |xi1|^2 + c22 |xi2|^2 + c12 xi1 xi2
///                       + c12c xi1^* xi2^*).
/// Normalized by construction: chi(0, 0) = 1.
struct GaussianCF {
  double c11 = 0.0, c22 = 0.0, c12 = 0.0, c12c = 0.0;

  Complex eval(Complex xi1, Complex xi2) const;
  /// Coefficient w of exp(w |xi|^2) in the averaged-channel factor
  /// chi(g xi^*, xi); the dependence on arg(xi) cancels.
  double averaged_weight_coeff(double g) const {
    return c11 * g * g + c22 + (c12 + c12c) * g;
  }
};

GaussianCF tmsv_cf(double lambda);
GaussianCF tmsv_lossy_cf(double lambda, const ChannelSpec& chan);

Complex chi_tmsv(Complex xi1, Complex xi2, double lambda);
Complex chi_tmsv_lossy(Complex xi1, Complex xi2, double lambda,
                       const ChannelSpec& chan);

/// Numeric characteristic function tr{rho D(xi_1) x D(xi_2) x ...} of a
/// truncated state; one xi per mode.
Complex chi_state(const FockOperator& rho, const std::vector<Complex>& xis);
Complex chi_state(const FockOperator& rho, Complex xi);

/// Analytic <cat_bra| D(xi) |cat_ket> for ideal (untruncated) cat states;
/// used as a cross-check oracle for chi_state.
Complex cat_pair_cf(double alpha, bool bra_even, bool ket_even, Complex xi);

/// Output CF of the averaged measurement-and-displacement channel acting on
/// a single teleported mode: chi_in(g xi) * chi_tmsv_lossy(g xi^*, xi).
Complex chi_out_single(Complex xi, const CF1& chi_in, double lambda, double g,
                       const ChannelSpec& chan);
CF1 make_chi_out_single(CF1 chi_in, double lambda, double g, ChannelSpec chan);

/// Two-mode variant; `teleported_arg` selects which argument (0 or 1) passes
/// through the channel, the other mode is untouched.
Complex chi_out_hybrid(Complex xi_a, Complex xi_b, const CF2& chi_in,
                       double lambda, double g, const ChannelSpec& chan,
                       int teleported_arg);
CF2 make_chi_out_hybrid(CF2 chi_in, double lambda, double g, ChannelSpec chan,
                        int teleported_arg);

/// Polar quadrature over a complex plane: Gauss-Legendre radial nodes on
/// [0, radius] (weights include the r of d^2xi = r dr dphi) and uniform
/// angular nodes. Doubling both counts must not move any reported fidelity
/// by more than 1e-4; callers opting into Convergence::doubled get that
/// check enforced.
struct QuadratureGrid {
  double radius = 6.0;
  std::vector<double> r, w;
  int n_angular = 64;

  static QuadratureGrid polar(double radius, int n_radial, int n_angular);
  /// Sized from the largest mean photon number of the states involved and
  /// the largest Fock harmonic (d_max - 1) the integrands carry.
  static QuadratureGrid standard(double nbar_max, int d_max);
  QuadratureGrid doubled() const;
};

enum class Convergence { off, doubled };

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre_nodes(int n, std::vector<double>& x,
                          std::vector<double>& w);

/// (1/pi) int d^2xi chi_in(xi) chi_out(-xi), clamped to [0, 1].
double fidelity_cf_single(const CF1& chi_in, const CF1& chi_out,
                          const QuadratureGrid& grid,
                          Convergence check = Convergence::off);

/// (1/pi^2) iint d^2xi_a d^2xi_b chi_in(xi_a, xi_b) chi_out(-xi_a, -xi_b)
/// by direct tensor-product quadrature. Quadratically many nodes: meant for
/// coarse cross-checks of the factorized route, not production sweeps.
double fidelity_cf_hybrid(const CF2& chi_in, const CF2& chi_out,
                          const QuadratureGrid& grid_a,
                          const QuadratureGrid& grid_b,
                          Convergence check = Convergence::off);

// ---------------------------------------------------------------------------
// Factorized evaluation of the averaged-channel fidelity.
//
// Every integrand here is a bilinear combination of displacement matrix
// elements <p|D(xi)|q> = R[p,q](|xi|) e^{i(p-q) arg xi}, and the channel
// weight chi'(g xi^*, xi) is a function of |xi| alone. The angular integral
// is therefore exact (harmonic orthogonality) and only the radial quadrature
// remains. A PairTensor collects the coefficients:
//
//   F = sum_{pq,p'q'} PT[(p,q),(p',q')] *
//       (1/pi) int d^2xi <p|D(xi)|q> <p'|D(-g xi)|q'> e^{w |xi|^2}.
// ---------------------------------------------------------------------------

/// <p|D(r)|q> for real r (the radial profile of the matrix elements).
Eigen::MatrixXd displacement_radial(double r, int d);

struct PairTensor {
  int d = 0;      // single-mode cutoff of the teleported mode
  Matrix coeff;   // (d^2) x (d^2), flat index p*d + q
};

/// Pure two-mode input; the teleported mode's expansion coefficients are
/// contracted against the spectator's exact Fock-basis Parseval identity.
PairTensor pair_tensor_pure(const Vector& psi, const FockDims& dims,
                            int teleported_mode);
/// Single-mode input state.
PairTensor pair_tensor_single(const FockOperator& rho);

/// F for the teleported mode through the averaged CV-BSM channel at
/// (lambda, g, channel), via the radial-reduced quadrature.
double cvbsm_pair_fidelity(const PairTensor& pt, double lambda, double g,
                           const ChannelSpec& chan, const QuadratureGrid& grid,
                           Convergence check = Convergence::off);

// ---------------------------------------------------------------------------
// Fock-space reconstruction of the averaged channel (the cross-check route).
// ---------------------------------------------------------------------------

/// Superoperator matrix S[(j,k),(m,n)] (flat index j*d + k) with
/// E(rho)(j,k) = sum_mn S[(j,k),(m,n)] rho(m,n); reconstructed element-wise
/// from the output characteristic function. Trace-preserving on the
/// truncated space within 2e-3 and completely positive up to Choi
/// eigenvalue -1e-3 for adequately sized grids; check helpers below.
Matrix cvbsm_supermatrix(double lambda, double g, const ChannelSpec& chan,
                         int d, const QuadratureGrid& grid);

FockOperator apply_supermatrix_on_mode(const Matrix& s, const FockOperator& rho,
                                       int mode);

/// max over the input sector m, n < d_input of |tr E(|m><n|) - delta_mn|.
/// Columns near the reconstruction cutoff always leak (the channel adds
/// noise), so trace preservation is judged on the sector states occupy;
/// d_input <= 0 checks every column.
double supermatrix_trace_defect(const Matrix& s, int d_input = -1);
/// Smallest eigenvalue of the (unnormalized) Choi matrix
/// C[(m,j),(n,k)] = S[(j,k),(m,n)].
double choi_min_eigenvalue(const Matrix& s);

}  // namespace telesim
