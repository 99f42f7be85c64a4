#include "telesim/charfunc.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace telesim {

namespace {

// Compensated accumulator for the node-level sums; quadrature results must
// not depend on worker count, so all summation orders are fixed and the
// long sums carry a correction term.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

struct KahanC {
  Kahan re, im;
  void add(Complex z) {
    re.add(z.real());
    im.add(z.imag());
  }
  Complex value() const { return {re.sum, im.sum}; }
};

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

void gauss_legendre_nodes(int n, std::vector<double>& x,
                          std::vector<double>& w) {
  gauss_legendre(n, x, w);
}

Complex GaussianCF::eval(Complex xi1, Complex xi2) const {
  const Complex arg = c11 * std::norm(xi1) + c22 * std::norm(xi2) +
                      c12 * xi1 * xi2 +
                      c12c * std::conj(xi1) * std::conj(xi2);
  return std::exp(arg);
}

GaussianCF tmsv_cf(double lambda) {
  if (lambda < 0.0 || lambda >= 1.0)
    throw PreconditionError("tmsv_cf: lambda must be in [0, 1)");
  GaussianCF cf;
  const double den = 1.0 - lambda * lambda;
  cf.c11 = cf.c22 = -0.5 * (1.0 + lambda * lambda) / den;
  cf.c12 = cf.c12c = lambda / den;
  return cf;
}

GaussianCF tmsv_lossy_cf(double lambda, const ChannelSpec& chan) {
  chan.validate();
  const GaussianCF base = tmsv_cf(lambda);
  GaussianCF cf;
  cf.c11 = -0.5 * (1.0 - chan.t1) + base.c11 * chan.t1;
  cf.c22 = -0.5 * (1.0 - chan.t2) + base.c22 * chan.t2;
  cf.c12 = base.c12 * std::sqrt(chan.t1 * chan.t2);
  cf.c12c = base.c12c * std::sqrt(chan.t1 * chan.t2);
  return cf;
}

Complex chi_tmsv(Complex xi1, Complex xi2, double lambda) {
  return tmsv_cf(lambda).eval(xi1, xi2);
}

Complex chi_tmsv_lossy(Complex xi1, Complex xi2, double lambda,
                       const ChannelSpec& chan) {
  return tmsv_lossy_cf(lambda, chan).eval(xi1, xi2);
}

Complex chi_state(const FockOperator& rho, const std::vector<Complex>& xis) {
  const FockDims& dims = rho.dims();
  if (int(xis.size()) != dims.n_modes())
    throw DimensionError("chi_state: one xi per mode required");
  Matrix d = Matrix::Identity(1, 1);
  for (int m = 0; m < dims.n_modes(); ++m)
    d = Eigen::kroneckerProduct(d, displacement_matrix(xis[m], dims.dim(m)))
            .eval();
  return (rho.matrix() * d).trace();
}

Complex chi_state(const FockOperator& rho, Complex xi) {
  return chi_state(rho, std::vector<Complex>{xi});
}

namespace {

// <beta| D(xi) |gamma> for real coherent amplitudes beta, gamma.
Complex coherent_pair_displaced(double beta, double gamma, Complex xi) {
  const Complex arg = -0.5 * (beta * beta + gamma * gamma + std::norm(xi)) +
                      beta * gamma + beta * xi - gamma * std::conj(xi);
  return std::exp(arg);
}

}  // namespace

Complex cat_pair_cf(double alpha, bool bra_even, bool ket_even, Complex xi) {
  const double e2 = std::exp(-2.0 * alpha * alpha);
  const double nb = 2.0 * (1.0 + (bra_even ? e2 : -e2));
  const double nk = 2.0 * (1.0 + (ket_even ? e2 : -e2));
  Complex acc = 0.0;
  for (int sb : {+1, -1}) {
    for (int sk : {+1, -1}) {
      const double cb = (sb == 1 || bra_even) ? 1.0 : -1.0;
      const double ck = (sk == 1 || ket_even) ? 1.0 : -1.0;
      acc += cb * ck * coherent_pair_displaced(sb * alpha, sk * alpha, xi);
    }
  }
  return acc / std::sqrt(nb * nk);
}

Complex chi_out_single(Complex xi, const CF1& chi_in, double lambda, double g,
                       const ChannelSpec& chan) {
  if (g <= 0.0) throw PreconditionError("chi_out_single: gain must be > 0");
  return chi_in(g * xi) * chi_tmsv_lossy(g * std::conj(xi), xi, lambda, chan);
}

CF1 make_chi_out_single(CF1 chi_in, double lambda, double g,
                        ChannelSpec chan) {
  return [chi_in = std::move(chi_in), lambda, g, chan](Complex xi) {
    return chi_out_single(xi, chi_in, lambda, g, chan);
  };
}

Complex chi_out_hybrid(Complex xi_a, Complex xi_b, const CF2& chi_in,
                       double lambda, double g, const ChannelSpec& chan,
                       int teleported_arg) {
  if (g <= 0.0) throw PreconditionError("chi_out_hybrid: gain must be > 0");
  if (teleported_arg == 0)
    return chi_in(g * xi_a, xi_b) *
           chi_tmsv_lossy(g * std::conj(xi_a), xi_a, lambda, chan);
  if (teleported_arg == 1)
    return chi_in(xi_a, g * xi_b) *
           chi_tmsv_lossy(g * std::conj(xi_b), xi_b, lambda, chan);
  throw PreconditionError("chi_out_hybrid: teleported_arg must be 0 or 1");
}

CF2 make_chi_out_hybrid(CF2 chi_in, double lambda, double g, ChannelSpec chan,
                        int teleported_arg) {
  return [chi_in = std::move(chi_in), lambda, g, chan,
          teleported_arg](Complex a, Complex b) {
    return chi_out_hybrid(a, b, chi_in, lambda, g, chan, teleported_arg);
  };
}

QuadratureGrid QuadratureGrid::polar(double radius, int n_radial,
                                     int n_angular) {
  if (radius <= 0.0 || n_radial < 2 || n_angular < 4)
    throw PreconditionError("QuadratureGrid: degenerate grid");
  QuadratureGrid grid;
  grid.radius = radius;
  grid.n_angular = n_angular;
  std::vector<double> x, w;
  gauss_legendre(n_radial, x, w);
  grid.r.resize(n_radial);
  grid.w.resize(n_radial);
  for (int i = 0; i < n_radial; ++i) {
    const double rr = 0.5 * radius * (x[i] + 1.0);
    grid.r[i] = rr;
    grid.w[i] = 0.5 * radius * w[i] * rr;  // includes the r of r dr dphi
  }
  return grid;
}

QuadratureGrid QuadratureGrid::standard(double nbar_max, int d_max) {
  const double radius = std::max(6.0, 3.0 * std::sqrt(2.0 * nbar_max));
  const int n_radial = std::max(48, int(std::ceil(4.0 * radius)));
  int n_angular = std::max(64, 4 * d_max + 8);
  if (n_angular % 2) ++n_angular;
  return polar(radius, n_radial, n_angular);
}

QuadratureGrid QuadratureGrid::doubled() const {
  return polar(radius, int(r.size()) * 2, n_angular * 2);
}

namespace {

double fidelity_cf_single_once(const CF1& chi_in, const CF1& chi_out,
                               const QuadratureGrid& grid) {
  KahanC acc;
  const double wphi = 2.0 * M_PI / grid.n_angular;
  for (size_t i = 0; i < grid.r.size(); ++i) {
    KahanC ring;
    for (int k = 0; k < grid.n_angular; ++k) {
      const Complex xi = std::polar(grid.r[i], wphi * k);
      ring.add(chi_in(xi) * chi_out(-xi));
    }
    acc.add(ring.value() * (grid.w[i] * wphi));
  }
  const Complex total = acc.value() / M_PI;
  if (std::abs(total.imag()) > 1e-6)
    throw ConvergenceError("fidelity_cf_single: imaginary residue " +
                           std::to_string(total.imag()));
  return std::clamp(total.real(), 0.0, 1.0);
}

double fidelity_cf_hybrid_once(const CF2& chi_in, const CF2& chi_out,
                               const QuadratureGrid& ga,
                               const QuadratureGrid& gb) {
  const double wa = 2.0 * M_PI / ga.n_angular;
  const double wb = 2.0 * M_PI / gb.n_angular;
  KahanC acc;
  for (size_t ia = 0; ia < ga.r.size(); ++ia) {
    for (int ka = 0; ka < ga.n_angular; ++ka) {
      const Complex xa = std::polar(ga.r[ia], wa * ka);
      KahanC inner;
      for (size_t ib = 0; ib < gb.r.size(); ++ib) {
        KahanC ring;
        for (int kb = 0; kb < gb.n_angular; ++kb) {
          const Complex xb = std::polar(gb.r[ib], wb * kb);
          ring.add(chi_in(xa, xb) * chi_out(-xa, -xb));
        }
        inner.add(ring.value() * (gb.w[ib] * wb));
      }
      acc.add(inner.value() * (ga.w[ia] * wa));
    }
  }
  const Complex total = acc.value() / (M_PI * M_PI);
  if (std::abs(total.imag()) > 1e-5)
    throw ConvergenceError("fidelity_cf_hybrid: imaginary residue " +
                           std::to_string(total.imag()));
  return std::clamp(total.real(), 0.0, 1.0);
}

}  // namespace

double fidelity_cf_single(const CF1& chi_in, const CF1& chi_out,
                          const QuadratureGrid& grid, Convergence check) {
  const double f = fidelity_cf_single_once(chi_in, chi_out, grid);
  if (check == Convergence::off) return f;
  const double f2 = fidelity_cf_single_once(chi_in, chi_out, grid.doubled());
  if (std::abs(f2 - f) > 1e-4)
    throw ConvergenceError(
        "fidelity_cf_single: doubling moved the result by " +
        std::to_string(std::abs(f2 - f)));
  return f2;
}

double fidelity_cf_hybrid(const CF2& chi_in, const CF2& chi_out,
                          const QuadratureGrid& grid_a,
                          const QuadratureGrid& grid_b, Convergence check) {
  const double f = fidelity_cf_hybrid_once(chi_in, chi_out, grid_a, grid_b);
  if (check == Convergence::off) return f;
  const double f2 = fidelity_cf_hybrid_once(chi_in, chi_out, grid_a.doubled(),
                                            grid_b.doubled());
  if (std::abs(f2 - f) > 1e-4)
    throw ConvergenceError(
        "fidelity_cf_hybrid: doubling moved the result by " +
        std::to_string(std::abs(f2 - f)));
  return f2;
}

Eigen::MatrixXd displacement_radial(double r, int d) {
  return displacement_matrix(Complex(r, 0.0), d).real();
}

PairTensor pair_tensor_pure(const Vector& psi, const FockDims& dims,
                            int teleported_mode) {
  if (dims.n_modes() != 2)
    throw DimensionError("pair_tensor_pure: expects a two-mode pure state");
  if (psi.size() != dims.total())
    throw DimensionError("pair_tensor_pure: ket does not match dims");
  const int dt = dims.dim(teleported_mode);
  const int ds = dims.dim(1 - teleported_mode);
  std::vector<Vector> slices(ds, Vector::Zero(dt));
  for (long idx = 0; idx < psi.size(); ++idx) {
    const long hi = idx / dims.stride(0);
    const long lo = idx % dims.stride(0);
    const long j = (teleported_mode == 0) ? lo : hi;
    const long p = (teleported_mode == 0) ? hi : lo;
    slices[j](p) = psi(idx);
  }
  PairTensor pt;
  pt.d = dt;
  pt.coeff = Matrix::Zero(long(dt) * dt, long(dt) * dt);
  Vector a(long(dt) * dt), b(long(dt) * dt);
  for (int j = 0; j < ds; ++j) {
    for (int k = 0; k < ds; ++k) {
      for (int p = 0; p < dt; ++p)
        for (int q = 0; q < dt; ++q) {
          a(long(p) * dt + q) = std::conj(slices[j](p)) * slices[k](q);
          b(long(p) * dt + q) = std::conj(slices[k](p)) * slices[j](q);
        }
      pt.coeff.noalias() += a * b.transpose();
    }
  }
  return pt;
}

PairTensor pair_tensor_single(const FockOperator& rho) {
  if (rho.dims().n_modes() != 1)
    throw DimensionError("pair_tensor_single: expects a single-mode state");
  const int d = rho.dims().dim(0);
  // chi(xi) = sum_pq rho(q, p) <p|D(xi)|q>
  Vector a(long(d) * d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) a(long(p) * d + q) = rho.matrix()(q, p);
  PairTensor pt;
  pt.d = d;
  pt.coeff = a * a.transpose();
  return pt;
}

namespace {

double cvbsm_pair_fidelity_once(const PairTensor& pt, double lambda, double g,
                                const ChannelSpec& chan,
                                const QuadratureGrid& grid) {
  const int d = pt.d;
  const double wcoef = tmsv_lossy_cf(lambda, chan).averaged_weight_coeff(g);
  const int nr = int(grid.r.size());

  std::vector<Eigen::MatrixXd> r1(nr), r2(nr);
  std::vector<double> env(nr);
  for (int i = 0; i < nr; ++i) {
    r1[i] = displacement_radial(grid.r[i], d);
    r2[i] = displacement_radial(g * grid.r[i], d);
    env[i] = grid.w[i] * std::exp(wcoef * grid.r[i] * grid.r[i]);
  }

  // Harmonic orthogonality keeps (p - q) + (p' - q') = 0 only; the angular
  // integral is exact and contributes the factor 2 and the parity sign of
  // the reflected argument.
  Kahan acc;
  for (int p = 0; p < d; ++p) {
    for (int q = 0; q < d; ++q) {
      for (int pp = 0; pp < d; ++pp) {
        const int qq = pp + (p - q);
        if (qq < 0 || qq >= d) continue;
        const double c = pt.coeff(long(p) * d + q, long(pp) * d + qq).real();
        if (c == 0.0) continue;
        double radial = 0.0;
        for (int i = 0; i < nr; ++i)
          radial += env[i] * r1[i](p, q) * r2[i](pp, qq);
        const double sign = ((pp - qq) % 2 == 0) ? 1.0 : -1.0;
        acc.add(2.0 * sign * c * radial);
      }
    }
  }
  return std::clamp(acc.sum, 0.0, 1.0);
}

}  // namespace

double cvbsm_pair_fidelity(const PairTensor& pt, double lambda, double g,
                           const ChannelSpec& chan, const QuadratureGrid& grid,
                           Convergence check) {
  const double f = cvbsm_pair_fidelity_once(pt, lambda, g, chan, grid);
  if (check == Convergence::off) return f;
  const double f2 =
      cvbsm_pair_fidelity_once(pt, lambda, g, chan, grid.doubled());
  if (std::abs(f2 - f) > 1e-4)
    throw ConvergenceError(
        "cvbsm_pair_fidelity: doubling moved the result by " +
        std::to_string(std::abs(f2 - f)));
  return f2;
}

Matrix cvbsm_supermatrix(double lambda, double g, const ChannelSpec& chan,
                         int d, const QuadratureGrid& grid) {
  if (g <= 0.0) throw PreconditionError("cvbsm_supermatrix: gain must be > 0");
  const double wcoef = tmsv_lossy_cf(lambda, chan).averaged_weight_coeff(g);
  const int nr = int(grid.r.size());
  std::vector<Eigen::MatrixXd> r1(nr), rg(nr);
  std::vector<double> env(nr);
  for (int i = 0; i < nr; ++i) {
    r1[i] = displacement_radial(grid.r[i], d);
    rg[i] = displacement_radial(g * grid.r[i], d);
    env[i] = grid.w[i] * std::exp(wcoef * grid.r[i] * grid.r[i]);
  }
  // S[(j,k),(m,n)] = (1/pi) int <n|D(g xi)|m> chi'(g xi^*, xi) <j|D(-xi)|k>;
  // only n - m = k - j survives the angular integral.
  Matrix s = Matrix::Zero(long(d) * d, long(d) * d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const double sign = ((j - k) % 2 == 0) ? 1.0 : -1.0;
      for (int n = 0; n < d; ++n) {
        const int m = n + (j - k);
        if (m < 0 || m >= d) continue;
        double radial = 0.0;
        for (int i = 0; i < nr; ++i)
          radial += env[i] * rg[i](n, m) * r1[i](j, k);
        s(long(j) * d + k, long(m) * d + n) = 2.0 * sign * radial;
      }
    }
  }
  return s;
}

FockOperator apply_supermatrix_on_mode(const Matrix& s,
                                       const FockOperator& rho, int mode) {
  const FockDims& dims = rho.dims();
  const int d = dims.dim(mode);
  if (s.rows() != long(d) * d)
    throw DimensionError("apply_supermatrix_on_mode: size mismatch");
  const long stride = dims.stride(mode);
  const long total = dims.total();
  const long outer = total / (long(d) * stride);

  Matrix out = Matrix::Zero(total, total);
  for (long orow = 0; orow < outer; ++orow) {
    const long rbase = (orow / stride) * d * stride + orow % stride;
    for (long ocol = 0; ocol < outer; ++ocol) {
      const long cbase = (ocol / stride) * d * stride + ocol % stride;
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          Complex acc = 0.0;
          for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) {
              const Complex sv = s(long(j) * d + k, long(m) * d + n);
              if (sv == Complex(0.0, 0.0)) continue;
              acc += sv * rho.matrix()(rbase + m * stride,
                                       cbase + n * stride);
            }
          out(rbase + j * stride, cbase + k * stride) = acc;
        }
      }
    }
  }
  return {dims, std::move(out)};
}

double supermatrix_trace_defect(const Matrix& s, int d_input) {
  const int d = int(std::lround(std::sqrt(double(s.rows()))));
  const int sector = (d_input > 0 && d_input <= d) ? d_input : d;
  double worst = 0.0;
  for (int m = 0; m < sector; ++m)
    for (int n = 0; n < sector; ++n) {
      Complex tr = 0.0;
      for (int j = 0; j < d; ++j) tr += s(long(j) * d + j, long(m) * d + n);
      worst = std::max(worst, std::abs(tr - Complex(m == n ? 1.0 : 0.0)));
    }
  return worst;
}

double choi_min_eigenvalue(const Matrix& s) {
  const int d = int(std::lround(std::sqrt(double(s.rows()))));
  Matrix choi(long(d) * d, long(d) * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          choi(long(m) * d + j, long(n) * d + k) =
              s(long(j) * d + k, long(m) * d + n);
  Matrix herm = 0.5 * (choi + choi.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace telesim
