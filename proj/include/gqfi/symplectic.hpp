#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gqfi {

/// Symplectic eigenvalue of the vacuum in the units used throughout this
/// library: covariance matrices are dimensionless with vacuum CM = I/2.
/// A CM is physical iff every symplectic eigenvalue is >= this value.
inline constexpr double vacuum_nu = 0.5;

/// Largest tolerated asymmetry |G - G^T|_max of covariance-matrix input.
inline constexpr double symmetry_tol = 1e-12;

/// Real 2N x 2N covariance matrix in quadrature ordering
/// r = (x_1,...,x_N, p_1,...,p_N).
///
/// Construction checks shape and symmetry only.  Physicality is a separate
/// predicate (is_physical) because intermediate objects, most notably the
/// partial transpose of an entangled state's CM, violate it.
class CovMatrix {
public:
    explicit CovMatrix(Eigen::MatrixXd entries) : mat_(std::move(entries)) {
        if (mat_.rows() != mat_.cols() || mat_.rows() < 2 || mat_.rows() % 2 != 0) {
            throw std::invalid_argument("CovMatrix: expected a square 2Nx2N matrix");
        }
        if (!mat_.allFinite()) {
            throw std::invalid_argument("CovMatrix: entries must be finite");
        }
        const double asym = (mat_ - mat_.transpose()).cwiseAbs().maxCoeff();
        if (!(asym <= symmetry_tol * std::max(1.0, mat_.cwiseAbs().maxCoeff()))) {
            throw std::invalid_argument("CovMatrix: matrix is not symmetric");
        }
        Eigen::MatrixXd sym = 0.5 * (mat_ + mat_.transpose());
        mat_ = std::move(sym);
    }

    int n_modes() const { return static_cast<int>(mat_.rows()) / 2; }
    int dim() const { return static_cast<int>(mat_.rows()); }
    const Eigen::MatrixXd& entries() const { return mat_; }

private:
    Eigen::MatrixXd mat_;
};

/// Symplectic form J = [[0, I_N], [-I_N, 0]] in quadrature ordering, so that
/// [r_k, r_l] = i J_kl.  Satisfies J = -J^T = -J^{-1} and J J^T = I.
inline Eigen::MatrixXd symplectic_form(int n_modes) {
    if (n_modes < 1) {
        throw std::invalid_argument("symplectic_form: n_modes must be >= 1");
    }
    const int n = n_modes;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return j;
}

/// Permutation T taking mode ordering (x_1,p_1,x_2,p_2) to quadrature
/// ordering (x_1,x_2,p_1,p_2).  T is its own inverse; conjugation by T
/// converts block-form two-mode CMs to the internal ordering.
///
/// Only the two-mode case is supported.  (The obvious generalization is the
/// interleave permutation x_k -> slot k, p_k -> slot N+k.)
inline Eigen::MatrixXd mode_permutation(int n_modes) {
    if (n_modes != 2) {
        throw std::invalid_argument("mode_permutation: only n_modes == 2 is supported");
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 4);
    t(0, 0) = 1.0;
    t(1, 2) = 1.0;
    t(2, 1) = 1.0;
    t(3, 3) = 1.0;
    return t;
}

/// Embeds per-mode 2x2 blocks as a quadrature-ordered 4x4 matrix.
inline Eigen::Matrix4d embed_two_mode(const Eigen::Matrix2d& block_a, const Eigen::Matrix2d& block_b) {
    const Eigen::MatrixXd t = mode_permutation(2);
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.block<2, 2>(0, 0) = block_a;
    m.block<2, 2>(2, 2) = block_b;
    return t * m * t;
}

/// Mode-block determinants of a two-mode CM: I1 = det(alpha),
/// I2 = det(beta), I3 = det(gamma), I4 = det(Gamma), plus
/// Delta = I1 + I2 + 2 I3.
struct SymplecticInvariants {
    double i1;
    double i2;
    double i3;
    double i4;
    double delta;
};

inline SymplecticInvariants symplectic_invariants(const CovMatrix& gamma) {
    if (gamma.dim() != 4) {
        throw std::invalid_argument("symplectic_invariants: expected a two-mode CM");
    }
    const Eigen::MatrixXd t = mode_permutation(2);
    const Eigen::Matrix4d m = t * gamma.entries() * t;  // mode ordering
    SymplecticInvariants inv{};
    inv.i1 = m.block<2, 2>(0, 0).determinant();
    inv.i2 = m.block<2, 2>(2, 2).determinant();
    inv.i3 = m.block<2, 2>(0, 2).determinant();
    inv.i4 = gamma.entries().determinant();
    inv.delta = inv.i1 + inv.i2 + 2.0 * inv.i3;
    return inv;
}

struct SymplecticSpectrum {
    double nu_minus;
    double nu_plus;
};

/// Symplectic eigenvalues of a two-mode CM from its invariants:
///   nu_pm^2 = (Delta +/- sqrt(Delta^2 - 4 I4)) / 2.
/// The smaller root is recovered as I4 / nu_plus^2, which avoids the
/// cancellation the direct difference suffers near nu_minus = 0.
/// Throws std::domain_error when the spectrum is not real.
inline SymplecticSpectrum symplectic_eigenvalues(const CovMatrix& gamma) {
    const SymplecticInvariants inv = symplectic_invariants(gamma);
    const double scale = std::max(1.0, std::abs(inv.delta));
    const double disc = inv.delta * inv.delta - 4.0 * inv.i4;
    if (disc < -1e-10 * scale * scale) {
        throw std::domain_error("symplectic_eigenvalues: negative discriminant, spectrum is complex");
    }
    const double root = std::sqrt(std::max(disc, 0.0));
    const double plus_sq = 0.5 * (inv.delta + root);
    const double minus_sq = plus_sq > 0.0 ? inv.i4 / plus_sq : 0.5 * (inv.delta - root);
    if (plus_sq < -1e-10 * scale || minus_sq < -1e-10 * scale) {
        throw std::domain_error("symplectic_eigenvalues: negative nu^2, spectrum is complex");
    }
    SymplecticSpectrum sp{};
    sp.nu_plus = std::sqrt(std::max(plus_sq, 0.0));
    sp.nu_minus = std::sqrt(std::max(minus_sq, 0.0));
    return sp;
}

/// Partial transpose of a two-mode CM: momentum reversal on mode B
/// (p_B -> -p_B), which maps I3 -> -I3 and leaves I1, I2, I4 unchanged.
inline CovMatrix partial_transpose(const CovMatrix& gamma) {
    if (gamma.dim() != 4) {
        throw std::invalid_argument("partial_transpose: expected a two-mode CM");
    }
    Eigen::Matrix4d lambda = Eigen::Matrix4d::Identity();
    lambda(3, 3) = -1.0;  // p_B is the last quadrature slot
    return CovMatrix(lambda * gamma.entries() * lambda);
}

/// Returns nu when (Gamma J)^2 = -nu^2 I holds to within tol, else nullopt.
/// This is the class of CMs for which the closed isotropic QFI formula is
/// valid.
inline std::optional<double> isotropic_nu(const CovMatrix& gamma, double tol = 1e-10) {
    const Eigen::MatrixXd gj = gamma.entries() * symplectic_form(gamma.n_modes());
    const Eigen::MatrixXd sq = gj * gj;
    const double nu_sq = -sq.trace() / gamma.dim();
    if (nu_sq < 0.0) {
        return std::nullopt;
    }
    const Eigen::MatrixXd dev = sq + nu_sq * Eigen::MatrixXd::Identity(gamma.dim(), gamma.dim());
    if (dev.cwiseAbs().maxCoeff() > tol * std::max(1.0, nu_sq)) {
        return std::nullopt;
    }
    return std::sqrt(nu_sq);
}

/// Symplectic spectrum of a positive-definite CM of any mode count, through
/// the singular values of the antisymmetric matrix Gamma^{1/2} J Gamma^{1/2}
/// (each symplectic eigenvalue appears twice).  Full double precision even
/// at degenerate spectra, where the invariant formula loses half its digits
/// to the square root of the vanishing discriminant.  Values ascending.
/// Throws std::domain_error when Gamma is not positive definite.
inline std::vector<double> symplectic_spectrum_sqrt(const CovMatrix& gamma) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma.entries());
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw std::domain_error("symplectic_spectrum_sqrt: CM is not positive definite");
    }
    const Eigen::MatrixXd root = es.operatorSqrt();
    const Eigen::MatrixXd a = root * symplectic_form(gamma.n_modes()) * root;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    std::vector<double> nus;
    for (int i = 0; i < gamma.n_modes(); ++i) {
        // singular values come sorted descending, in equal pairs
        nus.push_back(0.5 * (svd.singularValues()(2 * i) + svd.singularValues()(2 * i + 1)));
    }
    std::reverse(nus.begin(), nus.end());
    return nus;
}

/// Physicality test: Gamma positive definite with every symplectic
/// eigenvalue >= vacuum_nu - tol.
inline bool is_physical(const CovMatrix& gamma, double tol = 1e-12) {
    try {
        return symplectic_spectrum_sqrt(gamma).front() >= vacuum_nu - tol;
    } catch (const std::domain_error&) {
        return false;
    }
}

struct PhiSolution {
    Eigen::MatrixXd phi;
    int effective_rank;
};

/// Moore-Penrose solution Phi of the superoperator equation
///
///   Gamma Phi Gamma^T - J Phi J^T = Gamma_dot
///
/// restricted to symmetric matrices (a space of dimension N(2N+1)).  The
/// operator is represented in an orthonormal basis under <A,B> = tr(AB), so
/// the matrix pseudo-inverse coincides with the operator pseudo-inverse.
/// Singular values below 1e-12 of the largest are treated as zero;
/// effective_rank counts the ones kept.
inline PhiSolution solve_phi(const CovMatrix& gamma, const Eigen::MatrixXd& gamma_dot) {
    const int s = gamma.dim();
    if (gamma_dot.rows() != s || gamma_dot.cols() != s) {
        throw std::invalid_argument("solve_phi: dimension mismatch");
    }
    const double gd_scale = std::max(1.0, gamma_dot.cwiseAbs().maxCoeff());
    if ((gamma_dot - gamma_dot.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * gd_scale) {
        throw std::invalid_argument("solve_phi: gamma_dot must be symmetric");
    }

    std::vector<Eigen::MatrixXd> basis;
    basis.reserve(static_cast<std::size_t>(s) * (s + 1) / 2);
    for (int i = 0; i < s; ++i) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(s, s);
        e(i, i) = 1.0;
        basis.push_back(std::move(e));
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < s; ++i) {
        for (int j = i + 1; j < s; ++j) {
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(s, s);
            e(i, j) = inv_sqrt2;
            e(j, i) = inv_sqrt2;
            basis.push_back(std::move(e));
        }
    }

    const int dim = static_cast<int>(basis.size());
    const Eigen::MatrixXd j = symplectic_form(gamma.n_modes());
    Eigen::MatrixXd op(dim, dim);
    Eigen::VectorXd rhs(dim);
    for (int col = 0; col < dim; ++col) {
        const Eigen::MatrixXd image = gamma.entries() * basis[col] * gamma.entries().transpose()
                                      - j * basis[col] * j.transpose();
        for (int row = 0; row < dim; ++row) {
            op(row, col) = basis[row].cwiseProduct(image).sum();
        }
    }
    for (int row = 0; row < dim; ++row) {
        rhs(row) = basis[row].cwiseProduct(gamma_dot).sum();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    const Eigen::VectorXd coeff = svd.solve(rhs);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(s, s);
    for (int k = 0; k < dim; ++k) {
        phi += coeff(k) * basis[k];
    }
    return PhiSolution{std::move(phi), static_cast<int>(svd.rank())};
}

}  // namespace gqfi
