#pragma once

#include "gqfi/states.hpp"
#include "gqfi/symplectic.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace gqfi {

enum class Side { A, B };

/// Unit direction in generator space plus the mode it acts on.  The basis
/// (sigma_x, -i sigma_y, sigma_z) spans the traceless real 2x2 generators
/// of Sp(2,R); the y component is the phase rotation.
class GeneratorSpec {
public:
    GeneratorSpec(Eigen::Vector3d direction, Side side)
        : dir_(std::move(direction)), side_(side) {
        if (std::abs(dir_.norm() - 1.0) > 1e-12) {
            throw std::invalid_argument("GeneratorSpec: direction must be a unit vector");
        }
    }

    /// Spherical parameterization
    /// m = (cos theta, sin theta cos phi, sin theta sin phi).
    static GeneratorSpec from_angles(double theta, double phi, Side side) {
        return GeneratorSpec(Eigen::Vector3d(std::cos(theta),
                                             std::sin(theta) * std::cos(phi),
                                             std::sin(theta) * std::sin(phi)),
                             side);
    }

    const Eigen::Vector3d& direction() const { return dir_; }
    Side side() const { return side_; }

private:
    Eigen::Vector3d dir_;
    Side side_;
};

/// Quadrature-ordered matrix K of a quadratic evolution
/// Gamma_dot = K Gamma + Gamma K^T.
struct Generator {
    Eigen::MatrixXd matrix;
};

/// m . (sigma_x, -i sigma_y, sigma_z) as a real 2x2 matrix:
///   [[ m_z, m_x - m_y ], [ m_x + m_y, -m_z ]].
inline Eigen::Matrix2d single_mode_generator(const Eigen::Vector3d& m) {
    Eigen::Matrix2d k;
    k << m.z(), m.x() - m.y(),
         m.x() + m.y(), -m.z();
    return k;
}

/// Embeds the single-mode generator of `spec` into the chosen mode's block
/// of a 4x4 quadrature-ordered matrix; the other block is zero.
inline Generator build_generator(const GeneratorSpec& spec) {
    const Eigen::Matrix2d k = single_mode_generator(spec.direction());
    const Eigen::Matrix2d zero = Eigen::Matrix2d::Zero();
    return Generator{spec.side() == Side::A ? embed_two_mode(k, zero) : embed_two_mode(zero, k)};
}

/// K Gamma + Gamma K^T, symmetric by construction.
inline Eigen::MatrixXd gamma_dot(const CovMatrix& gamma, const Generator& k) {
    if (k.matrix.rows() != gamma.dim() || k.matrix.cols() != gamma.dim()) {
        throw std::invalid_argument("gamma_dot: dimension mismatch");
    }
    const Eigen::MatrixXd kg = k.matrix * gamma.entries();
    return kg + kg.transpose();
}

/// QFI of a Gaussian state under a quadratic generator,
///
///   F^2 = 1/4 ( 1/2 tr(Phi Gamma_dot) + 2 d_dot . Gamma^{-1} d_dot ),
///
/// with Phi the pseudo-inverse solution returned by solve_phi.  An empty
/// d_dot means no displacement drive (the usual case here).
inline double qfi_general(const GaussianState& state, const Generator& k,
                          const Eigen::VectorXd& d_dot = Eigen::VectorXd()) {
    const Eigen::MatrixXd gd = gamma_dot(state.cov, k);
    const PhiSolution sol = solve_phi(state.cov, gd);
    double value = 0.125 * sol.phi.cwiseProduct(gd).sum();
    if (d_dot.size() != 0) {
        if (d_dot.size() != state.cov.dim()) {
            throw std::invalid_argument("qfi_general: d_dot dimension mismatch");
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(state.cov.entries());
        if (llt.info() != Eigen::Success) {
            throw std::domain_error("qfi_general: covariance matrix is not positive definite");
        }
        value += 0.5 * d_dot.dot(llt.solve(d_dot));
    }
    return value;
}

/// Closed form for isotropic-class states, (Gamma J)^2 = -nu^2 I:
///
///   F^2 = tr((Gamma_dot J)^2) / (8 (nu^2 + 1)).
///
/// Throws std::domain_error when the state is outside the class; use
/// isotropic_nu to probe beforehand.
inline double qfi_isotropic(const GaussianState& state, const Generator& k) {
    const std::optional<double> nu = isotropic_nu(state.cov);
    if (!nu) {
        throw std::domain_error("qfi_isotropic: state is not isotropic-class");
    }
    const Eigen::MatrixXd x = gamma_dot(state.cov, k) * symplectic_form(state.cov.n_modes());
    return (x * x).trace() / (8.0 * (*nu * *nu + 1.0));
}

/// Local QFI of the one-sided generator named by `spec`.  Takes the closed
/// isotropic route when available, otherwise the general pipeline.
inline double lqfi(const GaussianState& state, const GeneratorSpec& spec) {
    if (state.cov.n_modes() != 2) {
        throw std::invalid_argument("lqfi: expected a two-mode state");
    }
    const Generator k = build_generator(spec);
    if (isotropic_nu(state.cov)) {
        return qfi_isotropic(state, k);
    }
    return qfi_general(state, k);
}

}  // namespace gqfi
