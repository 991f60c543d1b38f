#pragma once

#include "gqfi/symplectic.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace gqfi {

/// Gaussian state: first-moment vector plus covariance matrix.
/// Construction enforces physicality of the CM.
struct GaussianState {
    Eigen::VectorXd first_moment;
    CovMatrix cov;

    GaussianState(Eigen::VectorXd first, CovMatrix c)
        : first_moment(std::move(first)), cov(std::move(c)) {
        validate();
    }

    /// Zero first moment.
    explicit GaussianState(CovMatrix c)
        : first_moment(Eigen::VectorXd::Zero(c.dim())), cov(std::move(c)) {
        validate();
    }

private:
    void validate() const {
        if (first_moment.size() != cov.dim()) {
            throw std::invalid_argument("GaussianState: first moment size does not match the CM");
        }
        if (!first_moment.allFinite()) {
            throw std::invalid_argument("GaussianState: first moment must be finite");
        }
        if (!is_physical(cov)) {
            throw std::invalid_argument("GaussianState: covariance matrix is not physical");
        }
    }
};

/// Squeezed-thermal-state parameters: mean thermal photons per mode and the
/// two-mode squeezing parameter.
struct STSParams {
    double n_thermal = 0.0;
    double m_squeeze = 0.0;
};

/// Parameters of the symmetric two-mode family with blocks
/// alpha = beta = a I and gamma = diag(-d, d) (b = a, c = -d).
struct SymmetricCMParams {
    double a = vacuum_nu;
    double d = 0.0;
};

/// Builds the symmetric two-mode state.  Its CM satisfies
/// (Gamma J)^2 = -(a^2 - d^2) I, so nu_minus = nu_plus = sqrt(a^2 - d^2).
inline GaussianState make_two_mode_symmetric(const SymmetricCMParams& p) {
    if (!std::isfinite(p.a) || !std::isfinite(p.d)) {
        throw std::invalid_argument("make_two_mode_symmetric: parameters must be finite");
    }
    if (p.a <= 0.0 || p.a * p.a - p.d * p.d < vacuum_nu * vacuum_nu - 1e-12) {
        throw std::invalid_argument("make_two_mode_symmetric: parameters violate physicality");
    }
    const Eigen::MatrixXd t = mode_permutation(2);
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.block<2, 2>(0, 0) = p.a * Eigen::Matrix2d::Identity();
    m.block<2, 2>(2, 2) = p.a * Eigen::Matrix2d::Identity();
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    g(0, 0) = -p.d;
    g(1, 1) = p.d;
    m.block<2, 2>(0, 2) = g;
    m.block<2, 2>(2, 0) = g;
    return GaussianState(CovMatrix(t * m * t));
}

/// Symmetric-CM parameters of the squeezed thermal state:
///   a = b = N_m (1 + 2N) + N + 1/2,
///   c = -d = (1 + 2N) sqrt(N_m (N_m + 1)),   N_m = sinh^2 m.
inline SymmetricCMParams sts_cm_params(const STSParams& p) {
    if (!std::isfinite(p.n_thermal) || !std::isfinite(p.m_squeeze)
        || p.n_thermal < 0.0 || p.m_squeeze < 0.0) {
        throw std::invalid_argument("sts_cm_params: parameters must be finite and non-negative");
    }
    const double s = 1.0 + 2.0 * p.n_thermal;
    const double nm = std::sinh(p.m_squeeze) * std::sinh(p.m_squeeze);
    SymmetricCMParams q;
    q.a = nm * s + p.n_thermal + 0.5;
    q.d = -s * std::sqrt(nm * (nm + 1.0));
    return q;
}

/// Two-mode squeezed thermal state (zero first moment).
inline GaussianState make_sts(const STSParams& p) {
    return make_two_mode_symmetric(sts_cm_params(p));
}

/// Purity of a symmetric two-mode state, 1 / (4 nu_- nu_+) = 1 / (2 nu_-)^2.
/// Equals (1 + 2N)^{-2} for squeezed thermal states.  Throws for states
/// outside the isotropic class.
inline double purity(const GaussianState& state) {
    if (state.cov.n_modes() != 2 || !isotropic_nu(state.cov)) {
        throw std::invalid_argument("purity: state is not a symmetric two-mode state");
    }
    const std::vector<double> nus = symplectic_spectrum_sqrt(state.cov);
    return 1.0 / (4.0 * nus[0] * nus[1]);
}

/// Smallest symplectic eigenvalue of the partially transposed CM.  For the
/// symmetric family this is ||a| - |d||; for squeezed thermal states it is
/// (1 + 2N) e^{-2m} / 2.
inline double pt_min_symplectic_eigenvalue(const GaussianState& state) {
    if (state.cov.n_modes() != 2) {
        throw std::invalid_argument("pt_min_symplectic_eigenvalue: expected a two-mode state");
    }
    return symplectic_eigenvalues(partial_transpose(state.cov)).nu_minus;
}

/// Logarithmic negativity max[0, -ln(nu_tilde_minus)].
inline double log_negativity(const GaussianState& state) {
    return std::max(0.0, -std::log(pt_min_symplectic_eigenvalue(state)));
}

/// PPT entanglement test, nu_tilde_minus < threshold.  The default 1/2 is
/// the separability boundary of the squeezed-thermal family in these units;
/// threshold 1 is the other convention in circulation and is accepted too.
inline bool is_entangled(const GaussianState& state, double threshold = vacuum_nu) {
    if (threshold != 0.5 && threshold != 1.0) {
        throw std::invalid_argument("is_entangled: threshold must be 0.5 or 1.0");
    }
    return pt_min_symplectic_eigenvalue(state) < threshold;
}

/// S^T J S = J check for a single-mode block.
inline bool is_symplectic_2x2(const Eigen::Matrix2d& s, double tol = 1e-10) {
    Eigen::Matrix2d j2;
    j2 << 0.0, 1.0, -1.0, 0.0;
    return (s.transpose() * j2 * s - j2).cwiseAbs().maxCoeff() <= tol;
}

/// Applies S_A (+) S_B: d -> S d and Gamma -> S Gamma S^T.  The symplectic
/// spectrum is preserved.
inline GaussianState apply_local_symplectic(const GaussianState& state,
                                            const Eigen::Matrix2d& s_a,
                                            const Eigen::Matrix2d& s_b) {
    if (state.cov.n_modes() != 2) {
        throw std::invalid_argument("apply_local_symplectic: expected a two-mode state");
    }
    if (!is_symplectic_2x2(s_a) || !is_symplectic_2x2(s_b)) {
        throw std::invalid_argument("apply_local_symplectic: blocks must be symplectic");
    }
    const Eigen::Matrix4d s = embed_two_mode(s_a, s_b);
    return GaussianState(s * state.first_moment, CovMatrix(s * state.cov.entries() * s.transpose()));
}

enum class LossMode { A, B };

/// Pure-loss channel of transmissivity eta on one mode: the mode block is
/// mixed with vacuum (vacuum_nu * I), cross blocks are scaled by sqrt(eta),
/// and the mode's first-moment entries by sqrt(eta).
inline GaussianState apply_pure_loss(const GaussianState& state, double eta, LossMode mode) {
    if (state.cov.n_modes() != 2) {
        throw std::invalid_argument("apply_pure_loss: expected a two-mode state");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("apply_pure_loss: eta must lie in [0, 1]");
    }
    const double root_eta = std::sqrt(eta);
    const Eigen::MatrixXd t = mode_permutation(2);
    Eigen::Matrix4d m = t * state.cov.entries() * t;  // mode ordering
    const int k = mode == LossMode::A ? 0 : 2;
    const int other = 2 - k;
    m.block<2, 2>(k, k) = eta * m.block<2, 2>(k, k) + (1.0 - eta) * vacuum_nu * Eigen::Matrix2d::Identity();
    m.block<2, 2>(k, other) *= root_eta;
    m.block<2, 2>(other, k) *= root_eta;
    Eigen::VectorXd first = state.first_moment;
    const int x_slot = mode == LossMode::A ? 0 : 1;
    first(x_slot) *= root_eta;
    first(x_slot + 2) *= root_eta;
    return GaussianState(std::move(first), CovMatrix(t * m * t));
}

}  // namespace gqfi
