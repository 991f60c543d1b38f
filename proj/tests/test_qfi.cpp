#include "gqfi/qfi.hpp"

#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace gqfi;

namespace {

const Eigen::Matrix2d kSigmaZ = (Eigen::Matrix2d() << 1, 0, 0, -1).finished();

GaussianState fig3a() { return make_sts({3.0, 0.4}); }

}  // namespace

TEST_CASE("generator spec") {
    REQUIRE_THROWS_AS(GeneratorSpec(Eigen::Vector3d(0.5, 0.0, 0.0), Side::A),
                      std::invalid_argument);
    const GeneratorSpec spec = GeneratorSpec::from_angles(std::numbers::pi / 2, 0.0, Side::A);
    REQUIRE_THAT(spec.direction().y(), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(spec.direction().x(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("build_generator basis cases") {
    SECTION("sigma_x on side A") {
        const Generator g = build_generator(GeneratorSpec(Eigen::Vector3d(1, 0, 0), Side::A));
        Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
        expected(0, 2) = 1.0;  // x1 <- p1
        expected(2, 0) = 1.0;  // p1 <- x1
        REQUIRE((g.matrix - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("phase rotation on side A") {
        const Generator g = build_generator(GeneratorSpec(Eigen::Vector3d(0, 1, 0), Side::A));
        Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
        expected(0, 2) = -1.0;
        expected(2, 0) = 1.0;
        REQUIRE((g.matrix - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("sigma_z on side B") {
        const Generator g = build_generator(GeneratorSpec(Eigen::Vector3d(0, 0, 1), Side::B));
        Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
        expected(1, 1) = 1.0;
        expected(3, 3) = -1.0;
        REQUIRE((g.matrix - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("generator block is traceless") {
        std::mt19937 rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            const Generator g =
                build_generator(GeneratorSpec(gqfi_test::random_unit_vector(rng), Side::A));
            REQUIRE_THAT(g.matrix.trace(), WithinAbs(0.0, 1e-15));
        }
    }
}

TEST_CASE("gamma_dot block structure on the symmetric family") {
    const double a = 2.0;
    const double d = 0.75;
    const GaussianState state = make_two_mode_symmetric({a, d});
    const Eigen::MatrixXd t = mode_permutation(2);

    SECTION("sigma_z on A") {
        const Eigen::MatrixXd gd =
            gamma_dot(state.cov, build_generator(GeneratorSpec(Eigen::Vector3d(0, 0, 1), Side::A)));
        const Eigen::Matrix4d mode = t * gd * t;  // to mode ordering
        Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
        expected.block<2, 2>(0, 0) = 2.0 * a * kSigmaZ;
        expected.block<2, 2>(0, 2) = -d * Eigen::Matrix2d::Identity();
        expected.block<2, 2>(2, 0) = -d * Eigen::Matrix2d::Identity();
        REQUIRE((mode - expected).cwiseAbs().maxCoeff() <= 1e-14);
    }

    SECTION("phase rotation on A") {
        const Eigen::MatrixXd gd =
            gamma_dot(state.cov, build_generator(GeneratorSpec(Eigen::Vector3d(0, 1, 0), Side::A)));
        const Eigen::Matrix4d mode = t * gd * t;
        Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
        Eigen::Matrix2d sx;
        sx << 0, 1, 1, 0;
        expected.block<2, 2>(0, 2) = -d * sx;
        expected.block<2, 2>(2, 0) = -d * sx;
        REQUIRE((mode - expected).cwiseAbs().maxCoeff() <= 1e-14);
    }

    SECTION("rotation of a rotation-invariant block vanishes") {
        const GaussianState thermal = make_two_mode_symmetric({1.5, 0.0});
        const Eigen::MatrixXd gd = gamma_dot(
            thermal.cov, build_generator(GeneratorSpec(Eigen::Vector3d(0, 1, 0), Side::A)));
        REQUIRE(gd.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("dimension mismatch") {
        const Generator one_mode{Eigen::MatrixXd::Identity(2, 2)};
        REQUIRE_THROWS_AS(gamma_dot(state.cov, one_mode), std::invalid_argument);
    }
}

TEST_CASE("qfi_general") {
    SECTION("one mode, Gamma = I, gd = sigma_z gives 1/8") {
        const GaussianState state(CovMatrix(Eigen::MatrixXd::Identity(2, 2)));
        const Generator k{Eigen::MatrixXd(0.5 * kSigmaZ)};  // gd = sigma_z
        REQUIRE_THAT(qfi_general(state, k), WithinAbs(0.125, 1e-12));
    }

    SECTION("zero generator, zero displacement") {
        const GaussianState state = fig3a();
        REQUIRE(qfi_general(state, Generator{Eigen::MatrixXd::Zero(4, 4)}) == 0.0);
    }

    SECTION("displacement term: thermal product, d_dot = e_1 gives 1/s") {
        const double s = 3.0;
        const GaussianState state(CovMatrix(0.5 * s * Eigen::MatrixXd::Identity(4, 4)));
        Eigen::VectorXd d_dot = Eigen::VectorXd::Zero(4);
        d_dot(0) = 1.0;
        REQUIRE_THAT(qfi_general(state, Generator{Eigen::MatrixXd::Zero(4, 4)}, d_dot),
                     WithinRel(1.0 / s, 1e-12));
    }
}

TEST_CASE("qfi_isotropic") {
    SECTION("one-mode cross check") {
        const GaussianState state(CovMatrix(Eigen::MatrixXd::Identity(2, 2)));
        const Generator k{Eigen::MatrixXd(0.5 * kSigmaZ)};
        REQUIRE_THAT(qfi_isotropic(state, k), WithinAbs(0.125, 1e-12));
    }

    SECTION("fig3a directional values") {
        const GaussianState state = fig3a();
        const Generator ky = build_generator(GeneratorSpec(Eigen::Vector3d(0, 1, 0), Side::A));
        const Generator kz = build_generator(GeneratorSpec(Eigen::Vector3d(0, 0, 1), Side::A));
        REQUIRE_THAT(qfi_isotropic(state, ky), WithinRel(0.3646026372101386, 1e-10));
        REQUIRE_THAT(qfi_isotropic(state, kz), WithinRel(1.289130939096931, 1e-10));
    }

    SECTION("rejects non-isotropic states") {
        Eigen::Vector4d diag;
        diag << 1.0, 2.0, 1.0, 2.0;
        const GaussianState asym(CovMatrix(diag.asDiagonal()));
        const Generator k = build_generator(GeneratorSpec(Eigen::Vector3d(0, 0, 1), Side::A));
        REQUIRE_THROWS_AS(qfi_isotropic(asym, k), std::domain_error);
    }
}

TEST_CASE("lqfi") {
    SECTION("product state, phase rotation: exactly zero") {
        const GaussianState product = make_two_mode_symmetric({2.0, 0.0});
        REQUIRE(lqfi(product, GeneratorSpec(Eigen::Vector3d(0, 1, 0), Side::A)) == 0.0);
        REQUIRE(lqfi(product, GeneratorSpec(Eigen::Vector3d(0, 1, 0), Side::B)) == 0.0);
    }

    SECTION("angle parameterization matches the direction form") {
        const GaussianState state = fig3a();
        const double via_angles =
            lqfi(state, GeneratorSpec::from_angles(std::numbers::pi / 2, 0.0, Side::A));
        REQUIRE_THAT(via_angles, WithinRel(0.3646026372101386, 1e-9));
    }

    SECTION("fig3b phase-rotation value") {
        const GaussianState state = make_sts({1.0, 0.6});
        REQUIRE_THAT(lqfi(state, GeneratorSpec(Eigen::Vector3d(0, 1, 0), Side::A)),
                     WithinRel(0.7887023942824911, 1e-10));
    }

    SECTION("routes through the general pipeline off the isotropic class") {
        const GaussianState lossy = apply_pure_loss(fig3a(), 0.5, LossMode::B);
        REQUIRE_FALSE(isotropic_nu(lossy.cov).has_value());
        const GeneratorSpec spec(Eigen::Vector3d(0, 1, 0), Side::A);
        const double via_lqfi = lqfi(lossy, spec);
        const double via_general = qfi_general(lossy, build_generator(spec));
        REQUIRE(via_lqfi == via_general);
    }
}

TEST_CASE("general and isotropic routes agree on the symmetric family") {
    std::mt19937 rng(2024);
    double worst = 0.0;
    for (double n : {0.0, 0.5, 2.0, 4.0}) {
        for (double m : {0.1, 0.45, 0.8}) {
            const GaussianState state = make_sts({n, m});
            for (int trial = 0; trial < 20; ++trial) {
                const Generator k =
                    build_generator(GeneratorSpec(gqfi_test::random_unit_vector(rng), Side::A));
                const double fg = qfi_general(state, k);
                const double fi = qfi_isotropic(state, k);
                worst = std::max(worst, std::abs(fg - fi) / (1.0 + fg));
            }
        }
    }
    REQUIRE(worst <= 1e-9);
}

TEST_CASE("qfi is even in the generator direction") {
    std::mt19937 rng(8);
    const GaussianState state = fig3a();
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Vector3d dir = gqfi_test::random_unit_vector(rng);
        const double plus = lqfi(state, GeneratorSpec(dir, Side::A));
        const double minus = lqfi(state, GeneratorSpec(-dir, Side::A));
        REQUIRE_THAT(minus, WithinRel(plus, 1e-13));
    }
}

TEST_CASE("cross-direction trace terms vanish for basis directions") {
    const GaussianState state = fig3a();
    const Eigen::MatrixXd j = symplectic_form(2);
    const Eigen::Vector3d basis[] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int i = 0; i < 3; ++i) {
        for (int k = i + 1; k < 3; ++k) {
            const Eigen::MatrixXd ga =
                gamma_dot(state.cov, build_generator(GeneratorSpec(basis[i], Side::A)));
            const Eigen::MatrixXd gb =
                gamma_dot(state.cov, build_generator(GeneratorSpec(basis[k], Side::A)));
            REQUIRE_THAT((ga * j * gb * j).trace(), WithinAbs(0.0, 1e-12));
        }
    }
}
