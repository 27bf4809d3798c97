#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "berryspin/linalg.hpp"
#include "berryspin/spin_model.hpp"
#include "oracles.hpp"

using namespace berryspin;
using Catch::Approx;

namespace {

const std::vector<double> kCouplings{0.1, 0.5, 1.0, 2.0, 5.0, 20.0};
const std::vector<double> kPhis{0.0, 1.0, kTwoPi - 0.1};

std::vector<double> theta_grid() {
    std::vector<double> out;
    for (double t = 0.1; t < kPi - 0.05; t += 0.1) out.push_back(t);
    return out;
}

}  // namespace

TEST_CASE("ModelParams validation") {
    CHECK_NOTHROW(ModelParams(0.0, 1.0));
    CHECK_THROWS_AS(ModelParams(-0.1, 1.0), ValidationError);
    CHECK_THROWS_AS(ModelParams(std::nan(""), 1.0), ValidationError);
    CHECK_THROWS_AS(ModelParams(1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(ModelParams(1.0, kPi), ValidationError);
    CHECK_THROWS_AS(ModelParams(1.0, 5e-4), ValidationError);
    CHECK_NOTHROW(ModelParams(1.0, 2e-3));
    CHECK_THROWS_AS(EigenLabel(0), ValidationError);
    CHECK_THROWS_AS(EigenLabel(5), ValidationError);
}

TEST_CASE("hamiltonian entries") {
    SECTION("g=0, theta=pi/2, phi=0") {
        const auto h = hamiltonian(ModelParams(0.0, kPi / 2), 0.0);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(h(i, i)) < 1e-15);
        CHECK(h(0, 2) == Complex(1.0, 0.0));
        CHECK(h(1, 3) == Complex(1.0, 0.0));
        CHECK(h(1, 2) == Complex(0.0, 0.0));
    }
    SECTION("coupling entries between |ee> and |gg>") {
        const auto h = hamiltonian(ModelParams(1.0, 0.8), 0.4);
        CHECK(h(1, 2) == Complex(1.0, 0.0));
        CHECK(h(2, 1) == Complex(1.0, 0.0));
    }
    SECTION("matches the layout typed in by hand") {
        const auto ref = oracle::model_matrix(0.7, 1.1, 2.3);
        const auto h = hamiltonian(ModelParams(0.7, 1.1), 2.3);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(h(i, j) - ref[i][j]) < 1e-15);
    }
    SECTION("2 pi periodic and traceless") {
        const ModelParams p(1.3, 0.9);
        for (double phi : {0.0, 0.5, 3.0}) {
            const auto a = hamiltonian(p, phi);
            const auto b = hamiltonian(p, phi + kTwoPi);
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(a(i, j) - b(i, j)) < 1e-14);
            CHECK(a.trace() == Approx(0.0).margin(1e-15));
        }
    }
}

TEST_CASE("char_poly_residual direct evaluations") {
    CHECK(char_poly_residual(ModelParams(0.0, kPi / 2), 1.0) == Approx(0.0).margin(1e-15));
    CHECK(char_poly_residual(ModelParams(1.0, kPi / 2), 0.0) == Approx(1.0).margin(1e-15));
}

TEST_CASE("char_poly_residual is the characteristic polynomial") {
    // Oracle: det(H - E) by Laplace expansion.
    for (double g : {0.3, 1.0, 4.0})
        for (double theta : {0.4, 1.2, 2.5})
            for (double e : {-2.0, -0.3, 0.0, 0.9, 1.7}) {
                auto m = oracle::model_matrix(g, theta, 0.6);
                for (int i = 0; i < 4; ++i) m[i][i] -= e;
                const Complex det = oracle::det4(m);
                CHECK(det.real() == Approx(char_poly_residual(ModelParams(g, theta), e)).margin(1e-12));
                CHECK(std::abs(det.imag()) < 1e-12);
            }
}

TEST_CASE("eigenvalues_analytic") {
    SECTION("decoupled limit") {
        for (double theta : {0.3, 1.0, 2.0}) {
            const auto e = eigenvalues_analytic(ModelParams(0.0, theta));
            CHECK(e[EigenLabel(1)] == 1.0);
            CHECK(e[EigenLabel(2)] == -1.0);
            CHECK(e[EigenLabel(3)] == 1.0);
            CHECK(e[EigenLabel(4)] == -1.0);
        }
    }
    SECTION("g=1, theta=pi/2 against bisection") {
        const auto e = eigenvalues_analytic(ModelParams(1.0, kPi / 2));
        const auto roots = oracle::scan_roots([](double x) { return oracle::quartic(1.0, kPi / 2, x); }, 0.0, 3.0);
        REQUIRE(roots.size() == 2);
        CHECK(e[EigenLabel(3)] == Approx(roots[0]).margin(1e-10));
        CHECK(e[EigenLabel(1)] == Approx(roots[1]).margin(1e-10));
        CHECK(e[EigenLabel(1)] == Approx(1.618034).margin(1e-6));
        CHECK(e[EigenLabel(3)] == Approx(0.618034).margin(1e-6));
    }
    SECTION("grid: roots of the quartic, symmetric, ordered, phi independent") {
        for (double g : kCouplings)
            for (double theta : theta_grid()) {
                const ModelParams p(g, theta);
                const auto e = eigenvalues_analytic(p);
                for (double x : e.energies) REQUIRE(std::abs(char_poly_residual(p, x)) <= 1e-10);
                REQUIRE(e[EigenLabel(2)] == -e[EigenLabel(1)]);
                REQUIRE(e[EigenLabel(4)] == -e[EigenLabel(3)]);
                REQUIRE(e[EigenLabel(1)] > e[EigenLabel(3)]);
                REQUIRE(e[EigenLabel(3)] > 0.0);
                REQUIRE(spectral_gap(p) > 0.0);

                std::array<double, 4> sorted = e.energies;
                std::sort(sorted.begin(), sorted.end());
                for (double phi : kPhis) {
                    const auto numeric = hermitian_eig(hamiltonian(p, phi));
                    for (std::size_t k = 0; k < 4; ++k)
                        REQUIRE(numeric.energies[k] == Approx(sorted[k]).margin(1e-10));
                }
            }
    }
}

TEST_CASE("spectral_gap") {
    CHECK(spectral_gap(ModelParams(0.0, 1.0)) == 0.0);
    // E1 - E3 = 1 and 2 E3 = 1.236... at g=1, theta=pi/2.
    CHECK(spectral_gap(ModelParams(1.0, kPi / 2)) == Approx(1.0).margin(1e-12));
}

TEST_CASE("eigenvector_analytic") {
    SECTION("rejects g = 0") {
        CHECK_THROWS_AS(eigenvector_analytic(ModelParams(0.0, 1.0), 0.0, EigenLabel(1)), ValidationError);
    }
    SECTION("agrees with the numerical eigensolver up to a global phase") {
        for (double g : kCouplings)
            for (double theta : theta_grid())
                for (double phi : kPhis) {
                    const ModelParams p(g, theta);
                    const auto numeric = hermitian_eig(hamiltonian(p, phi));
                    for (const auto label : EigenLabel::all()) {
                        const auto psi = eigenvector_analytic(p, phi, label);
                        const double e = eigenvalues_analytic(p)[label];
                        std::size_t match = 0;
                        for (std::size_t k = 1; k < 4; ++k)
                            if (std::abs(numeric.energies[k] - e) < std::abs(numeric.energies[match] - e)) match = k;
                        REQUIRE(std::abs(inner(numeric.vectors[match], psi)) >= 1.0 - 1e-10);
                        REQUIRE((hamiltonian(p, phi).apply(psi) - Complex(e) * psi).norm() <= 1e-8);
                    }
                }
    }
    SECTION("component moduli do not depend on phi") {
        const ModelParams p(0.8, 1.0);
        for (const auto label : EigenLabel::all()) {
            const auto a = eigenvector_analytic(p, 0.0, label);
            const auto b = eigenvector_analytic(p, 1.3, label);
            for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(a[i]) == Approx(std::abs(b[i])).margin(1e-14));
        }
    }
    SECTION("small-g limit of label 1 is spin 1 along the field, spin 2 on the equator") {
        // The g-coupling splits the degenerate E = +1 pair at first order,
        // so the limit is |n+> (x) (|g> + e^{i phi}|e>)/sqrt2, not |n+>|g>.
        const double theta = 0.9, phi = 0.4;
        const double s = std::sin(theta), c = std::cos(theta);
        const auto psi = eigenvector_analytic(ModelParams(1e-9, theta), phi, EigenLabel(1));
        const auto expected = StateVector<4>::normalized(
            {s * std::polar(1.0, -phi), s, 1.0 - c, (1.0 - c) * std::polar(1.0, phi)});
        CHECK(std::abs(inner(expected, psi)) == Approx(1.0).margin(1e-8));
    }
    SECTION("numerically stable at strong coupling") {
        for (double g : {100.0, 1e4})
            for (double theta : {0.01, 0.7, 2.9})
                for (const auto label : EigenLabel::all())
                    CHECK_NOTHROW(eigenvector_analytic(ModelParams(g, theta), 0.2, label));
    }
}

TEST_CASE("decoupled eigenvectors") {
    const double theta = 1.1;
    const auto h = hamiltonian(ModelParams(0.0, theta), 0.7);
    for (const auto label : EigenLabel::all()) {
        const auto psi = decoupled_eigenvector(theta, 0.7, label);
        CHECK(psi.norm() == Approx(1.0));
        CHECK((h.apply(psi) - Complex(decoupled_energy(label)) * psi).norm() < 1e-14);
    }
    for (const auto a : EigenLabel::all())
        for (const auto b : EigenLabel::all())
            if (!(a == b))
                CHECK(std::abs(inner(decoupled_eigenvector(theta, 0.7, a), decoupled_eigenvector(theta, 0.7, b))) <
                      1e-14);
}
