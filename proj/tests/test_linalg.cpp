#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "bessim/linalg.hpp"

using namespace bessim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Matrix cycle_laplacian(std::size_t n) {
    Matrix l(n);
    for (std::size_t i = 0; i < n; ++i) {
        l(i, i) = 2.0;
        l(i, (i + 1) % n) = -1.0;
        l(i, (i + n - 1) % n) = -1.0;
    }
    return l;
}

Matrix complete_laplacian(std::size_t n) {
    Matrix l(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) l(i, j) = i == j ? double(n - 1) : -1.0;
    return l;
}

} // namespace

TEST_CASE("cycle graph spectra match the closed form", "[linalg]") {
    for (std::size_t n = 3; n <= 12; ++n) {
        Vector expected;
        for (std::size_t k = 0; k < n; ++k)
            expected.push_back(2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * double(k) / double(n))));
        std::sort(expected.begin(), expected.end());

        const Vector got = symmetric_eigenvalues(cycle_laplacian(n));
        REQUIRE(got.size() == n);
        for (std::size_t k = 0; k < n; ++k)
            CHECK_THAT(got[k], WithinAbs(expected[k], 1e-9));
    }
}

TEST_CASE("complete graph spectrum is {0, N x (N-1 copies)}", "[linalg]") {
    for (std::size_t n : {3, 4, 8, 12}) {
        const Vector got = symmetric_eigenvalues(complete_laplacian(n));
        CHECK_THAT(got[0], WithinAbs(0.0, 1e-9));
        for (std::size_t k = 1; k < n; ++k) CHECK_THAT(got[k], WithinAbs(double(n), 1e-9));
    }
}

TEST_CASE("6-cycle spectrum is {0,1,1,3,3,4}", "[linalg]") {
    const Vector got = symmetric_eigenvalues(cycle_laplacian(6));
    const Vector expected{0.0, 1.0, 1.0, 3.0, 3.0, 4.0};
    for (std::size_t k = 0; k < 6; ++k) CHECK_THAT(got[k], WithinAbs(expected[k], 1e-9));
}

TEST_CASE("identity spectrum", "[linalg]") {
    const Vector got = symmetric_eigenvalues(Matrix::identity(3));
    for (double v : got) CHECK_THAT(v, WithinAbs(1.0, 1e-12));
}

TEST_CASE("asymmetric input is rejected", "[linalg]") {
    Matrix m(2);
    m(0, 0) = 1.0;
    m(0, 1) = 2.0;
    m(1, 0) = 2.0 + 1e-6;
    m(1, 1) = 1.0;
    CHECK_THROWS_AS(symmetric_eigenvalues(m), NotSymmetric);
}

TEST_CASE("random symmetric matrices: eigenvalue sums match the trace", "[linalg]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rep % 7;
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = dist(rng);
        const Vector eig = symmetric_eigenvalues(m);
        double trace = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) trace += m(i, i);
        for (double v : eig) sum += v;
        CHECK_THAT(sum, WithinAbs(trace, 1e-9 * std::max(1.0, std::abs(trace))));
    }
}

TEST_CASE("cholesky solve inverts SPD systems", "[linalg]") {
    // H for the 2-node path with the first unit pinned.
    Matrix h(2);
    h(0, 0) = 2.0;
    h(0, 1) = h(1, 0) = -1.0;
    h(1, 1) = 1.0;
    const CholeskyFactor f(h);
    const Vector x = f.solve(Vector{6.0, -4.0});
    // H^{-1} = [[1,1],[1,2]] so x = (2, -2).
    CHECK_THAT(x[0], WithinAbs(2.0, 1e-12));
    CHECK_THAT(x[1], WithinAbs(-2.0, 1e-12));

    Matrix not_pd(2);
    not_pd(0, 0) = 1.0;
    not_pd(0, 1) = not_pd(1, 0) = 3.0;
    not_pd(1, 1) = 1.0;
    CHECK_THROWS_AS(CholeskyFactor(not_pd), NotPositiveDefinite);
}

TEST_CASE("smallest eigenvalue agrees with inverse power iteration", "[linalg]") {
    // Independent route to lambda_min for an SPD matrix.
    Matrix h(6);
    for (std::size_t i = 0; i < 6; ++i) {
        h(i, i) = 2.0;
        h(i, (i + 1) % 6) = -1.0;
        h(i, (i + 5) % 6) = -1.0;
    }
    h(0, 0) += 1.0; // pin the first node
    const double lambda_min = symmetric_eigenvalues(h).front();

    const CholeskyFactor f(h);
    Vector y(6, 1.0);
    double mu = 0.0;
    for (int it = 0; it < 200; ++it) {
        Vector z = f.solve(y);
        double norm = std::sqrt(dot(z, z));
        for (double& v : z) v /= norm;
        const Vector hz = multiply(h, z);
        mu = dot(z, hz);
        y = z;
    }
    CHECK_THAT(lambda_min, WithinRel(mu, 1e-9));
}
