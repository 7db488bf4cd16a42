#include <doctest.h>

#include <cmath>

#include "seqmc/linalg.hpp"
#include "seqmc/random.hpp"

using namespace seqmc;

namespace {

ComplexMatrix pauli_z() {
    ComplexMatrix z(2);
    z.at(0, 0) = 1.0;
    z.at(1, 1) = -1.0;
    return z;
}

double orthonormality_defect(const HermitianSpectrum& s) {
    const ComplexMatrix& v = s.eigenvectors;
    return max_abs_diff(v.adjoint() * v, ComplexMatrix::identity(v.dim()));
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("identity eigendecomposition") {
    HermitianSpectrum s = eig_hermitian(ComplexMatrix::identity(2));
    CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(orthonormality_defect(s) < 1e-10);
}

TEST_CASE("pauli z eigendecomposition") {
    HermitianSpectrum s = eig_hermitian(pauli_z());
    CHECK(s.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(s.eigenvalues[1] == doctest::Approx(-1.0));
    CHECK(std::abs(s.eigenvectors.at(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(s.eigenvectors.at(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eig rejects non-hermitian input") {
    ComplexMatrix m(2);
    m.at(0, 1) = 1.0;  // strictly upper triangular
    CHECK_THROWS_AS(eig_hermitian(m), NotHermitian);
}

TEST_CASE("eig reconstruction and orthonormality on seeded matrices") {
    for (int dim : {2, 3, 4, 8}) {
        RngStream rng(20240 + dim, 0);
        for (int i = 0; i < 250; ++i) {
            ComplexMatrix h = random_hermitian(dim, rng);
            HermitianSpectrum s = eig_hermitian(h);
            CHECK(max_abs_diff(s.reconstruct(), h) < 1e-9);
            CHECK(orthonormality_defect(s) < 1e-10);
            for (size_t k = 1; k < s.eigenvalues.size(); ++k)
                CHECK(s.eigenvalues[k - 1] >= s.eigenvalues[k] - 1e-12);
        }
    }
}

TEST_CASE("eig output is deterministic") {
    RngStream rng(7, 0);
    ComplexMatrix h = random_hermitian(4, rng);
    HermitianSpectrum a = eig_hermitian(h);
    HermitianSpectrum b = eig_hermitian(h);
    CHECK(max_abs_diff(a.eigenvectors, b.eigenvectors) == 0.0);
    CHECK(a.eigenvalues == b.eigenvalues);
}

TEST_CASE("trace norm basics") {
    CHECK(trace_norm(ComplexMatrix::identity(2)) == doctest::Approx(2.0));

    ComplexMatrix diff(2);
    diff.at(0, 0) = 1.0;
    diff.at(1, 1) = -1.0;
    CHECK(trace_norm(diff) == doctest::Approx(2.0));
}

TEST_CASE("trace distance of two pure states with overlap 0.6") {
    Cvec v1{1.0, 0.0};
    Cvec v2{0.6, 0.8};
    double half_dist = 0.5 * trace_norm(outer(v1, v1) - outer(v2, v2));
    CHECK(half_dist == doctest::Approx(std::sqrt(1.0 - 0.36)).epsilon(1e-12));
    CHECK(half_dist == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("trace norm triangle inequality and unitary invariance") {
    RngStream rng(99, 0);
    for (int i = 0; i < 50; ++i) {
        ComplexMatrix a = random_hermitian(3, rng);
        ComplexMatrix b = random_hermitian(3, rng);
        CHECK(trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-9);

        // eigenvector matrix of a random Hermitian is a random unitary
        ComplexMatrix u = eig_hermitian(random_hermitian(3, rng)).eigenvectors;
        CHECK(trace_norm(u * a * u.adjoint()) == doctest::Approx(trace_norm(a)).epsilon(1e-9));
    }
}

TEST_CASE("gram matrix of an orthonormal basis is the identity") {
    std::vector<Cvec> basis{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    std::vector<double> w{1.0, 1.0, 1.0};
    CHECK(max_abs_diff(gram_matrix(basis, w), ComplexMatrix::identity(3)) < 1e-15);
}

TEST_CASE("gram matrix off-diagonal carries sqrt(a1 a2) s") {
    const double s = 0.37;
    std::vector<Cvec> vecs{{1.0, 0.0}, {s, std::sqrt(1.0 - s * s)}};
    std::vector<double> w{0.4, 2.5};
    ComplexMatrix g = gram_matrix(vecs, w);
    CHECK(g.at(0, 1).real() == doctest::Approx(std::sqrt(0.4 * 2.5) * s).epsilon(1e-12));
    CHECK(g.at(0, 1).imag() == doctest::Approx(0.0));
    CHECK(g.at(0, 0).real() == doctest::Approx(0.4));
}

TEST_CASE("gram matrix of random states is PSD") {
    RngStream rng(123, 0);
    for (int i = 0; i < 25; ++i) {
        std::vector<Cvec> vecs;
        std::vector<double> w;
        for (int k = 0; k < 4; ++k) {
            vecs.push_back(haar_state(3, rng).amplitudes());
            w.push_back(rng.next_uniform() + 0.1);
        }
        HermitianSpectrum s = eig_hermitian(gram_matrix(vecs, w));
        CHECK(s.eigenvalues.back() >= -1e-10);
    }
}

TEST_CASE("ensemble_from_gram round trip") {
    SUBCASE("identity gram gives an orthonormal unit-weight family") {
        WeightedVectors wv = ensemble_from_gram(ComplexMatrix::identity(3));
        for (int i = 0; i < 3; ++i) {
            CHECK(wv.weights[static_cast<size_t>(i)] == doctest::Approx(1.0).epsilon(1e-10));
            for (int j = i + 1; j < 3; ++j)
                CHECK(std::abs(inner(wv.vectors[static_cast<size_t>(i)],
                                     wv.vectors[static_cast<size_t>(j)])) < 1e-10);
        }
    }

    SUBCASE("seeded ensembles round trip through their gram") {
        RngStream rng(31, 0);
        for (int i = 0; i < 25; ++i) {
            std::vector<Cvec> vecs;
            std::vector<double> w;
            for (int k = 0; k < 3; ++k) {
                vecs.push_back(haar_state(3, rng).amplitudes());
                w.push_back(rng.next_uniform() + 0.05);
            }
            ComplexMatrix g = gram_matrix(vecs, w);
            WeightedVectors wv = ensemble_from_gram(g);
            CHECK(max_abs_diff(gram_matrix(wv.vectors, wv.weights), g) < 1e-8);
        }
    }

    SUBCASE("rank-1 gram of size 3 factors into parallel dimension-1 vectors") {
        Cvec all_ones{1.0, 1.0, 1.0};
        std::vector<Cvec> vecs{{1.0}, {1.0}, {1.0}};
        std::vector<double> w{1.0, 1.0, 1.0};
        ComplexMatrix g = gram_matrix(vecs, w);
        WeightedVectors wv = ensemble_from_gram(g);
        for (const Cvec& v : wv.vectors) CHECK(v.size() == 1);
        CHECK(max_abs_diff(gram_matrix(wv.vectors, wv.weights), g) < 1e-8);
    }

    SUBCASE("non-PSD input is rejected") {
        ComplexMatrix g(2);
        g.at(0, 1) = 1.0;
        g.at(1, 0) = 1.0;  // eigenvalues +-1
        CHECK_THROWS_AS(ensemble_from_gram(g), NotPsd);
    }
}

TEST_CASE("numerical rank") {
    std::vector<Cvec> basis{{1.0, 0.0}, {0.0, 1.0}};
    CHECK(numerical_rank(basis) == 2);

    SUBCASE("trine states are dependent") {
        std::vector<Cvec> trine;
        for (int k = 1; k <= 3; ++k) {
            double phase = 2.0 * M_PI * k / 3.0;
            trine.push_back({Complex(1.0 / std::sqrt(2.0), 0.0),
                             Complex(std::cos(phase) / std::sqrt(2.0),
                                     std::sin(phase) / std::sqrt(2.0))});
        }
        CHECK(numerical_rank(trine) == 2);
    }

    SUBCASE("closed-form MC directions at p=0.8, theta=pi/3 are independent") {
        const double pc = 0.8 * std::cos(M_PI / 3.0);
        const double a = std::sqrt((1.0 + pc) / 2.0);
        const double b = std::sqrt((1.0 - pc) / 2.0);
        std::vector<Cvec> dirs{{b, a}, {b, -a}};
        CHECK(numerical_rank(dirs) == 2);
    }

    SUBCASE("permutation and positive-scale invariance") {
        RngStream rng(55, 0);
        std::vector<Cvec> vecs;
        for (int k = 0; k < 3; ++k) vecs.push_back(haar_state(4, rng).amplitudes());
        int r = numerical_rank(vecs);

        std::vector<Cvec> permuted{vecs[2], vecs[0], vecs[1]};
        CHECK(numerical_rank(permuted) == r);

        std::vector<Cvec> scaled = vecs;
        for (Cvec& v : scaled)
            for (Complex& x : v) x *= 3.7;
        CHECK(numerical_rank(scaled) == r);
    }
}

TEST_CASE("matrix sqrt of a PSD matrix squares back") {
    RngStream rng(77, 0);
    ComplexMatrix g = random_hermitian(3, rng);
    ComplexMatrix psd = g * g.adjoint();
    ComplexMatrix root = matrix_sqrt_psd(psd);
    CHECK(max_abs_diff(root * root, psd) < 1e-9);
}

TEST_CASE("dimension cap is enforced") {
    CHECK_THROWS_AS(ComplexMatrix(17), DimensionMismatch);
    int& cap = max_dimension();
    int old = cap;
    cap = 20;
    CHECK_NOTHROW(ComplexMatrix(18));
    cap = old;
}

}  // TEST_SUITE
