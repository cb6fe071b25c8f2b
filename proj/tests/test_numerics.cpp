#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lrm/grad_check.hpp"
#include "lrm/matrix.hpp"
#include "lrm/optim.hpp"
#include "lrm/param_store.hpp"
#include "lrm/pca.hpp"
#include "lrm/rng.hpp"
#include "oracles.hpp"

using namespace lrm;

namespace {
Matrix random_matrix(size_t r, size_t c, Rng& rng) {
    Matrix m(r, c);
    for (double& x : m.data) x = rng.normal();
    return m;
}
}  // namespace

TEST_CASE("matmul identity") {
    Rng rng(7);
    const Matrix a = random_matrix(3, 3, rng);
    const Matrix out = matmul(Matrix::identity(3), a);
    for (size_t i = 0; i < a.data.size(); ++i) CHECK(out.data[i] == a.data[i]);
}

TEST_CASE("matmul hand arithmetic") {
    const Matrix a(2, 2, {1, 2, 3, 4});
    const Matrix b(2, 1, {0, 1});
    const Matrix out = matmul(a, b);
    CHECK(out.at(0, 0) == 2.0);
    CHECK(out.at(1, 0) == 4.0);
}

TEST_CASE("matmul vs naive triple-loop oracle") {
    Rng rng(11);
    const Matrix a = random_matrix(7, 5, rng);
    const Matrix b = random_matrix(5, 3, rng);
    const Matrix got = matmul(a, b);
    const Matrix want = oracle::naive_matmul(a, b);
    for (size_t i = 0; i < got.data.size(); ++i)
        CHECK(std::abs(got.data[i] - want.data[i]) < 1e-12);
}

TEST_CASE("matmul dimension mismatch") {
    CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 2)), std::invalid_argument);
}

TEST_CASE("matmul associativity on random conformable triples") {
    Rng rng(13);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix a = random_matrix(4, 6, rng);
        const Matrix b = random_matrix(6, 3, rng);
        const Matrix c = random_matrix(3, 5, rng);
        const Matrix left = matmul(matmul(a, b), c);
        const Matrix right = matmul(a, matmul(b, c));
        for (size_t i = 0; i < left.data.size(); ++i) {
            const double scale = std::max({1.0, std::abs(left.data[i]), std::abs(right.data[i])});
            CHECK(std::abs(left.data[i] - right.data[i]) / scale < 1e-10);
        }
    }
}

TEST_CASE("param store slices are disjoint and cover the buffer") {
    ParamStore store;
    store.add_slice("a", 3);
    store.add_slice("b", 5);
    CHECK(store.size() == 8);
    CHECK(store.get("a").offset == 0);
    CHECK(store.get("b").offset == 3);
    CHECK(store.slice_of(4) == "b");
    CHECK_THROWS_AS(store.add_slice("a", 1), std::invalid_argument);
    CHECK_THROWS_AS(store.values("missing"), std::invalid_argument);
}

TEST_CASE("adam: zero gradients never change parameters") {
    ParamStore store;
    store.add_slice("w", 4);
    auto w = store.values("w");
    for (size_t i = 0; i < 4; ++i) w[i] = 1.0 + static_cast<double>(i);
    const std::vector<double> before = store.values();
    AdamState state(store.size(), 1e-2);
    for (int step = 0; step < 10; ++step) {
        store.zero_grads();
        adam_step(store, state);
    }
    CHECK(store.values() == before);
}

TEST_CASE("adam: moments decay toward zero under zero gradients") {
    ParamStore store;
    store.add_slice("w", 1);
    AdamState state(1, 1e-3);
    state.m[0] = 1.0;
    state.v[0] = 1.0;
    store.zero_grads();
    adam_step(store, state);
    CHECK(state.m[0] == doctest::Approx(0.9));
    CHECK(state.v[0] == doctest::Approx(0.999));
}

TEST_CASE("adam single scalar step matches closed form") {
    ParamStore store;
    store.add_slice("x", 1);
    store.values("x")[0] = 0.5;
    store.grads("x")[0] = 1.0;
    AdamState state(1, 1e-2);
    adam_step(store, state);
    const double want = oracle::adam_single_step(0.5, 1.0, 1e-2, state.beta1, state.beta2, state.eps);
    CHECK(store.values("x")[0] == doctest::Approx(want).epsilon(1e-14));
    CHECK(state.step == 1);
}

TEST_CASE("adam determinism: identical runs produce identical parameters") {
    auto run = [] {
        ParamStore store;
        store.add_slice("w", 8);
        Rng rng(99);
        for (auto& x : store.values()) x = rng.normal();
        AdamState state(store.size(), 3e-3);
        for (int step = 0; step < 25; ++step) {
            Rng grad_rng(Rng::mix(42, static_cast<uint64_t>(step)));
            for (auto& g : store.grads()) g = grad_rng.normal();
            adam_step(store, state);
        }
        return store.values();
    };
    CHECK(run() == run());
}

TEST_CASE("adam rejects non-finite gradients with the slice name") {
    ParamStore store;
    store.add_slice("good", 2);
    store.add_slice("bad", 2);
    store.grads("bad")[1] = std::nan("");
    AdamState state(store.size());
    CHECK_THROWS_WITH_AS(adam_step(store, state),
                         "adam_step: non-finite gradient in slice 'bad'", std::runtime_error);
}

TEST_CASE("finite differences of p^2 at p=3") {
    auto f = [](const std::vector<double>& p) { return p[0] * p[0]; };
    const auto grad = finite_diff_grad(f, {3.0}, 1e-5);
    CHECK(std::abs(grad[0] - 6.0) < 1e-8);
}

TEST_CASE("finite differences of a constant") {
    auto f = [](const std::vector<double>&) { return 4.25; };
    const auto grad = finite_diff_grad(f, {1.0, -2.0, 0.5}, 1e-6);
    for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("finite differences rejects h <= 0 and non-finite f") {
    auto f = [](const std::vector<double>& p) { return 1.0 / p[0]; };
    CHECK_THROWS_AS(finite_diff_grad(f, {1.0}, 0.0), std::invalid_argument);
    auto nanf = [](const std::vector<double>&) { return std::nan(""); };
    CHECK_THROWS_AS(finite_diff_grad(nanf, {1.0}, 1e-6), std::runtime_error);
}

TEST_CASE("pca: collinear rows through (3,4)/5") {
    Matrix rows(4, 2);
    for (int i = 0; i < 4; ++i) {
        rows.at(i, 0) = 0.6 * i;
        rows.at(i, 1) = 0.8 * i;
    }
    const auto p = pca_first_component(rows);
    CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-10));
    CHECK(p[1] == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("pca: antipodal two-point cloud") {
    const Matrix rows(2, 2, {1, 0, -1, 0});
    const auto p = pca_first_component(rows);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(std::abs(p[1]) < 1e-12);
}

TEST_CASE("pca: identical rows are a degenerate input") {
    const Matrix rows(3, 2, {1, 2, 1, 2, 1, 2});
    CHECK_THROWS_AS(pca_first_component(rows), std::runtime_error);
    CHECK_THROWS_AS(pca_first_component(Matrix(1, 2, {1, 2})), std::invalid_argument);
}

TEST_CASE("pca vs eigendecomposition oracle with characteristic-polynomial cross-check") {
    Rng rng(1234);
    Matrix rows(50, 4);
    // anisotropic cloud so the leading eigenvalue is well separated
    for (size_t i = 0; i < rows.rows; ++i) {
        const double a = rng.normal() * 3.0;
        const double b = rng.normal();
        rows.at(i, 0) = a + 0.2 * b;
        rows.at(i, 1) = 0.5 * a - b;
        rows.at(i, 2) = rng.normal() * 0.3;
        rows.at(i, 3) = 0.1 * a + rng.normal() * 0.2;
    }
    const auto p = pca_first_component(rows);

    const Matrix cov = oracle::covariance(rows);
    const auto eig = oracle::jacobi_eigen(cov);
    size_t top = 0;
    for (size_t i = 1; i < eig.values.size(); ++i)
        if (eig.values[i] > eig.values[top]) top = i;

    // cross-check: the top eigenvalue is a root of det(C - lambda I)
    Matrix shifted = cov;
    for (size_t i = 0; i < 4; ++i) shifted.at(i, i) -= eig.values[top];
    double scale = 0.0;
    for (double v : cov.data) scale = std::max(scale, std::abs(v));
    CHECK(std::abs(oracle::determinant(shifted)) < 1e-9 * std::pow(scale, 3));

    double cos_angle = 0.0;
    for (size_t i = 0; i < 4; ++i) cos_angle += p[i] * eig.vectors.at(i, top);
    CHECK(std::abs(cos_angle) > 1.0 - 1e-9);
}

TEST_CASE("pca output is unit norm and permutation invariant") {
    Rng rng(555);
    Matrix rows(12, 3);
    for (double& x : rows.data) x = rng.normal();
    const auto p = pca_first_component(rows);
    CHECK(std::abs(norm2(p) - 1.0) < 1e-12);

    Matrix permuted(12, 3);
    std::vector<size_t> order = {5, 2, 9, 0, 11, 3, 7, 1, 10, 4, 8, 6};
    for (size_t i = 0; i < order.size(); ++i)
        for (size_t j = 0; j < 3; ++j) permuted.at(i, j) = rows.at(order[i], j);
    const auto p2 = pca_first_component(permuted);
    for (size_t j = 0; j < 3; ++j) CHECK(p2[j] == doctest::Approx(p[j]).epsilon(1e-9));
}

TEST_CASE("rng: identical seeds give identical streams, different seeds differ") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        if (va != c.next_u64()) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("rng: sample_indices yields distinct in-range indices") {
    Rng rng(7);
    const auto idx = rng.sample_indices(100, 30);
    CHECK(idx.size() == 30);
    std::vector<bool> seen(100, false);
    for (size_t i : idx) {
        CHECK(i < 100);
        CHECK(!seen[i]);
        seen[i] = true;
    }
}

TEST_CASE("rng: uniform stays in range, normal has sane spread") {
    Rng rng(3);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double n = rng.normal();
        sum += n;
        sum2 += n * n;
    }
    CHECK(std::abs(sum / 10000.0) < 0.05);
    CHECK(std::abs(sum2 / 10000.0 - 1.0) < 0.05);
}
