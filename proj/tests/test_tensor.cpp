#include "doctest.h"

#include <cmath>

#include "axel/tensor.hpp"

using namespace axel;
using ad::Tensor;

namespace {

Matrix random_matrix(int r, int c, Rng& rng) {
    Matrix m(r, c);
    for (double& v : m.data) v = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("matmul identity and hand arithmetic") {
    ad::Tape t;
    const Tensor m = ad::make_tensor(Matrix::from_rows({{1, 2}, {3, 4}}));
    const Tensor id = ad::make_tensor(Matrix::identity(2));
    const Tensor prod = ad::matmul(t, id, m);
    CHECK(prod->value.at(0, 0) == 1.0);
    CHECK(prod->value.at(0, 1) == 2.0);
    CHECK(prod->value.at(1, 0) == 3.0);
    CHECK(prod->value.at(1, 1) == 4.0);

    const Tensor ones = ad::make_tensor(Matrix::from_rows({{1}, {1}}));
    const Tensor v = ad::matmul(t, m, ones);
    CHECK(v->value.at(0, 0) == 3.0);
    CHECK(v->value.at(1, 0) == 7.0);

    CHECK_THROWS_AS(ad::matmul(t, m, ad::make_tensor(Matrix(3, 2))), DimensionError);
}

TEST_CASE("matmul gradients match central finite differences") {
    Rng rng(21);
    const Matrix a = random_matrix(3, 4, rng);
    const Matrix b = random_matrix(4, 2, rng);
    const double err = ad::check_gradients(
        [](ad::Tape& t, const std::vector<Tensor>& xs) {
            return ad::sum_all(t, ad::sigmoid(t, ad::matmul(t, xs[0], xs[1])));
        },
        {a, b});
    CHECK(err < 1e-5);
}

TEST_CASE("sigmoid values and saturation stay inside (0,1)") {
    ad::Tape t;
    const Tensor x = ad::make_tensor(Matrix::from_rows({{0.0, 50.0, -50.0, 1.0, 800.0, -800.0}}));
    const Tensor y = ad::sigmoid(t, x);
    CHECK(y->value.at(0, 0) == 0.5);
    CHECK(y->value.at(0, 1) > 1.0 - 1e-9);
    CHECK(y->value.at(0, 1) < 1.0);
    CHECK(y->value.at(0, 2) < 1e-9);
    CHECK(y->value.at(0, 2) > 0.0);
    CHECK(y->value.at(0, 3) == doctest::Approx(0.7310585786).epsilon(1e-9));
    CHECK(y->value.at(0, 4) < 1.0);
    CHECK(y->value.at(0, 5) > 0.0);
}

TEST_CASE("cosine_rows handles identical, orthogonal and anti-parallel rows") {
    ad::Tape t;
    const Tensor a = ad::make_tensor(Matrix::from_rows({{1, 0, 0}, {1, 0, 0}, {1, 1, 0}, {2, 0, 0}}));
    const Tensor b = ad::make_tensor(Matrix::from_rows({{1, 0, 0}, {0, 1, 0}, {1, -1, 0}, {-3, 0, 0}}));
    const Tensor c = ad::cosine_rows(t, a, b, 1e-8);
    CHECK(c->value.at(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(c->value.at(1, 0) == 0.0);
    CHECK(c->value.at(2, 0) == 0.0);
    CHECK(c->value.at(3, 0) == doctest::Approx(-1.0).epsilon(1e-7));

    // zero rows resolve to 0 through the eps guard
    const Tensor z = ad::make_tensor(Matrix(1, 3));
    const Tensor w = ad::make_tensor(Matrix::from_rows({{1, 2, 3}}));
    CHECK(ad::cosine_rows(t, z, w)->value.at(0, 0) == 0.0);
}

TEST_CASE("cosine_rows stays in [-1,1] on random inputs") {
    Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        ad::Tape t;
        Matrix a = random_matrix(4, 5, rng);
        Matrix b = random_matrix(4, 5, rng);
        for (double& v : a.data) v *= 1e6;  // stress the normalization
        const Tensor c = ad::cosine_rows(t, ad::make_tensor(a), ad::make_tensor(b));
        for (double v : c->value.data) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("backward on linear and quadratic forms") {
    {
        ad::Tape t;
        const Tensor x = ad::make_tensor(Matrix::from_rows({{5, -1, 2}}), true);
        const Tensor loss = ad::sum_all(t, x);
        t.backward(loss);
        CHECK(x->grad.at(0, 0) == 1.0);
        CHECK(x->grad.at(0, 1) == 1.0);
        CHECK(x->grad.at(0, 2) == 1.0);
    }
    {
        ad::Tape t;
        const Tensor x = ad::make_tensor(Matrix::from_rows({{1, 2, 3}}), true);
        const Tensor loss = ad::sum_all(t, ad::hadamard(t, x, x));
        t.backward(loss);
        CHECK(x->grad.at(0, 0) == 2.0);
        CHECK(x->grad.at(0, 1) == 4.0);
        CHECK(x->grad.at(0, 2) == 6.0);
    }
}

TEST_CASE("backward contract errors") {
    ad::Tape t;
    const Tensor x = ad::make_tensor(Matrix(2, 2), true);
    const Tensor y = ad::add(t, x, x);
    CHECK_THROWS_AS(t.backward(y), ContractError);  // non-scalar loss

    ad::Tape t2;
    const Tensor z = ad::make_tensor(Matrix(1, 3), true);
    const Tensor loss = ad::sum_all(t2, z);
    t2.backward(loss);
    CHECK_THROWS_AS(t2.backward(loss), ContractError);  // double backward
    t2.reset();
}

TEST_CASE("fan-out gradients add exactly") {
    // loss = f(x) + g(x) with f = sum(2x), g = sum(x*x)
    ad::Tape t;
    const Tensor x = ad::make_tensor(Matrix::from_rows({{1.5, -2.0}}), true);
    const Tensor f = ad::sum_all(t, ad::scale(t, x, 2.0));
    const Tensor g = ad::sum_all(t, ad::hadamard(t, x, x));
    const Tensor loss = ad::add(t, f, g);
    t.backward(loss);
    CHECK(x->grad.at(0, 0) == 2.0 + 2.0 * 1.5);
    CHECK(x->grad.at(0, 1) == 2.0 + 2.0 * -2.0);
}

TEST_CASE("check_gradients on simple functions") {
    Rng rng(23);
    // linear: exact up to FD truncation on the oracle itself
    const double lin = ad::check_gradients(
        [](ad::Tape& t, const std::vector<Tensor>& xs) { return ad::sum_all(t, xs[0]); },
        random_matrix(2, 3, rng));
    CHECK(lin < 1e-10);

    const double sig = ad::check_gradients(
        [](ad::Tape& t, const std::vector<Tensor>& xs) {
            return ad::sigmoid(t, ad::sum_all(t, xs[0]));
        },
        Matrix(1, 4));
    CHECK(sig < 1e-7);
}

TEST_CASE("every elementwise op passes finite-difference checks over 10 seeds") {
    for (int seed = 0; seed < 10; ++seed) {
        Rng rng(100 + seed);
        const Matrix x = random_matrix(3, 4, rng);
        const Matrix y = random_matrix(3, 4, rng);
        const Matrix rv = random_matrix(1, 4, rng);
        const Matrix sc = random_matrix(1, 1, rng);

        auto check2 = [&](auto builder) {
            const double err = ad::check_gradients(builder, std::vector<Matrix>{x, y});
            CHECK(err < 1e-4);
        };
        check2([](ad::Tape& t, const std::vector<Tensor>& v) {
            return ad::sum_all(t, ad::sigmoid(t, ad::add(t, v[0], v[1])));
        });
        check2([](ad::Tape& t, const std::vector<Tensor>& v) {
            return ad::sum_all(t, ad::tanh_op(t, ad::sub(t, v[0], v[1])));
        });
        check2([](ad::Tape& t, const std::vector<Tensor>& v) {
            return ad::sum_all(t, ad::hadamard(t, v[0], v[1]));
        });
        check2([](ad::Tape& t, const std::vector<Tensor>& v) {
            return ad::sum_all(t, ad::cosine_rows(t, v[0], v[1]));
        });

        const double e_rowvec = ad::check_gradients(
            [](ad::Tape& t, const std::vector<Tensor>& v) {
                return ad::sum_all(t, ad::sigmoid(t, ad::mul_rowvec(t, ad::add_rowvec(t, v[0], v[1]), v[1])));
            },
            std::vector<Matrix>{x, rv});
        CHECK(e_rowvec < 1e-4);

        const double e_scalar = ad::check_gradients(
            [](ad::Tape& t, const std::vector<Tensor>& v) {
                const Tensor beta = ad::exp_op(t, v[1]);
                const Tensor theta = ad::tanh_op(t, v[2]);
                return ad::sum_all(t,
                                   ad::sigmoid(t, ad::mul_scalar_t(t, ad::sub_scalar_t(t, v[0], theta), beta)));
            },
            std::vector<Matrix>{x, sc, random_matrix(1, 1, rng)});
        CHECK(e_scalar < 1e-4);

        const double e_slice = ad::check_gradients(
            [](ad::Tape& t, const std::vector<Tensor>& v) {
                const Tensor s1 = ad::slice_cols(t, v[0], 0, 2);
                const Tensor s2 = ad::slice_cols(t, v[0], 2, 4);
                const Tensor cat = ad::concat_cols(t, {s2, s1});
                return ad::sum_all(t, ad::hadamard(t, cat, cat));
            },
            std::vector<Matrix>{x});
        CHECK(e_slice < 1e-4);

        const double e_gather = ad::check_gradients(
            [](ad::Tape& t, const std::vector<Tensor>& v) {
                const Tensor gathered = ad::gather_rows(t, v[0], {2, 0, 0, 1});
                return ad::sum_all(t, ad::sigmoid(t, gathered));
            },
            std::vector<Matrix>{x});
        CHECK(e_gather < 1e-4);

        const double e_lsm = ad::check_gradients(
            [](ad::Tape& t, const std::vector<Tensor>& v) {
                const Tensor lp = ad::log_softmax_rows(t, v[0]);
                return ad::nll_masked(t, lp, {1, 0, 3}, {1, 1, 0});
            },
            std::vector<Matrix>{x});
        CHECK(e_lsm < 1e-4);

        Matrix target(3, 1);
        for (double& v : target.data) v = rng.uniform();
        const double e_mae = ad::check_gradients(
            [&target](ad::Tape& t, const std::vector<Tensor>& v) {
                const Tensor pred = ad::sigmoid(t, ad::slice_cols(t, v[0], 0, 1));
                return ad::mae_masked(t, pred, target, {1, 1, 1});
            },
            std::vector<Matrix>{x});
        CHECK(e_mae < 1e-4);
    }
}

TEST_CASE("dropout scales kept coordinates by 1/(1-p) and is identity in eval") {
    Rng rng(31);
    ad::Tape t;
    Matrix x(1, 10000, 1.0);
    const Tensor xt = ad::make_tensor(x, true);
    const Tensor train_out = ad::dropout(t, xt, 0.25, rng, true);
    int kept = 0;
    for (double v : train_out->value.data) {
        CHECK((v == 0.0 || v == doctest::Approx(1.0 / 0.75)));
        kept += v != 0.0;
    }
    CHECK(kept > 7000);
    CHECK(kept < 8000);

    const Tensor eval_out = ad::dropout(t, xt, 0.25, rng, false);
    for (int i = 0; i < x.size(); ++i) CHECK(eval_out->value.data[i] == 1.0);
}

TEST_CASE("tape determinism: same seed gives bitwise-identical grads") {
    auto run = [](std::uint64_t seed) {
        Rng rng(seed);
        Matrix x = random_matrix(4, 6, rng);
        Matrix w = random_matrix(6, 3, rng);
        ad::Tape t;
        const Tensor xt = ad::make_tensor(x, true);
        const Tensor wt = ad::make_tensor(w, true);
        const Tensor loss = ad::sum_all(t, ad::sigmoid(t, ad::matmul(t, xt, wt)));
        t.backward(loss);
        return std::pair{xt->grad, wt->grad};
    };
    const auto [g1x, g1w] = run(99);
    const auto [g2x, g2w] = run(99);
    for (int i = 0; i < g1x.size(); ++i) CHECK(g1x.data[i] == g2x.data[i]);
    for (int i = 0; i < g1w.size(); ++i) CHECK(g1w.data[i] == g2w.data[i]);
}
