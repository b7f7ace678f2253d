#include "doctest.h"

#include <cmath>

#include "lachesis/neural.hpp"

using namespace lachesis;

namespace {

// Central-difference oracle for d(sum of outputs)/d(param).
double fd_param(DenseNet net, std::size_t layer, std::size_t idx, bool bias,
                const Vec& x, double eps) {
    auto eval = [&](double delta) {
        DenseNet probe = net;
        if (bias) {
            probe.b[layer][idx] += delta;
        } else {
            probe.w[layer].a[idx] += delta;
        }
        const Vec out = probe.forward(x);
        double s = 0.0;
        for (double v : out) s += v;
        return s;
    };
    return (eval(eps) - eval(-eps)) / (2.0 * eps);
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

} // namespace

TEST_CASE("zero network maps everything to zero") {
    Rng rng(1);
    DenseNet net = DenseNet::create({3, 4, 2}, rng);
    for (auto& m : net.w)
        for (double& v : m.a) v = 0.0;
    for (auto& b : net.b)
        for (double& v : b) v = 0.0;
    const Vec out = net.forward({1.0, -2.0, 3.0});
    CHECK(out == Vec{0.0, 0.0});
}

TEST_CASE("single linear layer with identity weights echoes the input") {
    Rng rng(1);
    DenseNet net = DenseNet::create({3, 3}, rng);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) net.w[0].at(r, c) = r == c ? 1.0 : 0.0;
        net.b[0][r] = 0.0;
    }
    const Vec x{0.5, -1.5, 2.0};
    CHECK(net.forward(x) == x);
}

TEST_CASE("forward is deterministic and shape-checked") {
    Rng a(7), b(7);
    const DenseNet na = DenseNet::create({4, 8, 2}, a);
    const DenseNet nb = DenseNet::create({4, 8, 2}, b);
    const Vec x{1, 2, 3, 4};
    CHECK(na.forward(x) == nb.forward(x));
    CHECK_THROWS_AS(na.forward({1, 2}), DimMismatch);
}

TEST_CASE("gradients match central differences on random 3-layer nets") {
    Rng rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        DenseNet net = DenseNet::create({5, 7, 6, 3}, rng);
        Vec x(5);
        for (double& v : x) v = rng.uniform(-2.0, 2.0);

        GradTape tape;
        net.forward(x, tape);
        NetGrads grads = NetGrads::zeros_like(net);
        const Vec x_grad = backward(net, tape, Vec(3, 1.0), grads);

        double worst = 0.0;
        for (std::size_t l = 0; l < net.w.size(); ++l) {
            for (std::size_t i = 0; i < net.w[l].a.size(); i += 3) {
                worst = std::max(
                    worst, rel_err(grads.dw[l].a[i], fd_param(net, l, i, false, x, 1e-5)));
            }
            for (std::size_t i = 0; i < net.b[l].size(); ++i) {
                worst = std::max(
                    worst, rel_err(grads.db[l][i], fd_param(net, l, i, true, x, 1e-5)));
            }
        }
        // input gradient against finite differences too
        for (std::size_t i = 0; i < x.size(); ++i) {
            Vec xp = x, xm = x;
            xp[i] += 1e-5;
            xm[i] -= 1e-5;
            double sp = 0.0, sm = 0.0;
            for (double v : net.forward(xp)) sp += v;
            for (double v : net.forward(xm)) sm += v;
            worst = std::max(worst, rel_err(x_grad[i], (sp - sm) / 2e-5));
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("gradient check covers every network shape the policy uses") {
    // child aggregator, edge aggregator, job net, global net, score head, critic
    const std::vector<std::vector<std::size_t>> shapes = {
        {8, 16, 8}, {2, 16, 8}, {10, 16, 8}, {8, 16, 8}, {36, 32, 16, 8, 1},
        {13, 32, 16, 8, 1}};
    Rng rng(77);
    for (const auto& dims : shapes) {
        DenseNet net = DenseNet::create(dims, rng);
        Vec x(net.in_dim());
        for (double& v : x) v = rng.uniform(-1.5, 1.5);
        GradTape tape;
        net.forward(x, tape);
        NetGrads grads = NetGrads::zeros_like(net);
        backward(net, tape, Vec(net.out_dim(), 1.0), grads);
        double worst = 0.0;
        for (std::size_t l = 0; l < net.w.size(); ++l) {
            for (std::size_t i = 0; i < net.w[l].a.size(); i += 17) {
                worst = std::max(
                    worst, rel_err(grads.dw[l].a[i], fd_param(net, l, i, false, x, 1e-5)));
            }
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("zero output gradient gives zero parameter gradients") {
    Rng rng(9);
    DenseNet net = DenseNet::create({3, 4, 2}, rng);
    GradTape tape;
    net.forward({1.0, 2.0, 3.0}, tape);
    NetGrads grads = NetGrads::zeros_like(net);
    backward(net, tape, {0.0, 0.0}, grads);
    for (const auto& m : grads.dw)
        for (double v : m.a) CHECK(v == 0.0);
}

TEST_CASE("gradients scale linearly with the output gradient") {
    Rng rng(10);
    DenseNet net = DenseNet::create({3, 5, 1}, rng);
    const Vec x{0.3, -0.7, 1.1};
    GradTape t1, t2;
    net.forward(x, t1);
    net.forward(x, t2);
    NetGrads g1 = NetGrads::zeros_like(net);
    NetGrads g2 = NetGrads::zeros_like(net);
    backward(net, t1, {1.0}, g1);
    backward(net, t2, {2.5}, g2);
    for (std::size_t l = 0; l < g1.dw.size(); ++l) {
        for (std::size_t i = 0; i < g1.dw[l].a.size(); ++i) {
            CHECK(g2.dw[l].a[i] == doctest::Approx(2.5 * g1.dw[l].a[i]));
        }
    }
}

TEST_CASE("a tape cannot be consumed twice") {
    Rng rng(3);
    DenseNet net = DenseNet::create({2, 3, 1}, rng);
    GradTape tape;
    net.forward({1.0, 2.0}, tape);
    NetGrads grads = NetGrads::zeros_like(net);
    backward(net, tape, {1.0}, grads);
    CHECK_THROWS_AS(backward(net, tape, {1.0}, grads), TapeMismatch);
}

TEST_CASE("sgd steps") {
    Rng rng(4);
    DenseNet net = DenseNet::create({1, 1}, rng);

    SUBCASE("zero learning rate changes nothing") {
        const DenseNet before = net;
        NetGrads grads = NetGrads::zeros_like(net);
        grads.dw[0].a[0] = 5.0;
        sgd_step(net, grads, 0.0, -1.0);
        CHECK(net.w[0].a == before.w[0].a);
    }
    SUBCASE("zero gradient changes nothing") {
        const DenseNet before = net;
        sgd_step(net, NetGrads::zeros_like(net), 0.5, -1.0);
        CHECK(net.w[0].a == before.w[0].a);
        CHECK(net.b[0] == before.b[0]);
    }
    SUBCASE("descent on a 1-d quadratic loss decreases monotonically") {
        // loss = (w*x - y)^2 with x=1, y=2
        double prev_loss = 1e18;
        for (int iter = 0; iter < 40; ++iter) {
            GradTape tape;
            const double out = net.forward({1.0}, tape)[0];
            const double loss = (out - 2.0) * (out - 2.0);
            CHECK(loss <= prev_loss + 1e-12);
            prev_loss = loss;
            NetGrads grads = NetGrads::zeros_like(net);
            backward(net, tape, {2.0 * (out - 2.0)}, grads);
            sgd_step(net, grads, 0.05, -1.0);
        }
        CHECK(prev_loss < 1e-3);
    }
}

TEST_CASE("running norm standardizes and freezes") {
    RunningNorm norm(2);
    const double a[2] = {1.0, 10.0};
    const double b[2] = {3.0, 30.0};
    double out[2];
    norm.normalize(a, out, 2); // pass-through before enough data
    CHECK(out[0] == 1.0);
    norm.observe(a, 2);
    norm.observe(b, 2);
    norm.normalize(a, out, 2);
    CHECK(out[0] == doctest::Approx(-1.0).epsilon(1e-3));
    norm.freeze();
    norm.observe(b, 2); // ignored while frozen
    CHECK(norm.count() == 2);
}
