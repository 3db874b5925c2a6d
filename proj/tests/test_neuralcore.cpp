#include "foilforge/error.hpp"
#include "foilforge/neuralcore.hpp"
#include "foilforge/rng.hpp"

#include <cmath>
#include <doctest.h>

using namespace foilforge;
using namespace foilforge::nn;

namespace {

Tensor random_tensor(Shape dims, std::uint64_t seed, double scale = 1.0) {
    Tensor t(std::move(dims));
    Rng rng(seed);
    for (double& v : t.data) {
        v = scale * (2.0 * rng.uniform() - 1.0);
    }
    return t;
}

// Small random biases so the check also exercises the bias paths away from zero.
Parameters jittered(const Network& net, std::uint64_t seed) {
    Parameters p = init_params(net, seed);
    Rng rng(seed + 99);
    for (auto& b : p.biases) {
        for (double& v : b) {
            v = 0.1 * rng.normal();
        }
    }
    return p;
}

double check(const Network& net, std::size_t batch, std::uint64_t seed) {
    Batch b;
    Shape in{batch};
    in.insert(in.end(), net.input_shape().begin(), net.input_shape().end());
    b.input = random_tensor(in, seed);
    if (net.scalar_inputs()) {
        b.scalars = random_tensor({batch, net.scalar_inputs()}, seed + 1);
    }
    Shape out{batch};
    out.insert(out.end(), net.output_shape().begin(), net.output_shape().end());
    const auto target = random_tensor(out, seed + 2);
    const auto r = gradient_check(net, jittered(net, seed), b, target);
    INFO(r.worst);
    CHECK(r.probes > 0);
    return r.max_relative_error;
}

} // namespace

TEST_SUITE("neuralcore") {

TEST_CASE("dense identity, relu, and all-ones convolution") {
    Network dense({2}, 0, {LayerSpec::dense(2, 2)});
    Parameters p = zero_parameters(dense);
    p.weights[0] = {1, 0, 0, 1};
    Batch b{Tensor({1, 2}), {}};
    b.input.data = {3, -1};
    CHECK(forward(dense, p, b).data == std::vector<double>{3, -1});

    Network relu({3}, 0, {LayerSpec::relu()});
    Batch r{Tensor({1, 3}), {}};
    r.input.data = {-2, 0, 5};
    CHECK(forward(relu, zero_parameters(relu), r).data == std::vector<double>{0, 0, 5});

    Network conv({1, 4, 4}, 0, {LayerSpec::conv2d(1, 1, 4, 4)});
    Parameters cp = zero_parameters(conv);
    cp.weights[0].assign(9, 1.0);
    Batch c{Tensor({1, 1, 4, 4}, 1.0), {}};
    const auto y = forward(conv, cp, c);
    CHECK(y.dims == Shape{1, 1, 2, 2});
    CHECK(y.data == std::vector<double>{9, 9, 9, 9});
}

TEST_CASE("maxpool picks the first maximum and routes its gradient there") {
    Network pool({1, 2, 2}, 0, {LayerSpec::maxpool2d(1, 2, 2)});
    Batch b{Tensor({1, 1, 2, 2}), {}};
    b.input.data = {1, 5, 5, 0};
    Cache cache;
    const auto y = forward(pool, zero_parameters(pool), b, &cache);
    CHECK(y.data == std::vector<double>{5});
    const auto g = backward(pool, zero_parameters(pool), cache, Tensor({1, 1, 1, 1}, 2.0), true);
    CHECK(g.input.data == std::vector<double>{0, 2, 0, 0});
}

TEST_CASE("shape algebra follows the 200 pixel chain") {
    Network net({1, 200, 200}, 0,
                {LayerSpec::conv2d(1, 32, 200, 200), LayerSpec::maxpool2d(32, 198, 198), LayerSpec::conv2d(32, 64, 99, 99),
                 LayerSpec::maxpool2d(64, 97, 97), LayerSpec::conv2d(64, 128, 48, 48), LayerSpec::maxpool2d(128, 46, 46),
                 LayerSpec::flatten()});
    const std::size_t expected[] = {198, 99, 97, 48, 46, 23};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(net.shape(i + 1)[1] == expected[i]);
        CHECK(net.shape(i + 1)[2] == expected[i]);
    }
    CHECK(net.output_shape() == Shape{67712});
}

TEST_CASE("inconsistent stacks name the offending layer") {
    try {
        Network({10}, 0, {LayerSpec::dense(10, 5), LayerSpec::relu(), LayerSpec::dense(6, 2)});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShapeMismatch);
        CHECK(std::string(e.what()).find("layer 2") != std::string::npos);
    }
    Network ok({3}, 0, {LayerSpec::dense(3, 2)});
    Batch wrong{Tensor({1, 4}), {}};
    CHECK_THROWS_AS(forward(ok, zero_parameters(ok), wrong), Error);
}

TEST_CASE("gradient checks for every layer kind") {
    CHECK(check(Network({5}, 0, {LayerSpec::dense(5, 4)}), 3, 1) < 1e-5);
    CHECK(check(Network({5}, 0, {LayerSpec::dense(5, 4), LayerSpec::relu(), LayerSpec::dense(4, 3)}), 3, 2) < 1e-5);
    CHECK(check(Network({2, 6, 5}, 0, {LayerSpec::conv2d(2, 3, 6, 5)}), 2, 3) < 1e-5);
    CHECK(check(Network({2, 6, 6}, 0, {LayerSpec::maxpool2d(2, 6, 6), LayerSpec::flatten(), LayerSpec::dense(18, 2)}), 2,
                4) < 1e-5);
    CHECK(check(Network({2, 3, 3}, 0, {LayerSpec::flatten(), LayerSpec::dense(18, 3)}), 2, 5) < 1e-5);
    CHECK(check(Network({4}, 2, {LayerSpec::concat_scalars(2), LayerSpec::dense(6, 3)}), 3, 6) < 1e-5);
}

TEST_CASE("random three-layer net passes the finite-difference check") {
    Network net({6}, 0,
                {LayerSpec::dense(6, 8), LayerSpec::relu(), LayerSpec::dense(8, 7), LayerSpec::relu(), LayerSpec::dense(7, 4)});
    CHECK(check(net, 5, 11) < 1e-5);
}

TEST_CASE("zero output gradient gives zero parameter gradients") {
    Network net({4}, 0, {LayerSpec::dense(4, 3), LayerSpec::relu(), LayerSpec::dense(3, 2)});
    const auto p = init_params(net, 3);
    Batch b{random_tensor({2, 4}, 4), {}};
    Cache cache;
    forward(net, p, b, &cache);
    const auto g = backward(net, p, cache, Tensor({2, 2}));
    for (const auto& w : g.params.weights) {
        for (double v : w) {
            CHECK(v == 0.0);
        }
    }
}

TEST_CASE("dense bias gradient equals the output gradient") {
    Network net({3}, 0, {LayerSpec::dense(3, 2)});
    const auto p = init_params(net, 5);
    Batch b{random_tensor({1, 3}, 6), {}};
    Cache cache;
    forward(net, p, b, &cache);
    Tensor dy({1, 2});
    dy.data = {0.25, -1.5};
    CHECK(backward(net, p, cache, dy).params.biases[0] == dy.data);
}

TEST_CASE("gradients do not depend on the thread count") {
    Network net({1, 8, 8}, 1,
                {LayerSpec::conv2d(1, 3, 8, 8), LayerSpec::relu(), LayerSpec::maxpool2d(3, 6, 6), LayerSpec::flatten(),
                 LayerSpec::concat_scalars(1), LayerSpec::dense(28, 2)});
    const auto p = init_params(net, 8);
    Batch b{random_tensor({5, 1, 8, 8}, 9), random_tensor({5, 1}, 10)};
    Cache c1;
    Cache c4;
    const auto y1 = forward(net, p, b, &c1, {1});
    const auto y4 = forward(net, p, b, &c4, {4});
    CHECK(y1.data == y4.data);
    const auto dy = random_tensor(y1.dims, 11);
    CHECK(backward(net, p, c1, dy, false, {1}).params == backward(net, p, c4, dy, false, {4}).params);
}

TEST_CASE("mse definition and homogeneity") {
    Tensor a({1, 2});
    a.data = {1, 2};
    const auto l = mse(a, Tensor({1, 2}));
    CHECK(l.value == 2.5);
    CHECK(l.gradient.data == std::vector<double>{1, 2});
    CHECK(mse(a, a).value == 0.0);
    auto b = random_tensor({3, 4}, 1);
    auto c = random_tensor({3, 4}, 2);
    const double base = mse(b, c).value;
    for (auto* t : {&b, &c}) {
        for (double& v : t->data) {
            v *= 3.0;
        }
    }
    CHECK(mse(b, c).value == doctest::Approx(9.0 * base).epsilon(1e-14));
    CHECK_THROWS_AS(mse(a, Tensor({2, 1})), Error);
}

TEST_CASE("adam step properties") {
    Network net({2}, 0, {LayerSpec::dense(2, 1)});
    Parameters p = zero_parameters(net);
    p.weights[0] = {0.5, -0.5};
    const Parameters start = p;
    auto state = adam_init(net);
    adam_step(p, zero_parameters(net), state, 1e-3);
    CHECK(p == start);
    CHECK(state.step == 1);

    Parameters g = zero_parameters(net);
    g.weights[0] = {0.3, 2.0};
    auto fresh = adam_init(net);
    Parameters q = start;
    adam_step(q, g, fresh, 1e-3);
    CHECK(q.weights[0][0] == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));
    CHECK(q.weights[0][1] == doctest::Approx(-0.5 - 1e-3).epsilon(1e-6));
}

TEST_CASE("initialization: seeded, He variance, zero biases") {
    Network net({100}, 0, {LayerSpec::dense(100, 100), LayerSpec::relu(), LayerSpec::dense(100, 10)});
    const auto a = init_params(net, 42);
    CHECK(a == init_params(net, 42));
    CHECK_FALSE(a == init_params(net, 43));
    double sum = 0.0;
    double sq = 0.0;
    for (double w : a.weights[0]) {
        sum += w;
        sq += w * w;
    }
    const double n = static_cast<double>(a.weights[0].size());
    const double var = sq / n - (sum / n) * (sum / n);
    CHECK(var >= 0.016);
    CHECK(var <= 0.024);
    for (const auto& b : a.biases) {
        for (double v : b) {
            CHECK(v == 0.0);
        }
    }
    double out_sq = 0.0;
    for (double w : a.weights[2]) {
        out_sq += w * w;
    }
    CHECK(out_sq / static_cast<double>(a.weights[2].size()) == doctest::Approx(2.0 / 110.0).epsilon(0.3));
}

TEST_CASE("a four-sample batch can be overfit") {
    Network net({6}, 0, {LayerSpec::dense(6, 32), LayerSpec::relu(), LayerSpec::dense(32, 5)});
    auto p = init_params(net, 1);
    Batch b{random_tensor({4, 6}, 2), {}};
    const auto target = random_tensor({4, 5}, 3, 0.5);
    auto state = adam_init(net);
    double loss = 0.0;
    for (int step = 0; step < 2000; ++step) {
        Cache cache;
        const auto l = mse(forward(net, p, b, &cache), target);
        loss = l.value;
        adam_step(p, backward(net, p, cache, l.gradient).params, state, 1e-2);
    }
    CHECK(loss < 1e-6);
}

TEST_CASE("non-finite activations raise NumericalDivergence") {
    Network net({2}, 0, {LayerSpec::dense(2, 1)});
    auto p = zero_parameters(net);
    p.weights[0] = {std::numeric_limits<double>::infinity(), 0.0};
    Batch b{Tensor({1, 2}, 1.0), {}};
    try {
        forward(net, p, b);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NumericalDivergence);
    }
}

TEST_CASE("layer extents round trip") {
    for (const auto& l : {LayerSpec::dense(3, 4), LayerSpec::relu(), LayerSpec::conv2d(1, 2, 9, 8),
                          LayerSpec::maxpool2d(2, 7, 6), LayerSpec::flatten(), LayerSpec::concat_scalars(2)}) {
        const auto e = l.extents();
        CHECK(e.size() == LayerSpec::extent_count(l.kind));
        CHECK(LayerSpec::from_extents(l.kind, e) == l);
    }
}

} // TEST_SUITE
