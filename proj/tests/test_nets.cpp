#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

#include "satsched/nets.hpp"

using namespace satsched;

namespace {

// Central finite differences over every parameter of a net.
double max_rel_grad_error(Mlp& net, const std::function<double()>& loss,
                          const std::vector<LayerGrads>& analytic, double h = 1e-6) {
  double worst = 0.0;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    auto check_param = [&](std::vector<double>& params, const std::vector<double>& grads) {
      for (std::size_t k = 0; k < params.size(); ++k) {
        const double save = params[k];
        params[k] = save + h;
        const double up = loss();
        params[k] = save - h;
        const double down = loss();
        params[k] = save;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(numeric), std::abs(grads[k]), 1e-6});
        worst = std::max(worst, std::abs(numeric - grads[k]) / denom);
      }
    };
    check_param(net.layers[li].w, analytic[li].dw);
    check_param(net.layers[li].b, analytic[li].db);
  }
  return worst;
}

}  // namespace

TEST_CASE("activations and grads") {
  CHECK(apply_activation(Activation::softplus, 0.0) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(apply_activation(Activation::relu, -1.0) == 0.0);
  CHECK(apply_activation(Activation::relu, 2.5) == 2.5);
  CHECK(apply_activation(Activation::softplus, 50.0) == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(activation_grad(Activation::softplus, 0.0) == doctest::Approx(0.5));
  CHECK(activation_grad(Activation::identity, 3.0) == 1.0);
}

TEST_CASE("forward of an all-zero-parameter softplus net is ln 2 everywhere") {
  Mlp net({5, 8, 5}, Activation::relu, Activation::softplus);  // params default to zero
  const auto out = net.forward(std::vector<double>{0.3, -0.2, 0.9, 0.0, 1.0});
  for (double v : out) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("backward matches finite differences (MSE head)") {
  Mlp net({3, 6, 4, 2}, Activation::relu, Activation::softplus);
  Rng rng(23);
  net.init(rng);

  const std::vector<double> x = {0.7, -0.4, 0.25};
  const std::vector<double> target = {0.9, 0.4};

  auto loss = [&]() {
    const auto out = net.forward(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      acc += 0.5 * (out[i] - target[i]) * (out[i] - target[i]);
    }
    return acc;
  };

  auto grads = net.make_grads();
  Mlp::Cache cache;
  net.forward_cached(x, cache);
  std::vector<double> dloss(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) dloss[i] = cache.output[i] - target[i];
  net.backward(cache, dloss, grads);

  CHECK(max_rel_grad_error(net, loss, grads) < 1e-4);
}

TEST_CASE("backward input gradient matches finite differences") {
  Mlp net({4, 5, 3}, Activation::relu, Activation::identity);
  Rng rng(29);
  net.init(rng);
  std::vector<double> x = {0.2, 0.8, -0.6, 0.1};

  auto loss = [&]() {
    const auto out = net.forward(x);
    double acc = 0.0;
    for (double v : out) acc += v * v;
    return acc;
  };

  auto grads = net.make_grads();
  Mlp::Cache cache;
  net.forward_cached(x, cache);
  std::vector<double> dloss(3);
  for (std::size_t i = 0; i < 3; ++i) dloss[i] = 2.0 * cache.output[i];
  const auto dx = net.backward(cache, dloss, grads);

  const double h = 1e-6;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double save = x[i];
    x[i] = save + h;
    const double up = loss();
    x[i] = save - h;
    const double down = loss();
    x[i] = save;
    const double numeric = (up - down) / (2.0 * h);
    CHECK(dx[i] == doctest::Approx(numeric).epsilon(1e-4));
  }
}

TEST_CASE("sgd momentum reduces a quadratic loss") {
  Mlp net({2, 4, 1}, Activation::relu, Activation::identity);
  Rng rng(31);
  net.init(rng);
  SgdMomentum opt(net, 0.05, 0.9);
  auto grads = net.make_grads();
  Mlp::Cache cache;
  const std::vector<double> x = {1.0, -1.0};
  auto loss_of = [&]() {
    const double y = net.forward(x)[0];
    return (y - 2.0) * (y - 2.0);
  };
  const double initial = loss_of();
  for (int i = 0; i < 200; ++i) {
    Mlp::zero_grads(grads);
    net.forward_cached(x, cache);
    const std::vector<double> dloss = {2.0 * (cache.output[0] - 2.0)};
    net.backward(cache, dloss, grads);
    opt.step(net, grads);
  }
  CHECK(loss_of() < initial * 1e-4);
}

TEST_CASE("adam reduces the same quadratic loss") {
  Mlp net({2, 4, 1}, Activation::relu, Activation::identity);
  Rng rng(37);
  net.init(rng);
  Adam opt(0.05);
  opt.register_net(net);
  auto grads = net.make_grads();
  Mlp::Cache cache;
  const std::vector<double> x = {0.5, 0.25};
  auto loss_of = [&]() {
    const double y = net.forward(x)[0];
    return (y - 1.5) * (y - 1.5);
  };
  const double initial = loss_of();
  for (int i = 0; i < 300; ++i) {
    Mlp::zero_grads(grads);
    net.forward_cached(x, cache);
    const std::vector<double> dloss = {2.0 * (cache.output[0] - 1.5)};
    net.backward(cache, dloss, grads);
    opt.step({&grads});
  }
  CHECK(loss_of() < initial * 1e-3);
}

TEST_CASE("mlp json round trip preserves outputs exactly") {
  Mlp net({5, 16, 5}, Activation::relu, Activation::softplus);
  Rng rng(41);
  net.init(rng);
  const auto restored = Mlp::from_json(net.to_json());
  const std::vector<double> x = {0.1, 0.9, 0.4, -0.3, 0.6};
  CHECK(net.forward(x) == restored.forward(x));
  CHECK_THROWS(Mlp::from_json("{\"layers\":[{\"in\":2,\"out\":3,\"activation\":\"relu\","
                              "\"w\":[1,2],\"b\":[0,0,0]}]}"));
}
