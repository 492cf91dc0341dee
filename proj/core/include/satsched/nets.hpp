#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "satsched/rng.hpp"

namespace satsched {

enum class Activation { identity, relu, softplus };

double apply_activation(Activation a, double z);
double activation_grad(Activation a, double z);

// One dense layer, weights row-major [out x in].
struct DenseLayer {
  int in = 0, out = 0;
  Activation act = Activation::identity;
  std::vector<double> w, b;

  DenseLayer() = default;
  DenseLayer(int in_dim, int out_dim, Activation a);

  void init(Rng& rng);  // He-normal for relu, Xavier otherwise
  // y = act(W x + b); z receives the pre-activation.
  void forward(std::span<const double> x, std::vector<double>& z, std::vector<double>& y) const;

  std::size_t param_count() const { return w.size() + b.size(); }
};

struct LayerGrads {
  std::vector<double> dw, db;
};

// Plain fully-connected stack. Forward caches live outside the net so a
// single net can serve concurrent read-only evaluations.
struct Mlp {
  std::vector<DenseLayer> layers;

  Mlp() = default;
  Mlp(const std::vector<int>& sizes, Activation hidden, Activation output);

  void init(Rng& rng);
  int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().out; }
  std::size_t param_count() const;

  std::vector<double> forward(std::span<const double> x) const;

  struct Cache {
    std::vector<std::vector<double>> inputs;  // per layer
    std::vector<std::vector<double>> pre;     // pre-activations per layer
    std::vector<double> output;
  };
  void forward_cached(std::span<const double> x, Cache& cache) const;

  // Accumulates into grads; returns dL/dinput.
  std::vector<double> backward(const Cache& cache, std::span<const double> dloss_dout,
                               std::vector<LayerGrads>& grads) const;

  std::vector<LayerGrads> make_grads() const;
  static void zero_grads(std::vector<LayerGrads>& grads);
  void scale_grads(std::vector<LayerGrads>& grads, double s) const;

  std::string to_json() const;
  static Mlp from_json(const std::string& text);
};

// Stochastic gradient descent with classical momentum.
class SgdMomentum {
 public:
  SgdMomentum(const Mlp& net, double lr, double momentum = 0.9);
  void step(Mlp& net, const std::vector<LayerGrads>& grads);

 private:
  double lr_, momentum_;
  std::vector<LayerGrads> velocity_;
};

// Adam over one or more Mlps (the PPO net is trunk + two heads).
class Adam {
 public:
  Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void register_net(Mlp& net);
  // grads must be passed in registration order.
  void step(const std::vector<std::vector<LayerGrads>*>& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Mlp*> nets_;
  std::vector<std::vector<LayerGrads>> m_, v_;
};

}  // namespace satsched
