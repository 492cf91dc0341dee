#include "satsched/nets.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace satsched {

double apply_activation(Activation a, double z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::softplus:
      // log(1+e^z) computed without overflow for large |z|.
      return z > 30.0 ? z : std::log1p(std::exp(z));
  }
  return z;
}

double activation_grad(Activation a, double z) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::softplus: return 1.0 / (1.0 + std::exp(-z));
  }
  return 1.0;
}

DenseLayer::DenseLayer(int in_dim, int out_dim, Activation a)
    : in(in_dim), out(out_dim), act(a),
      w(static_cast<std::size_t>(in_dim) * static_cast<std::size_t>(out_dim), 0.0),
      b(static_cast<std::size_t>(out_dim), 0.0) {}

void DenseLayer::init(Rng& rng) {
  const double scale = act == Activation::relu ? std::sqrt(2.0 / in) : std::sqrt(1.0 / in);
  for (auto& v : w) v = rng.normal(0.0, scale);
  for (auto& v : b) v = 0.0;
}

void DenseLayer::forward(std::span<const double> x, std::vector<double>& z,
                         std::vector<double>& y) const {
  z.resize(static_cast<std::size_t>(out));
  y.resize(static_cast<std::size_t>(out));
  for (int o = 0; o < out; ++o) {
    const double* row = w.data() + static_cast<std::size_t>(o) * in;
    double acc = b[static_cast<std::size_t>(o)];
    for (int i = 0; i < in; ++i) acc += row[i] * x[static_cast<std::size_t>(i)];
    z[static_cast<std::size_t>(o)] = acc;
    y[static_cast<std::size_t>(o)] = apply_activation(act, acc);
  }
}

Mlp::Mlp(const std::vector<int>& sizes, Activation hidden, Activation output) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp needs at least two sizes");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const bool last = i + 2 == sizes.size();
    layers.emplace_back(sizes[i], sizes[i + 1], last ? output : hidden);
  }
}

void Mlp::init(Rng& rng) {
  for (auto& l : layers) l.init(rng);
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.param_count();
  return n;
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  std::vector<double> z, cur(x.begin(), x.end()), next;
  for (const auto& l : layers) {
    l.forward(cur, z, next);
    cur.swap(next);
  }
  return cur;
}

void Mlp::forward_cached(std::span<const double> x, Cache& cache) const {
  cache.inputs.resize(layers.size());
  cache.pre.resize(layers.size());
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    cache.inputs[i] = cur;
    std::vector<double> y;
    layers[i].forward(cur, cache.pre[i], y);
    cur.swap(y);
  }
  cache.output = cur;
}

std::vector<double> Mlp::backward(const Cache& cache, std::span<const double> dloss_dout,
                                  std::vector<LayerGrads>& grads) const {
  std::vector<double> dy(dloss_dout.begin(), dloss_dout.end());
  for (std::size_t li = layers.size(); li-- > 0;) {
    const auto& layer = layers[li];
    const auto& z = cache.pre[li];
    const auto& x = cache.inputs[li];
    auto& g = grads[li];

    // dL/dz = dL/dy * act'(z)
    std::vector<double> dz(static_cast<std::size_t>(layer.out));
    for (int o = 0; o < layer.out; ++o) {
      dz[static_cast<std::size_t>(o)] =
          dy[static_cast<std::size_t>(o)] * activation_grad(layer.act, z[static_cast<std::size_t>(o)]);
    }

    std::vector<double> dx(static_cast<std::size_t>(layer.in), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = dz[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      double* gw = g.dw.data() + static_cast<std::size_t>(o) * layer.in;
      const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) {
        gw[i] += d * x[static_cast<std::size_t>(i)];
        dx[static_cast<std::size_t>(i)] += d * row[i];
      }
      g.db[static_cast<std::size_t>(o)] += d;
    }
    dy.swap(dx);
  }
  return dy;
}

std::vector<LayerGrads> Mlp::make_grads() const {
  std::vector<LayerGrads> g(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    g[i].dw.assign(layers[i].w.size(), 0.0);
    g[i].db.assign(layers[i].b.size(), 0.0);
  }
  return g;
}

void Mlp::zero_grads(std::vector<LayerGrads>& grads) {
  for (auto& g : grads) {
    std::fill(g.dw.begin(), g.dw.end(), 0.0);
    std::fill(g.db.begin(), g.db.end(), 0.0);
  }
}

void Mlp::scale_grads(std::vector<LayerGrads>& grads, double s) const {
  for (auto& g : grads) {
    for (auto& v : g.dw) v *= s;
    for (auto& v : g.db) v *= s;
  }
}

namespace {
const char* activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::softplus: return "softplus";
  }
  return "identity";
}

Activation activation_from(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "softplus") return Activation::softplus;
  throw std::invalid_argument("unknown activation: " + s);
}
}  // namespace

std::string Mlp::to_json() const {
  nlohmann::json j;
  j["layers"] = nlohmann::json::array();
  for (const auto& l : layers) {
    nlohmann::json lj;
    lj["in"] = l.in;
    lj["out"] = l.out;
    lj["activation"] = activation_name(l.act);
    lj["w"] = l.w;
    lj["b"] = l.b;
    j["layers"].push_back(std::move(lj));
  }
  return j.dump();
}

Mlp Mlp::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Mlp net;
  for (const auto& lj : j.at("layers")) {
    DenseLayer l(lj.at("in").get<int>(), lj.at("out").get<int>(),
                 activation_from(lj.at("activation").get<std::string>()));
    l.w = lj.at("w").get<std::vector<double>>();
    l.b = lj.at("b").get<std::vector<double>>();
    if (l.w.size() != static_cast<std::size_t>(l.in) * static_cast<std::size_t>(l.out) ||
        l.b.size() != static_cast<std::size_t>(l.out)) {
      throw std::invalid_argument("layer parameter shape mismatch");
    }
    net.layers.push_back(std::move(l));
  }
  return net;
}

SgdMomentum::SgdMomentum(const Mlp& net, double lr, double momentum)
    : lr_(lr), momentum_(momentum), velocity_(net.make_grads()) {}

void SgdMomentum::step(Mlp& net, const std::vector<LayerGrads>& grads) {
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    auto& layer = net.layers[li];
    auto& vel = velocity_[li];
    const auto& g = grads[li];
    for (std::size_t k = 0; k < layer.w.size(); ++k) {
      vel.dw[k] = momentum_ * vel.dw[k] - lr_ * g.dw[k];
      layer.w[k] += vel.dw[k];
    }
    for (std::size_t k = 0; k < layer.b.size(); ++k) {
      vel.db[k] = momentum_ * vel.db[k] - lr_ * g.db[k];
      layer.b[k] += vel.db[k];
    }
  }
}

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::register_net(Mlp& net) {
  nets_.push_back(&net);
  m_.push_back(net.make_grads());
  v_.push_back(net.make_grads());
}

void Adam::step(const std::vector<std::vector<LayerGrads>*>& grads) {
  if (grads.size() != nets_.size()) throw std::invalid_argument("Adam: grads/nets mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t ni = 0; ni < nets_.size(); ++ni) {
    Mlp& net = *nets_[ni];
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
      auto& layer = net.layers[li];
      const auto& g = (*grads[ni])[li];
      auto& m = m_[ni][li];
      auto& v = v_[ni][li];
      auto update = [&](std::vector<double>& p, const std::vector<double>& gr,
                        std::vector<double>& mm, std::vector<double>& vv) {
        for (std::size_t k = 0; k < p.size(); ++k) {
          mm[k] = beta1_ * mm[k] + (1.0 - beta1_) * gr[k];
          vv[k] = beta2_ * vv[k] + (1.0 - beta2_) * gr[k] * gr[k];
          const double mhat = mm[k] / bc1;
          const double vhat = vv[k] / bc2;
          p[k] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
      };
      update(layer.w, g.dw, m.dw, v.dw);
      update(layer.b, g.db, m.db, v.db);
    }
  }
}

}  // namespace satsched
