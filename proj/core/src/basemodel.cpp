// Copyright 2026 The ETN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "etn/basemodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "binary.hpp"
#include "etn/edl.hpp"
#include "etn/error.hpp"
#include "etn/specfun.hpp"

namespace etn {
namespace {

using Eigen::VectorXd;

DataSplit draw_split(const SynthSpec& spec, const std::vector<std::vector<double>>& means,
                     double shift, std::size_t n, std::string_view tag) {
  RandomStream rng = RandomStream::derive(spec.seed, tag);
  const auto c = static_cast<std::size_t>(spec.num_classes);
  const auto d = static_cast<std::size_t>(spec.feature_dim);
  std::vector<std::int64_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::int64_t>(i % c);
  for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);
  DataSplit s;
  s.n = n;
  s.dim = d;
  s.labels = std::move(labels);
  s.inputs.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& mu = means[static_cast<std::size_t>(s.labels[i])];
    for (std::size_t j = 0; j < d; ++j) {
      const double x = mu[j] + (j == 0 ? shift : 0.0) + spec.sigma * rng.normal();
      s.inputs[i * d + j] = static_cast<float>(x);
    }
  }
  return s;
}

VectorXd to_vec(std::span<const float> x) {
  VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<Eigen::Index>(i)] = x[i];
  return v;
}

// Loss and dL/dz for one sample.
double sample_loss(const TinyClassifier& model, const VectorXd& z, int y, double reg_weight,
                   double nu, VectorXd& grad) {
  const auto c = static_cast<std::size_t>(z.size());
  const std::span<const double> zs(z.data(), c);
  grad.resize(z.size());
  if (model.loss() == PretrainLoss::kCrossEntropy) {
    const double top = z.maxCoeff();
    VectorXd e = (z.array() - top).exp();
    e /= e.sum();
    grad = e;
    grad[y] -= 1.0;
    return edl::cross_entropy(zs, y);
  }
  const std::vector<double> ones(c, 1.0);
  const DirichletParams alpha = edl::logits_to_alpha(zs, ones);
  const DirichletParams target = edl::target_alpha(y, static_cast<int>(c), nu);
  double loss = edl::reverse_kl_dirichlet(alpha, target);
  std::vector<double> ga = edl::reverse_kl_dirichlet_grad(alpha, target);
  if (reg_weight > 0.0) {
    std::vector<double> t(alpha.alpha().begin(), alpha.alpha().end());
    t[static_cast<std::size_t>(y)] = 1.0;
    const DirichletParams tilde(std::move(t));
    const DirichletParams uniform(ones);
    loss += reg_weight * edl::reverse_kl_dirichlet(tilde, uniform);
    const std::vector<double> gt = edl::reverse_kl_dirichlet_grad(tilde, uniform);
    for (std::size_t i = 0; i < c; ++i) {
      if (static_cast<int>(i) != y) ga[i] += reg_weight * gt[i];
    }
  }
  for (std::size_t i = 0; i < c; ++i) grad[static_cast<Eigen::Index>(i)] = ga[i] * specfun::sigmoid(z[i]);
  return loss;
}

}  // namespace

void SynthSpec::validate() const {
  if (num_classes < 2) fail(ErrorCategory::kConfig, "num_classes must be >= 2");
  if (feature_dim < 2) fail(ErrorCategory::kConfig, "feature_dim must be >= 2");
  if (!(sigma > 0.0)) fail(ErrorCategory::kConfig, "sigma must be > 0");
  if (!(radius >= 0.0)) fail(ErrorCategory::kConfig, "radius must be >= 0");
  if (!std::isfinite(ood_shift)) fail(ErrorCategory::kConfig, "ood_shift must be finite");
  const auto c = static_cast<std::size_t>(num_classes);
  if (n_pretrain < c || n_adapt < c || n_test < c || n_ood < c) {
    fail(ErrorCategory::kConfig, "every split needs at least num_classes samples");
  }
}

std::vector<std::vector<double>> class_means(const SynthSpec& spec) {
  const auto c = static_cast<std::size_t>(spec.num_classes);
  const auto d = static_cast<std::size_t>(spec.feature_dim);
  std::vector<std::vector<double>> means(c, std::vector<double>(d, 0.0));
  for (std::size_t k = 0; k < c; ++k) {
    if (d >= c) {
      means[k][k] = spec.radius;
    } else {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(c);
      means[k][0] = spec.radius * std::cos(angle);
      means[k][1] = spec.radius * std::sin(angle);
    }
  }
  return means;
}

SynthData gen_synth(const SynthSpec& spec) {
  spec.validate();
  const auto means = class_means(spec);
  return SynthData{draw_split(spec, means, 0.0, spec.n_pretrain, "synth.pretrain"),
                   draw_split(spec, means, 0.0, spec.n_adapt, "synth.adapt"),
                   draw_split(spec, means, 0.0, spec.n_test, "synth.test"),
                   draw_split(spec, means, spec.ood_shift, spec.n_ood, "synth.ood")};
}

PretrainLoss parse_pretrain_loss(std::string_view name) {
  if (name == "ce") return PretrainLoss::kCrossEntropy;
  if (name == "edl") return PretrainLoss::kEdl;
  fail(ErrorCategory::kUsage, "unknown loss '" + std::string(name) + "' (expected ce or edl)");
}

void PretrainConfig::validate() const {
  if (hidden_dim < 1) fail(ErrorCategory::kConfig, "hidden_dim must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorCategory::kConfig, "learning rate must be > 0");
  if (epochs < 1) fail(ErrorCategory::kConfig, "epochs must be >= 1");
  if (batch_size < 1) fail(ErrorCategory::kConfig, "batch size must be >= 1");
  if (!(edl_lambda >= 0.0)) fail(ErrorCategory::kConfig, "edl lambda must be >= 0");
  if (edl_anneal_epochs < 1) fail(ErrorCategory::kConfig, "anneal epochs must be >= 1");
  if (!(nu > 2.0)) fail(ErrorCategory::kConfig, "nu must be > 2");
}

TinyClassifier::TinyClassifier(int input_dim, int hidden_dim, int num_classes, PretrainLoss loss)
    : net_({input_dim, hidden_dim, num_classes}), loss_(loss) {
  params.assign(net_.num_params(), 0.0);
}

std::vector<double> TinyClassifier::logits(std::span<const float> x) const {
  const VectorXd z = net_.forward(params, to_vec(x));
  return std::vector<double>(z.data(), z.data() + z.size());
}

void TinyClassifier::forward(std::span<const float> x, std::vector<double>& hidden,
                             std::vector<double>& logits) const {
  Mlp::Cache cache;
  const VectorXd z = net_.forward(params, to_vec(x), &cache);
  hidden.assign(cache.act[1].data(), cache.act[1].data() + cache.act[1].size());
  logits.assign(z.data(), z.data() + z.size());
}

TinyClassifier pretrain(const DataSplit& data, const PretrainConfig& cfg, PretrainHistory* history) {
  cfg.validate();
  if (data.n == 0) fail(ErrorCategory::kInvalidArgument, "pretrain: empty data");
  std::int64_t max_label = 0;
  for (auto y : data.labels) max_label = std::max(max_label, y);
  const int c = static_cast<int>(max_label) + 1;
  TinyClassifier model(static_cast<int>(data.dim), cfg.hidden_dim, std::max(c, 2), cfg.loss);
  RandomStream init = RandomStream::derive(cfg.seed, "base.init");
  model.net().init(model.params, init);
  RandomStream shuffle = RandomStream::derive(cfg.seed, "base.shuffle");
  Adam opt(model.params.size(), AdamConfig{cfg.learning_rate});

  std::vector<std::size_t> order(data.n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.params.size());
  Mlp::Cache cache;
  VectorXd gz;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double reg = cfg.loss == PretrainLoss::kEdl
                           ? cfg.edl_lambda * std::min(1.0, static_cast<double>(epoch) /
                                                                cfg.edl_anneal_epochs)
                           : 0.0;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double inv = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const VectorXd z = model.net().forward(model.params, to_vec(data.row(i)), &cache);
        batch_loss += sample_loss(model, z, static_cast<int>(data.labels[i]), reg, cfg.nu, gz);
        model.net().backward(model.params, cache, gz * inv, grad);
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "pretrain: non-finite loss at epoch " << epoch << " samples " << start << ".."
            << end - 1;
        fail(ErrorCategory::kNumerical, msg.str());
      }
      epoch_loss += batch_loss;
      opt.step(model.params, grad);
    }
    if (history) history->epoch_loss.push_back(epoch_loss / static_cast<double>(data.n));
  }
  return model;
}

double accuracy(const TinyClassifier& model, const DataSplit& data) {
  if (data.n == 0) fail(ErrorCategory::kInvalidArgument, "accuracy: empty data");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto z = model.logits(data.row(i));
    const auto arg = std::max_element(z.begin(), z.end()) - z.begin();
    if (arg == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.n);
}

LogitBundle export_bundle(const TinyClassifier& model, const DataSplit& data, bool with_labels) {
  if (data.dim != static_cast<std::size_t>(model.input_dim())) {
    fail(ErrorCategory::kDimension, "export: input dimension mismatch");
  }
  LogitBundle b;
  b.n = data.n;
  b.feature_dim = static_cast<std::size_t>(model.hidden_dim());
  b.num_classes = static_cast<std::size_t>(model.num_classes());
  b.features.reserve(b.n * b.feature_dim);
  b.logits.reserve(b.n * b.num_classes);
  std::vector<double> h, z;
  for (std::size_t i = 0; i < data.n; ++i) {
    model.forward(data.row(i), h, z);
    for (double v : h) b.features.push_back(static_cast<float>(v));
    for (double v : z) b.logits.push_back(static_cast<float>(v));
  }
  if (with_labels) b.labels = data.labels;
  return b;
}

namespace model_file {

std::vector<std::uint8_t> save(const TinyClassifier& model) {
  detail::Writer w;
  w.magic("ETNM");
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(model.loss()));
  const std::vector<double> dims{static_cast<double>(model.input_dim()),
                                 static_cast<double>(model.hidden_dim()),
                                 static_cast<double>(model.num_classes())};
  w.f64_array(dims);
  w.f64_array(model.params);
  return w.take();
}

TinyClassifier load(std::span<const std::uint8_t> bytes) {
  detail::Reader r(bytes, "ETNM");
  r.expect_magic("ETNM");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    fail(ErrorCategory::kVersion, "ETNM: unsupported version " + std::to_string(version));
  }
  const auto loss = r.get<std::uint8_t>();
  if (loss > 1) fail(ErrorCategory::kFormat, "ETNM: unknown loss tag");
  const auto dims = r.f64_array();
  auto params = r.f64_array();
  r.expect_end();
  if (dims.size() != 3) fail(ErrorCategory::kFormat, "ETNM: bad dims array");
  for (double d : dims) {
    if (!(d >= 1.0 && d <= 1e9) || std::floor(d) != d) fail(ErrorCategory::kFormat, "ETNM: bad dims");
  }
  TinyClassifier model(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                       static_cast<int>(dims[2]), static_cast<PretrainLoss>(loss));
  if (params.size() != model.params.size()) fail(ErrorCategory::kFormat, "ETNM: params length");
  model.params = std::move(params);
  return model;
}

void save_file(const std::filesystem::path& path, const TinyClassifier& model) {
  detail::write_file(path, save(model));
}

TinyClassifier load_file(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return load(bytes);
  } catch (const Error& e) {
    throw Error(e.category(), path.string() + ": " + e.what());
  }
}

}  // namespace model_file
}  // namespace etn
