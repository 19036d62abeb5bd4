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

#include "etn/etn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "etn/error.hpp"
#include "etn/specfun.hpp"

namespace etn {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int packed_size(int c) { return c * (c + 1) / 2; }

std::vector<int> head_widths(Family family, int c) {
  switch (family) {
    case Family::kScalar: return {1, 1};
    case Family::kVector: return {c, c};
    case Family::kMatrix: return {c * c, packed_size(c), packed_size(c)};
  }
  return {};
}

double positive(double raw) { return specfun::softplus(raw) + EtnModel::kPositiveFloor; }

MatrixXd unpack_lower(const VectorXd& raw, int c) {
  MatrixXd l = MatrixXd::Zero(c, c);
  int k = 0;
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j <= i; ++j, ++k) l(i, j) = i == j ? positive(raw[k]) : raw[k];
  }
  return l;
}

VectorXd pack_lower_grad(const MatrixXd& g, const VectorXd& raw, int c) {
  VectorXd out(packed_size(c));
  int k = 0;
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j <= i; ++j, ++k) {
      out[k] = i == j ? g(i, j) * specfun::sigmoid(raw[k]) : g(i, j);
    }
  }
  return out;
}

VariationalParams decode(Family family, const std::vector<VectorXd>& out, int c) {
  switch (family) {
    case Family::kScalar: return GammaParams{positive(out[0][0]), positive(out[1][0])};
    case Family::kVector: {
      GammaVectorParams v{std::vector<double>(c), std::vector<double>(c)};
      for (int i = 0; i < c; ++i) {
        v.shapes[i] = positive(out[0][i]);
        v.rates[i] = positive(out[1][i]);
      }
      return v;
    }
    case Family::kMatrix: {
      KronGaussianParams m;
      m.mu.resize(c, c);
      for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) m.mu(i, j) = out[0][i * c + j];
      }
      m.l_b = unpack_lower(out[1], c);
      m.l_d = unpack_lower(out[2], c);
      return m;
    }
  }
  fail(ErrorCategory::kConfig, "unknown family");
}

// dL/d(head outputs) from dL/d(variational params).
std::vector<VectorXd> encode_grad(Family family, const VariationalGrad& g,
                                  const std::vector<VectorXd>& out, int c) {
  std::vector<VectorXd> res;
  switch (family) {
    case Family::kScalar: {
      const auto& s = std::get<GammaParams>(g);
      res.push_back(VectorXd::Constant(1, s.shape * specfun::sigmoid(out[0][0])));
      res.push_back(VectorXd::Constant(1, s.rate * specfun::sigmoid(out[1][0])));
      break;
    }
    case Family::kVector: {
      const auto& v = std::get<GammaVectorParams>(g);
      VectorXd gs(c), gr(c);
      for (int i = 0; i < c; ++i) {
        gs[i] = v.shapes[i] * specfun::sigmoid(out[0][i]);
        gr[i] = v.rates[i] * specfun::sigmoid(out[1][i]);
      }
      res.push_back(std::move(gs));
      res.push_back(std::move(gr));
      break;
    }
    case Family::kMatrix: {
      const auto& m = std::get<KronGaussianParams>(g);
      VectorXd gm(c * c);
      for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) gm[i * c + j] = m.mu(i, j);
      }
      res.push_back(std::move(gm));
      res.push_back(pack_lower_grad(m.l_b, out[1], c));
      res.push_back(pack_lower_grad(m.l_d, out[2], c));
      break;
    }
  }
  return res;
}

void accumulate(VariationalGrad& acc, const VariationalGrad& g, double w) {
  if (auto* s = std::get_if<GammaParams>(&acc)) {
    const auto& o = std::get<GammaParams>(g);
    s->shape += w * o.shape;
    s->rate += w * o.rate;
  } else if (auto* v = std::get_if<GammaVectorParams>(&acc)) {
    const auto& o = std::get<GammaVectorParams>(g);
    for (std::size_t i = 0; i < v->shapes.size(); ++i) {
      v->shapes[i] += w * o.shapes[i];
      v->rates[i] += w * o.rates[i];
    }
  } else {
    auto& m = std::get<KronGaussianParams>(acc);
    const auto& o = std::get<KronGaussianParams>(g);
    m.mu += w * o.mu;
    m.l_b += w * o.l_b;
    m.l_d += w * o.l_d;
  }
}

struct Forward {
  std::vector<Mlp::Cache> caches;
  std::vector<VectorXd> out;
  VariationalParams q;
};

Forward forward(const EtnModel& model, std::span<const double> features) {
  const std::vector<double> x = model.standardize(features);
  const VectorXd xv = Eigen::Map<const VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  Forward f;
  const auto& heads = model.heads();
  f.caches.resize(heads.size());
  for (std::size_t k = 0; k < heads.size(); ++k) {
    const std::span<const double> p(model.params.data() + model.head_offset(k),
                                    heads[k].num_params());
    f.out.push_back(heads[k].forward(p, xv, &f.caches[k]));
  }
  f.q = decode(model.family(), f.out, model.num_classes());
  return f;
}

TransformParam grad_wrt_transform(const TransformParam& a, std::span<const double> z,
                                  const std::vector<double>& g_zp) {
  const std::size_t c = z.size();
  if (std::holds_alternative<ScalarTransform>(a)) {
    double s = 0.0;
    for (std::size_t i = 0; i < c; ++i) s += g_zp[i] * z[i];
    return ScalarTransform{s};
  }
  if (std::holds_alternative<VectorTransform>(a)) {
    VectorTransform v{std::vector<double>(c)};
    for (std::size_t i = 0; i < c; ++i) v.a[i] = g_zp[i] * z[i];
    return v;
  }
  const auto n = static_cast<Eigen::Index>(c);
  const Eigen::Map<const VectorXd> gz(g_zp.data(), n);
  const Eigen::Map<const VectorXd> zv(z.data(), n);
  return MatrixTransform{gz * zv.transpose()};
}

bool finite(const LossBreakdown& l) {
  return std::isfinite(l.total) && std::isfinite(l.recon) && std::isfinite(l.kl) &&
         std::isfinite(l.odir);
}

}  // namespace

void MlpSpec::validate() const {
  if (input_dim < 1) fail(ErrorCategory::kConfig, "input_dim must be >= 1");
  if (hidden_dim < 1) fail(ErrorCategory::kConfig, "hidden_dim must be >= 1");
  if (num_layers < 1) fail(ErrorCategory::kConfig, "num_layers must be >= 1");
}

EtnModel::EtnModel(Family family, MlpSpec spec, int num_classes, PriorSpec prior, double nu,
                   double lambda, double odir_weight)
    : family_(family),
      spec_(spec),
      num_classes_(num_classes),
      prior_(prior),
      nu_(nu),
      lambda_(lambda),
      odir_weight_(odir_weight) {
  spec_.validate();
  prior_.family = family;
  prior_.validate();
  if (num_classes < 2) fail(ErrorCategory::kConfig, "num_classes must be >= 2");
  if (!(nu > 2.0)) fail(ErrorCategory::kConfig, "nu must exceed max(b) + 1 = 2");
  if (!(lambda >= 0.0)) fail(ErrorCategory::kConfig, "lambda must be >= 0");
  if (!(odir_weight >= 0.0)) fail(ErrorCategory::kConfig, "odir_weight must be >= 0");
  std::size_t total = 0;
  for (int w : head_widths(family, num_classes)) {
    std::vector<int> sizes{spec.input_dim};
    for (int l = 1; l < spec.num_layers; ++l) sizes.push_back(spec.hidden_dim);
    sizes.push_back(w);
    heads_.emplace_back(std::move(sizes));
    head_offsets_.push_back(total);
    total += heads_.back().num_params();
  }
  params.assign(total, 0.0);
  b_raw.assign(static_cast<std::size_t>(num_classes), specfun::softplus_inv(1.0));
  feature_mean.assign(static_cast<std::size_t>(spec.input_dim), 0.0);
  feature_std.assign(static_cast<std::size_t>(spec.input_dim), 1.0);
}

void EtnModel::init(std::uint64_t seed) {
  RandomStream rng = RandomStream::derive(seed, "etn.init");
  for (std::size_t k = 0; k < heads_.size(); ++k) {
    heads_[k].init(std::span<double>(params.data() + head_offsets_[k], heads_[k].num_params()),
                   rng);
  }
  std::fill(b_raw.begin(), b_raw.end(), specfun::softplus_inv(1.0));
}

void EtnModel::fit_feature_stats(std::span<const LogitRecord> records) {
  if (records.empty()) fail(ErrorCategory::kInvalidArgument, "cannot fit statistics on no records");
  const std::size_t d = static_cast<std::size_t>(spec_.input_dim);
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (const auto& r : records) {
    if (r.features.size() != d) fail(ErrorCategory::kDimension, "feature length mismatch");
    for (std::size_t j = 0; j < d; ++j) mean[j] += r.features[j];
  }
  for (auto& m : mean) m /= static_cast<double>(records.size());
  for (const auto& r : records) {
    for (std::size_t j = 0; j < d; ++j) var[j] += (r.features[j] - mean[j]) * (r.features[j] - mean[j]);
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(records.size()));
    var[j] = sd < 1e-12 ? 1.0 : sd;
  }
  feature_mean = std::move(mean);
  feature_std = std::move(var);
}

std::vector<double> EtnModel::standardize(std::span<const double> features) const {
  if (features.size() != feature_mean.size()) {
    fail(ErrorCategory::kDimension, "feature length " + std::to_string(features.size()) +
                                        " does not match model input " +
                                        std::to_string(feature_mean.size()));
  }
  std::vector<double> x(features.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = (features[j] - feature_mean[j]) / feature_std[j];
  return x;
}

std::vector<double> EtnModel::prior_belief() const {
  std::vector<double> b(b_raw.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = specfun::softplus(b_raw[i]);
  return b;
}

EvidenceConfig EtnModel::evidence_config() const {
  EvidenceConfig cfg;
  cfg.num_classes = num_classes_;
  cfg.prior_belief = prior_belief();
  cfg.nu = nu_;
  cfg.lambda = lambda_;
  return cfg;
}

VariationalParams EtnModel::predict_variational(std::span<const double> features) const {
  return forward(*this, features).q;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorCategory::kConfig, "learning rate must be > 0");
  }
  if (epochs < 1) fail(ErrorCategory::kConfig, "epochs must be >= 1");
  if (batch_size < 1) fail(ErrorCategory::kConfig, "batch size must be >= 1");
  if (mc_samples < 1) fail(ErrorCategory::kConfig, "mc_samples must be >= 1");
  if (!(lambda >= 0.0)) fail(ErrorCategory::kConfig, "lambda must be >= 0");
  if (!(nu > 2.0)) fail(ErrorCategory::kConfig, "nu must be > 2");
  if (!(odir_weight >= 0.0)) fail(ErrorCategory::kConfig, "odir_weight must be >= 0");
  prior.validate();
}

LossResult loss_batch(const EtnModel& model, std::span<const LogitRecord> batch, int mc_samples,
                      RandomStream& rng, bool with_grad) {
  if (batch.empty()) fail(ErrorCategory::kInvalidArgument, "loss_batch: empty batch");
  if (mc_samples < 1) fail(ErrorCategory::kInvalidArgument, "loss_batch: mc_samples must be >= 1");
  const int c = model.num_classes();
  const auto cs = static_cast<std::size_t>(c);
  const std::vector<double> b = model.prior_belief();
  const double inv_m = 1.0 / mc_samples;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  LossResult res;
  if (with_grad) {
    res.grad_params.assign(model.params.size(), 0.0);
    res.grad_b_raw.assign(cs, 0.0);
  }
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const LogitRecord& r = batch[n];
    if (r.label < 0) {
      fail(ErrorCategory::kInvalidArgument, "loss_batch: record " + std::to_string(n) + " has no label");
    }
    if (r.logits.size() != cs) fail(ErrorCategory::kDimension, "loss_batch: logit length mismatch");
    const Forward f = forward(model, r.features);
    const DirichletParams target = edl::target_alpha(r.label, c, model.nu());
    const std::vector<double> e = edl::expected_log_pi(target);

    VariationalGrad gq = variational::zero_grad(f.q);
    double recon = 0.0;
    for (int m = 0; m < mc_samples; ++m) {
      auto [a, tape] = variational::sample_transform(f.q, rng, c);
      const Logits zp = edl::apply_transform(r.logits, a);
      const DirichletParams ap = edl::logits_to_alpha(zp, b);
      double rm = -dirichlet::log_beta(ap);
      for (std::size_t i = 0; i < cs; ++i) rm += (ap[i] - 1.0) * e[i];
      recon -= rm * inv_m;
      if (!with_grad) continue;
      const double psi0 = specfun::digamma(ap.alpha0());
      std::vector<double> g_zp(cs);
      for (std::size_t i = 0; i < cs; ++i) {
        // d(-R/M)/d alpha'_i
        const double ga = -(psi0 - specfun::digamma(ap[i]) + e[i]) * inv_m;
        res.grad_b_raw[i] += ga * specfun::sigmoid(model.b_raw[i]) * inv_n;
        g_zp[i] = ga * specfun::sigmoid(zp[i]);
      }
      const TransformParam ga = grad_wrt_transform(a, r.logits, g_zp);
      accumulate(gq, variational::backprop_transform(f.q, tape, ga), 1.0);
    }
    const double kl = variational::kl_to_prior(f.q, model.prior(), c);
    double odir = 0.0;
    if (const auto* kq = std::get_if<KronGaussianParams>(&f.q)) {
      odir = variational::odir_penalty(kq->mu, model.odir_weight());
    }
    res.loss.recon += recon * inv_n;
    res.loss.kl += kl * inv_n;
    res.loss.odir += odir * inv_n;
    if (!with_grad) continue;

    accumulate(gq, variational::kl_to_prior_grad(f.q, model.prior(), c), model.lambda());
    if (const auto* kq = std::get_if<KronGaussianParams>(&f.q)) {
      std::get<KronGaussianParams>(gq).mu += variational::odir_penalty_grad(kq->mu, model.odir_weight());
    }
    const std::vector<VectorXd> g_out = encode_grad(model.family(), gq, f.out, c);
    const auto& heads = model.heads();
    for (std::size_t k = 0; k < heads.size(); ++k) {
      const std::size_t off = model.head_offset(k);
      const std::size_t np = heads[k].num_params();
      std::vector<double> gh(np, 0.0);
      heads[k].backward(std::span<const double>(model.params.data() + off, np), f.caches[k],
                        g_out[k] * inv_n, gh);
      for (std::size_t j = 0; j < np; ++j) res.grad_params[off + j] += gh[j];
    }
  }
  res.loss.total = res.loss.recon + model.lambda() * res.loss.kl + res.loss.odir;
  if (with_grad && model.family() == Family::kScalar) {
    const double tied = std::accumulate(res.grad_b_raw.begin(), res.grad_b_raw.end(), 0.0);
    std::fill(res.grad_b_raw.begin(), res.grad_b_raw.end(), tied);
  }
  return res;
}

EtnModel make_model(Family family, const MlpSpec& spec, int num_classes, const TrainConfig& cfg) {
  cfg.validate();
  PriorSpec prior = cfg.prior;
  prior.family = family;
  EtnModel model(family, spec, num_classes, prior, cfg.nu, cfg.lambda, cfg.odir_weight);
  model.init(cfg.seed);
  return model;
}

TrainResult train(EtnModel& model, std::span<const LogitRecord> adapt, const TrainConfig& cfg) {
  cfg.validate();
  if (adapt.empty()) fail(ErrorCategory::kInvalidArgument, "train: empty adaptation set");
  model.fit_feature_stats(adapt);

  RandomStream shuffle = RandomStream::derive(cfg.seed, "etn.shuffle");
  RandomStream mc = RandomStream::derive(cfg.seed, "etn.mc");
  Adam opt_w(model.params.size(), AdamConfig{cfg.learning_rate});
  Adam opt_b(model.b_raw.size(), AdamConfig{cfg.learning_rate});

  auto evaluate = [&]() {
    RandomStream sel = RandomStream::derive(cfg.seed, "etn.select");
    return loss_batch(model, adapt, cfg.mc_samples, sel, false).loss;
  };

  TrainResult result;
  result.history.push_back({0, evaluate()});
  EtnModel best = model;
  result.best_loss = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(adapt.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<LogitRecord> batch;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.below(i)]);
    }
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(adapt[order[k]]);
      const LossResult lr = loss_batch(model, batch, cfg.mc_samples, mc, true);
      bool ok = finite(lr.loss);
      for (double g : lr.grad_params) ok = ok && std::isfinite(g);
      for (double g : lr.grad_b_raw) ok = ok && std::isfinite(g);
      if (!ok) {
        std::ostringstream msg;
        msg << "non-finite loss or gradient at epoch " << epoch << " batch " << batch_index
            << " (samples " << start << ".." << end - 1 << "): total=" << lr.loss.total
            << " recon=" << lr.loss.recon << " kl=" << lr.loss.kl;
        fail(ErrorCategory::kNumerical, msg.str());
      }
      opt_w.step(model.params, lr.grad_params);
      opt_b.step(model.b_raw, lr.grad_b_raw);
    }
    const LossBreakdown l = evaluate();
    if (!finite(l)) {
      fail(ErrorCategory::kNumerical, "non-finite evaluation loss after epoch " + std::to_string(epoch));
    }
    result.history.push_back({epoch, l});
    if (l.total < result.best_loss) {
      result.best_loss = l.total;
      result.best_epoch = epoch;
      best = model;
    }
  }
  model = std::move(best);
  return result;
}

Inference infer(const EtnModel& model, const LogitRecord& record, int mc_samples,
                RandomStream& rng) {
  if (mc_samples < 1) fail(ErrorCategory::kInvalidArgument, "infer: mc_samples must be >= 1");
  const int c = model.num_classes();
  const auto cs = static_cast<std::size_t>(c);
  if (record.logits.size() != cs) fail(ErrorCategory::kDimension, "infer: logit length mismatch");
  const VariationalParams q = model.predict_variational(record.features);
  const std::vector<double> b = model.prior_belief();
  std::vector<double> p(cs, 0.0), abar(cs, 0.0);
  double um = 0.0;
  const double inv_m = 1.0 / mc_samples;
  for (int m = 0; m < mc_samples; ++m) {
    const auto sample = variational::sample_transform(q, rng, c);
    const DirichletParams ap = edl::logits_to_alpha(edl::apply_transform(record.logits, sample.first), b);
    for (std::size_t i = 0; i < cs; ++i) {
      p[i] += ap[i] / ap.alpha0() * inv_m;
      abar[i] += ap[i] * inv_m;
    }
    um += ap.alpha0() * inv_m;
  }
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  const DirichletParams mean_alpha(std::move(abar));
  Inference out{SimplexPoint(std::move(p)), {}};
  out.scores.mp = *std::max_element(out.p.pi().begin(), out.p.pi().end());
  out.scores.um = um;
  out.scores.mi = dirichlet::mutual_information(mean_alpha);
  out.scores.de = dirichlet::differential_entropy(mean_alpha);
  return out;
}

std::vector<Inference> infer_all(const EtnModel& model, std::span<const LogitRecord> records,
                                 int mc_samples, std::uint64_t seed) {
  std::vector<Inference> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    RandomStream rng = RandomStream::derive(seed, "etn.infer", i);
    out.push_back(infer(model, records[i], mc_samples, rng));
  }
  return out;
}

}  // namespace etn
