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

#include "etn/variational.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "etn/error.hpp"
#include "etn/specfun.hpp"

namespace etn {

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kScalar: return "scalar";
    case Family::kVector: return "vector";
    case Family::kMatrix: return "matrix";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "scalar") return Family::kScalar;
  if (name == "vector") return Family::kVector;
  if (name == "matrix") return Family::kMatrix;
  fail(ErrorCategory::kConfig, "unknown family '" + std::string(name) + "'");
}

void PriorSpec::validate() const {
  if (!(mode > 0.0) || !std::isfinite(mode)) fail(ErrorCategory::kConfig, "prior mode must be > 0");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    fail(ErrorCategory::kConfig, "prior variance must be > 0");
  }
}

namespace variational {
namespace {

using Eigen::MatrixXd;

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorCategory::kInvalidArgument, std::string(what) + " must be positive and finite");
  }
}

void check_square(const MatrixXd& m, int c, const char* what) {
  if (m.rows() != c || m.cols() != c) {
    fail(ErrorCategory::kDimension, std::string(what) + " must be C x C");
  }
}

void check_factor(const MatrixXd& l, int c, const char* what) {
  check_square(l, c, what);
  for (int i = 0; i < c; ++i) check_positive(l(i, i), what);
}

double log_det_factor(const MatrixXd& l) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

MatrixXd lower(const MatrixXd& m) { return m.triangularView<Eigen::Lower>(); }

// dP(a, x)/da by central difference; the upper tail differences Q instead so
// the result keeps its relative accuracy when P is close to 1.
double d_cdf_d_shape(double a, double x, bool upper) {
  double h = 1e-4 * std::max(1.0, a);
  if (h >= a) h = 0.5 * a;
  if (upper) {
    return -(specfun::gamma_q(a + h, x) - specfun::gamma_q(a - h, x)) / (2.0 * h);
  }
  return (specfun::gamma_p(a + h, x) - specfun::gamma_p(a - h, x)) / (2.0 * h);
}

}  // namespace

Family family_of(const VariationalParams& q) {
  switch (q.index()) {
    case 0: return Family::kScalar;
    case 1: return Family::kVector;
    default: return Family::kMatrix;
  }
}

void validate(const VariationalParams& q, int num_classes) {
  if (const auto* g = std::get_if<GammaParams>(&q)) {
    check_positive(g->shape, "gamma shape");
    check_positive(g->rate, "gamma rate");
  } else if (const auto* v = std::get_if<GammaVectorParams>(&q)) {
    const auto c = static_cast<std::size_t>(num_classes);
    if (v->shapes.size() != c || v->rates.size() != c) {
      fail(ErrorCategory::kDimension, "gamma vector params must have length C");
    }
    for (double s : v->shapes) check_positive(s, "gamma shape");
    for (double r : v->rates) check_positive(r, "gamma rate");
  } else {
    const auto& m = std::get<KronGaussianParams>(q);
    check_square(m.mu, num_classes, "mu");
    check_factor(m.l_b, num_classes, "L_B");
    check_factor(m.l_d, num_classes, "L_D");
  }
}

VariationalGrad zero_grad(const VariationalParams& q) {
  if (std::holds_alternative<GammaParams>(q)) return GammaParams{0.0, 0.0};
  if (const auto* v = std::get_if<GammaVectorParams>(&q)) {
    return GammaVectorParams{std::vector<double>(v->shapes.size(), 0.0),
                             std::vector<double>(v->rates.size(), 0.0)};
  }
  const auto& m = std::get<KronGaussianParams>(q);
  const auto c = m.mu.rows();
  return KronGaussianParams{MatrixXd::Zero(c, c), MatrixXd::Zero(c, c), MatrixXd::Zero(c, c)};
}

GammaParams gamma_from_mode_variance(double mode, double variance) {
  if (!(mode > 0.0)) fail(ErrorCategory::kDomain, "gamma_from_mode_variance: mode must be > 0");
  if (!(variance > 0.0)) {
    fail(ErrorCategory::kDomain, "gamma_from_mode_variance: variance must be > 0");
  }
  const double rate = (mode + std::sqrt(mode * mode + 4.0 * variance)) / (2.0 * variance);
  return GammaParams{1.0 + mode * rate, rate};
}

double kl_gamma(const GammaParams& q, const GammaParams& p) {
  const double a1 = q.shape, b1 = q.rate, a2 = p.shape, b2 = p.rate;
  return (a1 - a2) * specfun::digamma(a1) - specfun::lgamma(a1) + specfun::lgamma(a2) +
         a2 * (std::log(b1) - std::log(b2)) + a1 * (b2 - b1) / b1;
}

GammaParams kl_gamma_grad(const GammaParams& q, const GammaParams& p) {
  const double a1 = q.shape, b1 = q.rate, a2 = p.shape, b2 = p.rate;
  return GammaParams{(a1 - a2) * specfun::trigamma(a1) + b2 / b1 - 1.0,
                     a2 / b1 - a1 * b2 / (b1 * b1)};
}

double kl_gauss_kron(const KronGaussianParams& q, const KronGaussianParams& p) {
  const auto c = q.mu.rows();
  if (p.mu.rows() != c || q.l_b.rows() != c || q.l_d.rows() != c || p.l_b.rows() != c ||
      p.l_d.rows() != c) {
    fail(ErrorCategory::kDimension, "kl_gauss_kron: size mismatch");
  }
  const auto lbp = p.l_b.triangularView<Eigen::Lower>();
  const auto ldp = p.l_d.triangularView<Eigen::Lower>();
  // tr(Bp^-1 Bq) = ||Lbp^-1 Lbq||_F^2
  const MatrixXd sb = lbp.solve(lower(q.l_b));
  const MatrixXd sd = ldp.solve(lower(q.l_d));
  const double tr = sb.squaredNorm() * sd.squaredNorm();
  // vec(D)^T (Bp kron Dp)^-1 vec(D) = ||Ldp^-1 Delta Lbp^-T||_F^2
  const MatrixXd delta = q.mu - p.mu;
  const MatrixXd left = ldp.solve(delta);
  const MatrixXd quad_m = lbp.solve(left.transpose());
  const double quad = quad_m.squaredNorm();
  const double cd = static_cast<double>(c);
  const double logdet_p = cd * (log_det_factor(p.l_b) + log_det_factor(p.l_d));
  const double logdet_q = cd * (log_det_factor(q.l_b) + log_det_factor(q.l_d));
  const double kl = 0.5 * (tr + quad - cd * cd + logdet_p - logdet_q);
  if (!std::isfinite(kl)) fail(ErrorCategory::kNumerical, "kl_gauss_kron: non-finite result");
  return kl;
}

KronGaussianParams kl_gauss_kron_grad(const KronGaussianParams& q, const KronGaussianParams& p) {
  const auto c = q.mu.rows();
  const double cd = static_cast<double>(c);
  const MatrixXd lb = lower(q.l_b), ld = lower(q.l_d);
  const MatrixXd bp_inv = (lower(p.l_b) * lower(p.l_b).transpose()).inverse();
  const MatrixXd dp_inv = (lower(p.l_d) * lower(p.l_d).transpose()).inverse();
  const double tb = (bp_inv * lb * lb.transpose()).trace();
  const double td = (dp_inv * ld * ld.transpose()).trace();

  KronGaussianParams g;
  g.mu = dp_inv * (q.mu - p.mu) * bp_inv;
  g.l_b = bp_inv * lb * td;
  g.l_d = dp_inv * ld * tb;
  for (Eigen::Index i = 0; i < c; ++i) {
    g.l_b(i, i) -= cd / lb(i, i);
    g.l_d(i, i) -= cd / ld(i, i);
  }
  g.l_b = lower(g.l_b);
  g.l_d = lower(g.l_d);
  return g;
}

VariationalParams prior_params(const PriorSpec& prior, int num_classes) {
  prior.validate();
  const auto c = static_cast<std::size_t>(num_classes);
  switch (prior.family) {
    case Family::kScalar: return gamma_from_mode_variance(prior.mode, prior.variance);
    case Family::kVector: {
      const GammaParams g = gamma_from_mode_variance(prior.mode, prior.variance);
      return GammaVectorParams{std::vector<double>(c, g.shape), std::vector<double>(c, g.rate)};
    }
    case Family::kMatrix: {
      KronGaussianParams m;
      m.mu = MatrixXd::Zero(num_classes, num_classes);
      m.mu.diagonal().setConstant(specfun::softplus_inv(prior.mode));
      m.l_b = MatrixXd::Identity(num_classes, num_classes);
      m.l_d = MatrixXd::Identity(num_classes, num_classes) * std::sqrt(prior.variance);
      return m;
    }
  }
  fail(ErrorCategory::kConfig, "prior_params: unknown family");
}

double kl_to_prior(const VariationalParams& q, const PriorSpec& prior, int num_classes) {
  if (family_of(q) != prior.family) fail(ErrorCategory::kConfig, "kl_to_prior: family mismatch");
  const VariationalParams p = prior_params(prior, num_classes);
  if (const auto* g = std::get_if<GammaParams>(&q)) return kl_gamma(*g, std::get<GammaParams>(p));
  if (const auto* v = std::get_if<GammaVectorParams>(&q)) {
    const auto& pv = std::get<GammaVectorParams>(p);
    double kl = 0.0;
    for (std::size_t i = 0; i < v->shapes.size(); ++i) {
      kl += kl_gamma({v->shapes[i], v->rates[i]}, {pv.shapes[i], pv.rates[i]});
    }
    return kl;
  }
  return kl_gauss_kron(std::get<KronGaussianParams>(q), std::get<KronGaussianParams>(p));
}

VariationalGrad kl_to_prior_grad(const VariationalParams& q, const PriorSpec& prior,
                                 int num_classes) {
  if (family_of(q) != prior.family) {
    fail(ErrorCategory::kConfig, "kl_to_prior_grad: family mismatch");
  }
  const VariationalParams p = prior_params(prior, num_classes);
  if (const auto* g = std::get_if<GammaParams>(&q)) {
    return kl_gamma_grad(*g, std::get<GammaParams>(p));
  }
  if (const auto* v = std::get_if<GammaVectorParams>(&q)) {
    const auto& pv = std::get<GammaVectorParams>(p);
    GammaVectorParams out{std::vector<double>(v->shapes.size()),
                          std::vector<double>(v->rates.size())};
    for (std::size_t i = 0; i < v->shapes.size(); ++i) {
      const GammaParams gi = kl_gamma_grad({v->shapes[i], v->rates[i]}, {pv.shapes[i], pv.rates[i]});
      out.shapes[i] = gi.shape;
      out.rates[i] = gi.rate;
    }
    return out;
  }
  return kl_gauss_kron_grad(std::get<KronGaussianParams>(q), std::get<KronGaussianParams>(p));
}

double odir_penalty(const Eigen::MatrixXd& mu, double weight) {
  const auto c = mu.rows();
  if (c < 2) return 0.0;
  const double off = mu.squaredNorm() - mu.diagonal().squaredNorm();
  return weight * off / static_cast<double>(c * (c - 1));
}

Eigen::MatrixXd odir_penalty_grad(const Eigen::MatrixXd& mu, double weight) {
  const auto c = mu.rows();
  if (c < 2) return MatrixXd::Zero(c, c);
  MatrixXd g = mu * (2.0 * weight / static_cast<double>(c * (c - 1)));
  g.diagonal().setZero();
  return g;
}

GammaDraw gamma_draw_from_uniform(double shape, double rate, double u) {
  check_positive(shape, "gamma shape");
  check_positive(rate, "gamma rate");
  const double g = specfun::gamma_p_inverse(shape, u);
  double dg = 0.0;
  if (g > 0.0 && std::isfinite(g)) {
    const double pdf = std::exp(specfun::log_gamma_pdf(g, shape, 1.0));
    if (pdf > 0.0 && std::isfinite(pdf)) dg = -d_cdf_d_shape(shape, g, u > 0.5) / pdf;
  }
  const double x = g / rate;
  return GammaDraw{x, dg / rate, -x / rate};
}

GammaDraw gamma_draw(double shape, double rate, RandomStream& rng) {
  return gamma_draw_from_uniform(shape, rate, rng.uniform());
}

std::pair<TransformParam, PathGradientTape> sample_transform(const VariationalParams& q,
                                                             RandomStream& rng, int num_classes) {
  PathGradientTape tape;
  tape.family = family_of(q);
  if (const auto* g = std::get_if<GammaParams>(&q)) {
    const GammaDraw d = gamma_draw(g->shape, g->rate, rng);
    tape.d_shape = {d.d_shape};
    tape.d_rate = {d.d_rate};
    return {ScalarTransform{d.value}, std::move(tape)};
  }
  if (const auto* v = std::get_if<GammaVectorParams>(&q)) {
    if (v->shapes.size() != static_cast<std::size_t>(num_classes)) {
      fail(ErrorCategory::kDimension, "sample_transform: vector params must have length C");
    }
    VectorTransform a{std::vector<double>(v->shapes.size())};
    tape.d_shape.resize(v->shapes.size());
    tape.d_rate.resize(v->shapes.size());
    for (std::size_t i = 0; i < v->shapes.size(); ++i) {
      const GammaDraw d = gamma_draw(v->shapes[i], v->rates[i], rng);
      a.a[i] = d.value;
      tape.d_shape[i] = d.d_shape;
      tape.d_rate[i] = d.d_rate;
    }
    return {std::move(a), std::move(tape)};
  }
  const auto& m = std::get<KronGaussianParams>(q);
  check_square(m.mu, num_classes, "mu");
  tape.eps.resize(num_classes, num_classes);
  // column-major fill so eps is vec^-1 of a standard normal vector
  for (int j = 0; j < num_classes; ++j) {
    for (int i = 0; i < num_classes; ++i) tape.eps(i, j) = rng.normal();
  }
  tape.raw = m.mu + lower(m.l_d) * tape.eps * lower(m.l_b).transpose();
  MatrixXd a = tape.raw;
  for (int i = 0; i < num_classes; ++i) a(i, i) = specfun::softplus(tape.raw(i, i));
  return {MatrixTransform{std::move(a)}, std::move(tape)};
}

VariationalGrad backprop_transform(const VariationalParams& q, const PathGradientTape& tape,
                                   const TransformParam& grad_a) {
  if (std::holds_alternative<GammaParams>(q)) {
    const double ga = std::get<ScalarTransform>(grad_a).a;
    return GammaParams{ga * tape.d_shape[0], ga * tape.d_rate[0]};
  }
  if (std::holds_alternative<GammaVectorParams>(q)) {
    const auto& ga = std::get<VectorTransform>(grad_a).a;
    GammaVectorParams out{std::vector<double>(ga.size()), std::vector<double>(ga.size())};
    for (std::size_t i = 0; i < ga.size(); ++i) {
      out.shapes[i] = ga[i] * tape.d_shape[i];
      out.rates[i] = ga[i] * tape.d_rate[i];
    }
    return out;
  }
  const auto& m = std::get<KronGaussianParams>(q);
  MatrixXd g_raw = std::get<MatrixTransform>(grad_a).a;
  for (Eigen::Index i = 0; i < g_raw.rows(); ++i) g_raw(i, i) *= specfun::sigmoid(tape.raw(i, i));
  KronGaussianParams out;
  out.mu = g_raw;
  out.l_d = lower(g_raw * lower(m.l_b) * tape.eps.transpose());
  out.l_b = lower(g_raw.transpose() * lower(m.l_d) * tape.eps);
  return out;
}

TransformParam mean_transform(const VariationalParams& q) {
  if (const auto* g = std::get_if<GammaParams>(&q)) return ScalarTransform{g->shape / g->rate};
  if (const auto* v = std::get_if<GammaVectorParams>(&q)) {
    VectorTransform a{std::vector<double>(v->shapes.size())};
    for (std::size_t i = 0; i < a.a.size(); ++i) a.a[i] = v->shapes[i] / v->rates[i];
    return a;
  }
  MatrixXd a = std::get<KronGaussianParams>(q).mu;
  for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, i) = specfun::softplus(a(i, i));
  return MatrixTransform{std::move(a)};
}

}  // namespace variational
}  // namespace etn
