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

#include "etn/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "etn/edl.hpp"
#include "etn/error.hpp"
#include "etn/specfun.hpp"
#include "json.hpp"

namespace etn::theory {
namespace {

std::vector<double> margins(const TinyClassifier& model, const DataSplit& data) {
  std::vector<double> out(data.n);
  for (std::size_t i = 0; i < data.n; ++i) {
    out[i] = edl::margin(model.logits(data.row(i)), static_cast<int>(data.labels[i]));
  }
  return out;
}

bool ge_tol(double a, double b) { return a >= b - 1e-9 * std::max(1.0, std::abs(b)); }

Check make(std::string name, bool passed, std::map<std::string, double> values, std::string note = {},
           bool mandatory = true) {
  return Check{std::move(name), passed, mandatory, std::move(values), std::move(note)};
}

}  // namespace

Prop1Result prop1_constructions(int num_classes, double t, std::span<const double> b) {
  if (num_classes < 2) fail(ErrorCategory::kInvalidArgument, "prop1: need C >= 2");
  if (b.size() != static_cast<std::size_t>(num_classes)) {
    fail(ErrorCategory::kDimension, "prop1: b must have length C");
  }
  if (!(t >= 0.0)) fail(ErrorCategory::kInvalidArgument, "prop1: t must be >= 0");
  const auto c = static_cast<std::size_t>(num_classes);
  std::vector<double> bounded(c, -t), diverging(c, 0.0);
  bounded[0] = 0.0;
  diverging[0] = t;
  Prop1Result r;
  r.ce_bounded = edl::cross_entropy(bounded, 0);
  r.alpha0_bounded = edl::logits_to_alpha(bounded, b).alpha0();
  r.ce_diverging = edl::cross_entropy(diverging, 0);
  r.alpha0_diverging = edl::logits_to_alpha(diverging, b).alpha0();
  return r;
}

void MarginBoundParams::validate() const {
  if (num_classes < 2) fail(ErrorCategory::kInvalidArgument, "margin bound: C must be >= 2");
  if (!(eta >= 0.0)) fail(ErrorCategory::kInvalidArgument, "margin bound: eta must be >= 0");
  if (!(eta < nu - b_y)) fail(ErrorCategory::kInvalidArgument, "margin bound: eta must be < nu - b_y");
}

double edl_margin_lower_bound(const MarginBoundParams& p) {
  p.validate();
  if (!(p.eta > 0.0)) fail(ErrorCategory::kDomain, "edl_margin_lower_bound: eta must be > 0");
  return specfun::softplus_inv(p.nu - p.b_y - p.eta) - specfun::softplus_inv(p.eta);
}

double corollary1_threshold(const MarginBoundParams& p) {
  p.validate();
  if (p.eta == 0.0) return 0.0;
  const double log_ratio = specfun::log_expm1(p.eta) - specfun::log_expm1(p.nu - p.b_y - p.eta);
  return specfun::softplus(std::log(static_cast<double>(p.num_classes - 1)) + log_ratio);
}

double implied_ce_margin(double loss, int num_classes) {
  if (num_classes < 2) fail(ErrorCategory::kInvalidArgument, "implied_ce_margin: C must be >= 2");
  if (loss < 0.0) fail(ErrorCategory::kDomain, "implied_ce_margin: loss must be >= 0");
  if (loss == 0.0) return std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(num_classes - 1)) - specfun::log_expm1(loss);
}

Quantiles quantiles(std::vector<double> v) {
  if (v.empty()) fail(ErrorCategory::kInvalidArgument, "quantiles: empty input");
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return Quantiles{v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

MarginHistogram margin_histogram(std::span<const double> ce_margins, std::span<const double> edl_margins) {
  if (ce_margins.empty() || edl_margins.empty()) {
    fail(ErrorCategory::kInvalidArgument, "margin histogram: empty margin set");
  }
  MarginHistogram h;
  h.lo = std::min(*std::min_element(ce_margins.begin(), ce_margins.end()),
                  *std::min_element(edl_margins.begin(), edl_margins.end()));
  h.hi = std::max(*std::max_element(ce_margins.begin(), ce_margins.end()),
                  *std::max_element(edl_margins.begin(), edl_margins.end()));
  const double width = h.hi > h.lo ? (h.hi - h.lo) / MarginHistogram::kBins : 1.0;
  auto fill = [&](std::span<const double> m) {
    std::vector<std::size_t> counts(MarginHistogram::kBins, 0);
    for (double v : m) {
      auto k = static_cast<int>((v - h.lo) / width);
      counts[static_cast<std::size_t>(std::clamp(k, 0, MarginHistogram::kBins - 1))] += 1;
    }
    return counts;
  };
  h.ce_counts = fill(ce_margins);
  h.edl_counts = fill(edl_margins);
  h.ce = quantiles({ce_margins.begin(), ce_margins.end()});
  h.edl = quantiles({edl_margins.begin(), edl_margins.end()});
  return h;
}

MarginHistogram margin_experiment(const TinyClassifier& ce_model, const TinyClassifier& edl_model,
                                  const DataSplit& data) {
  if (data.n == 0) fail(ErrorCategory::kInvalidArgument, "margin experiment: empty data");
  const auto a = margins(ce_model, data);
  const auto b = margins(edl_model, data);
  return margin_histogram(a, b);
}

Theorem1Stats theorem1_check(const TinyClassifier& ce_model, const TinyClassifier& edl_model,
                             const DataSplit& data, double nu) {
  if (data.n == 0) fail(ErrorCategory::kInvalidArgument, "theorem1 check: empty data");
  const int c = ce_model.num_classes();
  const std::vector<double> ones(static_cast<std::size_t>(c), 1.0);
  Theorem1Stats s;
  s.n = data.n;
  for (std::size_t i = 0; i < data.n; ++i) {
    const int y = static_cast<int>(data.labels[i]);
    const auto z_ce = ce_model.logits(data.row(i));
    const auto z_edl = edl_model.logits(data.row(i));
    const double loss = edl::cross_entropy(z_ce, y);
    const double g_ce = edl::margin(z_ce, y);
    const double g_edl = edl::margin(z_edl, y);
    if (ge_tol(g_edl, g_ce)) ++s.edl_ge_ce;

    const DirichletParams alpha = edl::logits_to_alpha(z_edl, ones);
    double eta = std::max(0.0, nu - alpha[static_cast<std::size_t>(y)]);
    for (int j = 0; j < c; ++j) {
      if (j != y) eta = std::max(eta, alpha[static_cast<std::size_t>(j)] - 1.0);
    }
    if (!(eta < nu - 1.0) || !(eta > 0.0)) continue;
    ++s.eta_valid;
    const MarginBoundParams p{nu, 1.0, eta, c, loss};
    if (ge_tol(g_edl, edl_margin_lower_bound(p))) ++s.lemma2_holds;
    if (loss >= corollary1_threshold(p)) {
      ++s.hypothesis;
      if (ge_tol(g_edl, implied_ce_margin(loss, c))) ++s.chain_holds;
    }
  }
  s.freq_edl_ge_ce = static_cast<double>(s.edl_ge_ce) / static_cast<double>(s.n);
  s.freq_hypothesis = static_cast<double>(s.hypothesis) / static_cast<double>(s.n);
  return s;
}

bool VerificationReport::all_mandatory_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return !c.mandatory || c.passed; });
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  out.precision(10);
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << (c.mandatory ? "" : " (informational)");
    for (const auto& [k, v] : c.values) out << ' ' << k << '=' << v;
    if (!c.note.empty()) out << " -- " << c.note;
    out << '\n';
  }
  out << "interpretation: " << interpretation << '\n';
  out << (all_mandatory_passed() ? "all mandatory checks passed" : "some mandatory checks failed") << '\n';
  return out.str();
}

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  j["all_mandatory_passed"] = all_mandatory_passed();
  j["interpretation"] = interpretation;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [k, v] : c.values) values[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"mandatory", c.mandatory},
                           {"values", values},
                           {"note", c.note}});
  }
  return j.dump(2) + "\n";
}

SuiteConfig::SuiteConfig() {
  ce.loss = PretrainLoss::kCrossEntropy;
  edl.loss = PretrainLoss::kEdl;
}

VerificationReport run_suite(const SuiteConfig& cfg) {
  VerificationReport rep;
  rep.interpretation =
      "probabilities are empirical frequencies over training samples; L is the CE model's "
      "per-sample loss; eta_i = max(nu - alpha_y, max_{j!=y}(alpha_j - b_j), 0) with b = 1";

  {
    const std::vector<double> b(10, 1.0);
    const Prop1Result r = prop1_constructions(10, 40.0, b);
    const bool ok = r.ce_bounded <= 1e-12 && r.ce_diverging <= 1e-12 && r.alpha0_bounded >= 10.5 &&
                    r.alpha0_bounded <= 10.9 && r.alpha0_diverging >= 50.0;
    rep.checks.push_back(make("prop1.t40", ok,
                              {{"ce_bounded", r.ce_bounded},
                               {"alpha0_bounded", r.alpha0_bounded},
                               {"ce_diverging", r.ce_diverging},
                               {"alpha0_diverging", r.alpha0_diverging}}));

    double st = 0, sa = 0, stt = 0, sta = 0, n = 0;
    for (int t = 20; t <= 60; ++t) {
      const double a0 = prop1_constructions(10, t, b).alpha0_diverging;
      st += t;
      sa += a0;
      stt += static_cast<double>(t) * t;
      sta += t * a0;
      n += 1;
    }
    const double slope = (n * sta - st * sa) / (n * stt - st * st);
    rep.checks.push_back(make("prop1.slope", std::abs(slope - 1.0) <= 0.01, {{"slope", slope}}));

    bool mono = true;
    double prev_b = std::numeric_limits<double>::infinity(), prev_d = prev_b;
    for (int t = 1; t <= 50; ++t) {
      const Prop1Result q = prop1_constructions(10, t, b);
      mono = mono && q.ce_bounded <= prev_b && q.ce_diverging <= prev_d;
      prev_b = q.ce_bounded;
      prev_d = q.ce_diverging;
    }
    rep.checks.push_back(make("lemma1.ce_decreasing_in_margin", mono, {{"ce_at_t50", prev_b}}));
  }

  {
    bool mono_eta = true, mono_c = true, lb_dec = true;
    for (int c : {2, 10, 100, 100000}) {
      double prev = -1.0;
      for (double eta = 0.0; eta < 5.0; eta += 0.25) {
        const double v = corollary1_threshold({10.0, 1.0, eta, c, 0.0});
        mono_eta = mono_eta && v >= prev;
        prev = v;
      }
    }
    for (double eta : {0.5, 1.0, 2.0, 4.0}) {
      double prev = -1.0;
      for (int c : {2, 3, 10, 100, 1000, 100000}) {
        const double v = corollary1_threshold({10.0, 1.0, eta, c, 0.0});
        mono_c = mono_c && v >= prev;
        prev = v;
      }
    }
    for (double nu : {3.0, 10.0, 1e4}) {
      double prev = std::numeric_limits<double>::infinity();
      const double half = (nu - 1.0) / 2.0;
      for (int k = 1; k < 50; ++k) {
        const double v = edl_margin_lower_bound({nu, 1.0, half * k / 50.0, 10, 0.0});
        lb_dec = lb_dec && v < prev;
        prev = v;
      }
    }
    const double typical = corollary1_threshold({1e4, 1.0, 1.0, 10, 0.0});
    const double large_c = corollary1_threshold({10.0, 1.0, 1.0, 100000, 0.0});
    rep.checks.push_back(make("corollary1.increasing_in_eta", mono_eta, {}));
    rep.checks.push_back(make("corollary1.increasing_in_C", mono_c, {}));
    rep.checks.push_back(make("lemma2.bound_decreasing_in_eta", lb_dec, {}));
    rep.checks.push_back(make("corollary1.threshold_examples", typical < 1e-300 && large_c > typical,
                              {{"C10_nu1e4_eta1", typical}, {"C1e5_nu10_eta1", large_c}}));
  }

  for (std::uint64_t seed : cfg.seeds) {
    SynthSpec spec = cfg.synth;
    spec.seed = seed;
    const SynthData data = gen_synth(spec);
    PretrainConfig ce_cfg = cfg.ce, edl_cfg = cfg.edl;
    ce_cfg.seed = edl_cfg.seed = seed;
    const TinyClassifier ce = pretrain(data.pretrain, ce_cfg);
    const TinyClassifier edl = pretrain(data.pretrain, edl_cfg);
    const std::string tag = ".seed" + std::to_string(seed);

    const double acc_ce = accuracy(ce, data.test), acc_edl = accuracy(edl, data.test);
    rep.checks.push_back(make("pretrain.accuracy" + tag, acc_ce >= 0.95 && acc_edl >= 0.90,
                              {{"ce", acc_ce}, {"edl", acc_edl}}, "ce >= 0.95, edl >= 0.90"));

    const MarginHistogram h = margin_experiment(ce, edl, data.pretrain);
    rep.checks.push_back(make("margin.edl_median_exceeds_ce" + tag, h.edl.median > h.ce.median,
                              {{"ce_median", h.ce.median},
                               {"edl_median", h.edl.median},
                               {"ce_q25", h.ce.q25},
                               {"edl_q25", h.edl.q25},
                               {"lo", h.lo},
                               {"hi", h.hi}}));

    const Theorem1Stats s = theorem1_check(ce, edl, data.pretrain, edl_cfg.nu);
    const std::map<std::string, double> tv{{"n", static_cast<double>(s.n)},
                                           {"eta_valid", static_cast<double>(s.eta_valid)},
                                           {"lemma2_holds", static_cast<double>(s.lemma2_holds)},
                                           {"hypothesis", static_cast<double>(s.hypothesis)},
                                           {"chain_holds", static_cast<double>(s.chain_holds)},
                                           {"freq_edl_ge_ce", s.freq_edl_ge_ce},
                                           {"freq_hypothesis", s.freq_hypothesis}};
    rep.checks.push_back(make("theorem1.per_sample_chain" + tag,
                              s.lemma2_holds == s.eta_valid && s.chain_holds == s.hypothesis, tv));
    rep.checks.push_back(make("theorem1.frequency_bound" + tag, s.freq_edl_ge_ce >= s.freq_hypothesis,
                              {{"freq_edl_ge_ce", s.freq_edl_ge_ce}, {"freq_hypothesis", s.freq_hypothesis}},
                              "losses differ between the two models, so the bound is indicative", false));
  }
  return rep;
}

}  // namespace etn::theory
