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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "etn/basemodel.hpp"
#include "etn/bundle.hpp"
#include "etn/error.hpp"
#include "etn/etn.hpp"
#include "etn/metrics.hpp"
#include "etn/pipeline.hpp"
#include "etn/run_config.hpp"
#include "etn/static_scaling.hpp"
#include "etn/theory.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace etn;

namespace {

constexpr int kExitChecksFailed = 8;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kUsage: return 2;
    case ErrorCategory::kConfig: return 3;
    case ErrorCategory::kFormat:
    case ErrorCategory::kVersion:
    case ErrorCategory::kTruncated: return 4;
    case ErrorCategory::kIo: return 5;
    case ErrorCategory::kNumerical: return 6;
    default: return 7;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorCategory::kIo, "write failed for '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    fail(ErrorCategory::kIo, "cannot create directory '" + dir.string() + "'");
  }
}

std::string stem(const fs::path& p) { return p.stem().string(); }

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::istringstream cell(item);
    T v;
    if (!(cell >> v) || !(cell >> std::ws).eof()) {
      fail(ErrorCategory::kUsage, std::string("bad ") + what + " entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorCategory::kUsage, std::string(what) + " must not be empty");
  return out;
}

std::vector<std::pair<std::string, LogitBundle>> read_ood(const std::vector<std::string>& paths) {
  std::vector<std::pair<std::string, LogitBundle>> out;
  for (const auto& p : paths) out.emplace_back(stem(p), bundle::read_logit_bundle(p));
  return out;
}

void print_report(const MetricsReport& r) { std::cout << report::to_text(r); }

// gen-synth -----------------------------------------------------------------

struct GenOpts {
  std::string out;
  SynthSpec spec;
};

void run_gen(const GenOpts& o) {
  const SynthData d = gen_synth(o.spec);
  ensure_dir(o.out);
  const fs::path dir(o.out);
  bundle::write(dir / "pretrain.etnb", d.pretrain);
  bundle::write(dir / "adapt.etnb", d.adapt);
  bundle::write(dir / "test.etnb", d.test);
  bundle::write(dir / "ood.etnb", d.ood);
  std::cout << "wrote " << dir.string() << ": pretrain=" << d.pretrain.n << " adapt=" << d.adapt.n
            << " test=" << d.test.n << " ood=" << d.ood.n << " (C=" << o.spec.num_classes
            << ", D=" << o.spec.feature_dim << ", ood_shift=" << o.spec.ood_shift
            << ", seed=" << o.spec.seed << ")\n";
}

// pretrain ------------------------------------------------------------------

struct PretrainOpts {
  std::string data;
  std::string loss = "ce";
  std::string out;
  PretrainConfig cfg;
};

void run_pretrain(PretrainOpts o) {
  o.cfg.loss = parse_pretrain_loss(o.loss);
  const fs::path dir(o.data);
  const DataSplit train = bundle::read_data_split(dir / "pretrain.etnb");
  const TinyClassifier model = pretrain(train, o.cfg);
  ensure_dir(o.out);
  const fs::path out(o.out);
  model_file::save_file(out / "model.etnm", model);
  bundle::write(out / "pretrain.etnb", export_bundle(model, train, true));
  double test_acc = accuracy(model, train);
  for (const char* split : {"adapt", "test", "ood"}) {
    const fs::path in = dir / (std::string(split) + ".etnb");
    if (!fs::exists(in)) continue;
    const DataSplit s = bundle::read_data_split(in);
    const bool labeled = std::string(split) != "ood";
    bundle::write(out / (std::string(split) + ".etnb"), export_bundle(model, s, labeled));
    if (std::string(split) == "test") test_acc = accuracy(model, s);
  }
  std::printf("loss=%s train_accuracy=%.4f test_accuracy=%.4f\n", o.loss.c_str(),
              accuracy(model, train), test_acc);
}

// train-etn -----------------------------------------------------------------

struct TrainOpts {
  std::string bundle_path;
  std::string config;
  std::string out;
};

void run_train(const TrainOpts& o) {
  const RunConfig cfg = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
  const LogitBundle b = bundle::read_logit_bundle(o.bundle_path);
  if (!b.has_labels()) fail(ErrorCategory::kInvalidArgument, "adaptation bundle must be labeled");
  const MlpSpec spec{static_cast<int>(b.feature_dim), cfg.hidden_dim, 2};
  EtnModel model = make_model(cfg.family, spec, static_cast<int>(b.num_classes), cfg.train);
  const auto records = b.records();
  const TrainResult tr = train(model, records, cfg.train);
  checkpoint::save_file(o.out, model);
  const auto& h = tr.history;
  std::printf("family=%s epochs=%d initial_loss=%.6f final_loss=%.6f best_epoch=%d best_loss=%.6f\n",
              std::string(family_name(cfg.family)).c_str(), cfg.train.epochs, h.front().loss.total,
              h.back().loss.total, tr.best_epoch, tr.best_loss);
  for (const auto& e : h) {
    std::printf("epoch %3d loss=%.6f recon=%.6f kl=%.6f\n", e.epoch, e.loss.total, e.loss.recon, e.loss.kl);
  }
}

// eval ----------------------------------------------------------------------

struct EvalOpts {
  std::string checkpoint;
  std::string id;
  std::vector<std::string> ood;
  std::string report;
  std::string text_report;
  int mc_samples = 20;
  std::uint64_t seed = 0;
};

void run_eval(const EvalOpts& o) {
  const EtnModel model = checkpoint::load_file(o.checkpoint);
  const LogitBundle id = bundle::read_logit_bundle(o.id);
  const MetricsReport r = pipeline::evaluate_etn(model, id, read_ood(o.ood), o.mc_samples, o.seed);
  report::write_json(o.report, r);
  if (!o.text_report.empty()) write_text(o.text_report, report::to_text(r));
  print_report(r);
}

// baseline-static -----------------------------------------------------------

struct StaticOpts {
  std::string bundle_path;
  std::string out;
  std::string report;
  std::string id;
  std::vector<std::string> ood;
  StaticConfig cfg;
};

void run_static(const StaticOpts& o) {
  const LogitBundle b = bundle::read_logit_bundle(o.bundle_path);
  if (!b.has_labels()) fail(ErrorCategory::kInvalidArgument, "adaptation bundle must be labeled");
  const auto records = b.records();
  const double initial = static_loss(identity_scaling(), records, o.cfg.nu);
  const StaticScaling s = fit_static(records, o.cfg);
  nlohmann::json j{{"a", s.a}, {"b", s.b}, {"loss", s.loss}, {"initial_loss", initial}, {"step", s.steps}};
  write_text(o.out, j.dump(2) + "\n");
  std::printf("a=%.6f b=%.6f initial_loss=%.6f loss=%.6f\n", s.a, s.b, initial, s.loss);
  if (!o.report.empty()) {
    const LogitBundle id = bundle::read_logit_bundle(o.id.empty() ? o.bundle_path : o.id);
    const MetricsReport r = pipeline::evaluate_static(s, "static", id, read_ood(o.ood));
    report::write_json(o.report, r);
    print_report(r);
  }
}

// ablate --------------------------------------------------------------------

struct AblateOpts {
  std::string what;
  std::string grid;
  std::string seeds = "0,1,2";
  std::string report;
  std::string config;
  SynthSpec synth;
};

void run_ablate(const AblateOpts& o) {
  if (o.what != "prior-mode" && o.what != "mc-samples") {
    fail(ErrorCategory::kUsage, "--what must be prior-mode or mc-samples");
  }
  const auto grid = parse_list<double>(o.grid, "--grid");
  const auto seeds = parse_list<std::uint64_t>(o.seeds, "--seeds");
  const RunConfig base = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
  nlohmann::json rows = nlohmann::json::array();
  std::printf("%-12s %-6s %-10s %-10s %-10s %-10s\n", o.what.c_str(), "seed", "ood.mp", "ood.mi",
              "ood.de", "conf.mp");
  std::vector<pipeline::Prepared> data;
  for (auto seed : seeds) {
    SynthSpec spec = o.synth;
    spec.seed = seed;
    PretrainConfig pc;
    pc.seed = seed;
    data.push_back(pipeline::prepare(spec, pc));
  }
  for (double g : grid) {
    RunConfig cfg = base;
    if (o.what == "prior-mode") {
      cfg.train.prior.mode = g;
    } else {
      if (g < 1 || g != static_cast<int>(g)) fail(ErrorCategory::kUsage, "mc-samples grid must hold positive integers");
      cfg.train.mc_samples = static_cast<int>(g);
    }
    cfg.validate();
    double mean_mi = 0.0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const MetricsReport r = pipeline::run_etn(data[k], cfg, seeds[k]);
      const double mp = r.ood_mean.at("mp").aupr, mi = r.ood_mean.at("mi").aupr,
                   de = r.ood_mean.at("de").aupr, cmp = r.confidence.at("mp").aupr;
      mean_mi += mi / static_cast<double>(seeds.size());
      std::printf("%-12g %-6llu %-10.4f %-10.4f %-10.4f %-10.4f\n", g,
                  static_cast<unsigned long long>(seeds[k]), mp, mi, de, cmp);
      rows.push_back({{"value", g},
                      {"seed", seeds[k]},
                      {"accuracy", r.accuracy},
                      {"ood_aupr", {{"mp", mp}, {"um", r.ood_mean.at("um").aupr}, {"mi", mi}, {"de", de}}},
                      {"confidence_aupr", {{"mp", cmp}, {"um", r.confidence.at("um").aupr}}}});
    }
    std::printf("%-12g %-6s %-10s %-10.4f\n", g, "mean", "", mean_mi);
  }
  if (!o.report.empty()) {
    nlohmann::json j{{"what", o.what}, {"family", family_name(base.family)}, {"rows", rows}};
    write_text(o.report, j.dump(2) + "\n");
  }
}

// verify-theory -------------------------------------------------------------

int run_theory(const std::string& out) {
  const fs::path path(out);
  if (path.has_parent_path() && !fs::is_directory(path.parent_path())) {
    fail(ErrorCategory::kIo, "cannot write '" + out + "': directory does not exist");
  }
  const theory::VerificationReport rep = theory::run_suite(theory::SuiteConfig{});
  write_text(path, rep.to_json());
  std::cout << rep.to_text();
  return rep.all_mandatory_passed() ? 0 : kExitChecksFailed;
}

void add_synth_options(CLI::App* cmd, SynthSpec& s) {
  cmd->add_option("--classes", s.num_classes, "number of classes")->capture_default_str();
  cmd->add_option("--dim", s.feature_dim, "input dimension")->capture_default_str();
  cmd->add_option("--radius", s.radius, "class-mean radius")->capture_default_str();
  cmd->add_option("--sigma", s.sigma, "blob standard deviation")->capture_default_str();
  cmd->add_option("--ood-shift", s.ood_shift, "OOD translation along the first axis")->capture_default_str();
  cmd->add_option("--n-pretrain", s.n_pretrain)->capture_default_str();
  cmd->add_option("--n-adapt", s.n_adapt)->capture_default_str();
  cmd->add_option("--n-test", s.n_test)->capture_default_str();
  cmd->add_option("--n-ood", s.n_ood)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidential transformation of pretrained classifier logits"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* c_gen = app.add_subcommand("gen-synth", "write synthetic pretrain/adapt/test/ood splits");
  c_gen->add_option("--out", gen.out, "output directory")->required();
  add_synth_options(c_gen, gen.spec);
  c_gen->add_option("--seed", gen.spec.seed)->capture_default_str();

  PretrainOpts pre;
  auto* c_pre = app.add_subcommand("pretrain", "train the tiny base classifier and export logit bundles");
  c_pre->add_option("--data", pre.data, "directory written by gen-synth")->required();
  c_pre->add_option("--loss", pre.loss, "ce or edl")->capture_default_str();
  c_pre->add_option("--out", pre.out, "output directory")->required();
  c_pre->add_option("--seed", pre.cfg.seed)->capture_default_str();
  c_pre->add_option("--epochs", pre.cfg.epochs)->capture_default_str();
  c_pre->add_option("--hidden", pre.cfg.hidden_dim)->capture_default_str();

  TrainOpts tr;
  auto* c_tr = app.add_subcommand("train-etn", "train an ETN on an adaptation bundle");
  c_tr->add_option("--bundle", tr.bundle_path, "labeled ETNB bundle")->required();
  c_tr->add_option("--config", tr.config, "key=value run configuration");
  c_tr->add_option("--out", tr.out, "checkpoint path")->required();

  EvalOpts ev;
  auto* c_ev = app.add_subcommand("eval", "evaluate a checkpoint");
  c_ev->add_option("--checkpoint", ev.checkpoint)->required();
  c_ev->add_option("--id-bundle", ev.id)->required();
  c_ev->add_option("--ood-bundle", ev.ood, "repeatable");
  c_ev->add_option("--report", ev.report, "JSON report path")->required();
  c_ev->add_option("--text-report", ev.text_report, "key = value report path");
  c_ev->add_option("--mc-samples", ev.mc_samples)->capture_default_str();
  c_ev->add_option("--seed", ev.seed)->capture_default_str();

  StaticOpts st;
  auto* c_st = app.add_subcommand("baseline-static", "fit the global static scaling baseline");
  c_st->add_option("--bundle", st.bundle_path, "labeled adaptation bundle")->required();
  c_st->add_option("--out", st.out, "fitted parameters (JSON)")->required();
  c_st->add_option("--report", st.report, "JSON report path");
  c_st->add_option("--id-bundle", st.id, "ID evaluation bundle (default: --bundle)");
  c_st->add_option("--ood-bundle", st.ood, "repeatable");

  AblateOpts ab;
  auto* c_ab = app.add_subcommand("ablate", "sweep prior mode or MC sample count");
  c_ab->add_option("--what", ab.what, "prior-mode or mc-samples")->required();
  c_ab->add_option("--grid", ab.grid, "comma-separated values")->required();
  c_ab->add_option("--seeds", ab.seeds)->capture_default_str();
  c_ab->add_option("--config", ab.config, "base run configuration");
  c_ab->add_option("--report", ab.report, "JSON table path");
  add_synth_options(c_ab, ab.synth);

  std::string theory_out;
  auto* c_th = app.add_subcommand("verify-theory", "run the margin/concentration theory checks");
  c_th->add_option("--out", theory_out, "JSON report path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::cerr << "error[usage]: " << msg << '\n';
    return 2;
  }

  try {
    if (c_gen->parsed()) run_gen(gen);
    if (c_pre->parsed()) run_pretrain(pre);
    if (c_tr->parsed()) run_train(tr);
    if (c_ev->parsed()) run_eval(ev);
    if (c_st->parsed()) run_static(st);
    if (c_ab->parsed()) run_ablate(ab);
    if (c_th->parsed()) return run_theory(theory_out);
  } catch (const Error& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::cerr << "error[" << category_name(e.category()) << "]: " << msg << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
