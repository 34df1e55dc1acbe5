// Command-line front end: data generation, training, evaluation and audits.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aia/engine.hpp"
#include "aia/harness/dataset.hpp"
#include "aia/harness/experiments.hpp"
#include "aia/harness/metrics.hpp"
#include "aia/harness/synthetic.hpp"
#include "aia/harness/text.hpp"
#include "aia/oracle.hpp"

namespace {

using namespace aia;

struct Options {
  std::string data;
  std::string test;
  std::vector<double> lambdas;
  std::vector<std::size_t> ks;
  std::optional<std::size_t> passes;
  std::optional<std::size_t> pretrain_passes;
  unsigned hash_bits = TaskPredictor::kDefaultHashBits;
  std::uint64_t seed = 0;
  std::string quadratic = "on";
  std::string task_loss = "log";
  std::string out;
  std::string model;
  std::string init;
  std::string test_out;
  std::size_t limit = 100;
  SyntheticConfig synthetic;
};

bool parse_switch(const std::string& value) {
  if (value == "on") return true;
  if (value == "off") return false;
  throw std::invalid_argument("--quadratic takes on or off, got '" + value + "'");
}

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.pretrain.hash_bits = o.hash_bits;
  cfg.pretrain.seed = o.seed;
  if (o.pretrain_passes) cfg.pretrain.passes = *o.pretrain_passes;
  if (o.passes) cfg.train.passes = *o.passes;
  cfg.train.quadratic = parse_switch(o.quadratic);
  cfg.train.seed = o.seed;
  cfg.task_loss = parse_task_loss(o.task_loss);
  return cfg;
}

LossConfig loss_config(const Options& o, double lambda) {
  LossConfig loss;
  loss.lambda = lambda;
  loss.task_loss = parse_task_loss(o.task_loss);
  loss.validate();
  return loss;
}

// Both splits come from files when --data is given, otherwise from the
// synthetic generator seeded with --seed.
DatasetSplits load_splits(const Options& o, bool need_test) {
  if (o.data.empty()) {
    SyntheticConfig cfg = o.synthetic;
    cfg.seed = o.seed;
    cfg.hash_bits = o.hash_bits;
    return generate_synthetic(cfg);
  }
  Dataset train = load_jsonl(o.data);
  if (!need_test) return {train, train};
  if (o.test.empty()) throw std::invalid_argument("--test is required together with --data");
  Dataset test = load_jsonl(o.test, train.num_classes);
  if (test.num_parts != train.num_parts) {
    throw std::invalid_argument("train and test sets have different part counts");
  }
  return {std::move(train), std::move(test)};
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return in;
}

// Writes to --out when given, otherwise to stdout.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  auto out = open_output(path);
  write(out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

void write_rows(std::ostream& out, const std::vector<ParetoRow>& rows, std::size_t n,
                std::size_t k) {
  write_pareto_header(out, n, k);
  for (const auto& r : rows) write_pareto_row(out, r);
}

void run_gen(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("gen needs --out");
  SyntheticConfig cfg = o.synthetic;
  cfg.seed = o.seed;
  cfg.hash_bits = o.hash_bits;
  const auto splits = generate_synthetic(cfg);
  save_jsonl(splits.train, o.out);
  if (!o.test_out.empty()) save_jsonl(splits.test, o.test_out);
}

void run_featurize(const Options& o) {
  if (o.data.empty() || o.out.empty()) throw std::invalid_argument("featurize needs --data and --out");
  auto in = open_input(o.data);
  std::vector<PartedInstance> instances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      PartedInstance inst;
      inst.id = j.at("id").get<std::string>();
      inst.label = j.at("label").get<std::size_t>();
      const auto sentences = j.at("sentences").get<std::vector<std::string>>();
      inst.parts = text_to_parts(sentences, o.hash_bits);
      instances.push_back(std::move(inst));
    } catch (const std::exception& e) {
      throw std::runtime_error(o.data + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  // Documents have different sentence counts; pad with empty parts to the longest.
  std::size_t n = 0;
  for (const auto& inst : instances) n = std::max(n, inst.num_parts());
  for (auto& inst : instances) inst.parts.resize(n);
  save_jsonl(Dataset::from_instances(o.data, std::move(instances)), o.out);
}

void run_pretrain(const Options& o) {
  if (o.model.empty()) throw std::invalid_argument("pretrain needs --model");
  const auto splits = load_splits(o, false);
  const auto cfg = experiment_config(o);
  ExperimentConfig pcfg = cfg;
  if (o.passes) pcfg.pretrain.passes = *o.passes;
  const auto predictor = pretrain_on(splits.train, pcfg);
  auto out = open_output(o.model, std::ios::binary);
  predictor.save(out);
}

void run_train(const Options& o) {
  if (o.model.empty()) throw std::invalid_argument("train needs --model");
  if (o.lambdas.size() > 1) throw std::invalid_argument("train takes a single --lambda");
  const auto splits = load_splits(o, false);
  const auto cfg = experiment_config(o);
  TaskPredictor initial = [&] {
    if (o.init.empty()) return pretrain_on(splits.train, cfg);
    auto in = open_input(o.init);
    return TaskPredictor::load(in);
  }();
  const double lambda = o.lambdas.empty() ? 0.0 : o.lambdas.front();
  const auto bundle = train_bundle(splits.train, initial, loss_config(o, lambda), cfg);
  auto out = open_output(o.model, std::ios::binary);
  bundle.save(out);
}

ModelBundle load_bundle(const Options& o) {
  if (o.model.empty()) throw std::invalid_argument("--model is required");
  auto in = open_input(o.model);
  return ModelBundle::load(in);
}

Dataset load_eval_set(const Options& o, const ModelBundle& bundle) {
  if (o.test.empty()) throw std::invalid_argument("--test is required");
  Dataset test = load_jsonl(o.test, bundle.num_classes());
  if (test.num_parts != bundle.num_parts()) {
    throw std::invalid_argument("test set has " + std::to_string(test.num_parts) +
                                " parts, model expects " + std::to_string(bundle.num_parts()));
  }
  return test;
}

void run_eval(const Options& o) {
  const auto bundle = load_bundle(o);
  const auto test = load_eval_set(o, bundle);
  const auto row = evaluate(bundle, test);
  emit(o.out, [&](std::ostream& out) {
    write_rows(out, {row}, bundle.num_parts(), bundle.num_classes());
  });
}

void run_sweep(const Options& o) {
  if (o.lambdas.empty()) throw std::invalid_argument("sweep needs at least one --lambda");
  for (double l : o.lambdas) loss_config(o, l);
  const auto splits = load_splits(o, true);
  const auto rows = sweep_lambda(splits.train, splits.test, o.lambdas, experiment_config(o));
  emit(o.out, [&](std::ostream& out) {
    write_rows(out, rows, splits.train.num_parts, splits.train.num_classes);
  });
}

void run_baseline(const Options& o) {
  if (o.ks.empty()) throw std::invalid_argument("baseline needs at least one --k");
  const auto splits = load_splits(o, true);
  const auto rows = static_baseline(splits.train, splits.test, o.ks, experiment_config(o));
  emit(o.out, [&](std::ostream& out) {
    write_rows(out, rows, splits.train.num_parts, splits.train.num_classes);
  });
}

void run_audit(const Options& o) {
  const auto bundle = load_bundle(o);
  const auto test = load_eval_set(o, bundle);
  const std::size_t count = std::min(o.limit, test.size());
  const std::span<const PartedInstance> sample(test.instances.data(), count);
  const auto report = regret_audit(sample, bundle);
  emit(o.out, [&](std::ostream& out) { write_report(out, report); });
  if (!report.bound_satisfied) std::cerr << "warning: empirical regret exceeds the bound\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active information acquisition: train and evaluate part-acquisition policies"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--data", o.data, "Training JSONL (synthetic data when omitted)");
    sub->add_option("--test", o.test, "Test JSONL");
    sub->add_option("--lambda", o.lambdas, "Acquisition penalty; repeatable")->take_all();
    sub->add_option("--k", o.ks, "Static prefix length; repeatable")->take_all();
    sub->add_option("--passes", o.passes, "Training passes");
    sub->add_option("--pretrain-passes", o.pretrain_passes, "Predictor pretraining passes");
    sub->add_option("--hash-bits", o.hash_bits, "Feature hash width")->check(CLI::Range(1, 30));
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--quadratic", o.quadratic, "Quadratic state features (on|off)")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--task-loss", o.task_loss, "Task loss (log|zero-one)");
    sub->add_option("--out", o.out, "Output path");
    sub->add_option("--model", o.model, "Model path");
  };
  auto synthetic = [&](CLI::App* sub) {
    auto& s = o.synthetic;
    sub->add_option("--classes", s.num_classes, "Synthetic class count");
    sub->add_option("--parts", s.num_parts, "Synthetic part count");
    sub->add_option("--train-size", s.train_size, "Synthetic training instances");
    sub->add_option("--test-size", s.test_size, "Synthetic test instances");
    sub->add_option("--noise", s.noise, "Distractor token rate in uninformative parts");
    sub->add_option("--hard-fraction", s.hard_fraction, "Fraction of hard instances");
  };

  auto* gen = app.add_subcommand("gen", "Generate synthetic train/test JSONL");
  common(gen);
  synthetic(gen);
  gen->add_option("--test-out", o.test_out, "Where to write the test split");

  auto* featurize = app.add_subcommand("featurize", "Turn text JSONL ({id,label,sentences}) into parts");
  common(featurize);

  auto* pre = app.add_subcommand("pretrain", "Pretrain the task predictor on random part subsets");
  common(pre);
  synthetic(pre);

  auto* train = app.add_subcommand("train", "Jointly train the selector and predictor");
  common(train);
  synthetic(train);
  train->add_option("--init", o.init, "Pretrained predictor (pretrained here when omitted)");

  auto* eval = app.add_subcommand("eval", "Evaluate a model on a test set");
  common(eval);

  auto* sweep = app.add_subcommand("sweep", "Train and evaluate one model per lambda");
  common(sweep);
  synthetic(sweep);

  auto* baseline = app.add_subcommand("baseline", "Static first-k baseline");
  common(baseline);
  synthetic(baseline);

  auto* audit = app.add_subcommand("audit", "Empirical regret-bound audit of a model");
  common(audit);
  audit->add_option("--limit", o.limit, "Instances to audit")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) run_gen(o);
    else if (*featurize) run_featurize(o);
    else if (*pre) run_pretrain(o);
    else if (*train) run_train(o);
    else if (*eval) run_eval(o);
    else if (*sweep) run_sweep(o);
    else if (*baseline) run_baseline(o);
    else if (*audit) run_audit(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
