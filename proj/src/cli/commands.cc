#include "muscert/cli.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "muscert/attack.h"
#include "muscert/attribution.h"
#include "muscert/certify.h"
#include "muscert/data.h"
#include "muscert/error.h"
#include "muscert/io.h"
#include "muscert/lcg.h"
#include "muscert/models.h"
#include "muscert/parallel.h"
#include "muscert/selfcheck.h"
#include "muscert/smoothing.h"

namespace muscert::cli {
namespace {

using Json = nlohmann::ordered_json;

struct CommonFlags {
  std::string model_path;
  std::string data_path;
  std::string grouping_path;
  uint64_t q = 16;
  uint64_t lambda_num = 4;
  uint64_t seed = 0;
  std::string mu_mode = "none";
  size_t workers = 1;
  std::string out_path;
  std::optional<size_t> limit;
};

struct ScorerFlags {
  std::string scorer = "occlusion";
  std::string scorer_model = "base";
  std::optional<size_t> topk;
  size_t lime_samples = 256;
  double lime_width = 0.0;
  size_t shap_permutations = 64;
};

struct Loaded {
  LabeledDataset data;
  std::unique_ptr<SmoothedModel> model;
};

void add_io_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--out", f.out_path, "Output file (default: stdout)");
  cmd->add_option("--workers", f.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
}

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--model", f.model_path, "Model JSON")->required();
  cmd->add_option("--data", f.data_path, "Labeled CSV")->required();
  cmd->add_option("--grouping", f.grouping_path, "Feature grouping JSON");
  cmd->add_option("--q", f.q, "Quantization")->capture_default_str();
  cmd->add_option("--lambda-num", f.lambda_num, "lambda = lambda-num / q")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for noise and scorers")
      ->capture_default_str();
  cmd->add_option("--limit", f.limit, "Use only the first N examples");
  add_io_flags(cmd, f);
}

void add_mu_flag(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--mu-mode", f.mu_mode, "Noise mask for certification")
      ->check(CLI::IsMember({"none", "phi"}))
      ->capture_default_str();
}

void add_scorer_flags(CLI::App* cmd, ScorerFlags& s, bool list) {
  cmd->add_option("--scorer", s.scorer,
                  list ? "Comma-separated scorers: occlusion,vgrad,lime,shap"
                       : "occlusion | vgrad | lime | shap")
      ->capture_default_str();
  cmd->add_option("--scorer-model", s.scorer_model,
                  "Model the scorer explains")
      ->check(CLI::IsMember({"base", "smoothed"}))
      ->capture_default_str();
  cmd->add_option("--lime-samples", s.lime_samples)->capture_default_str();
  cmd->add_option("--lime-width", s.lime_width, "0 selects n/4");
  cmd->add_option("--shap-permutations", s.shap_permutations)
      ->capture_default_str();
}

std::vector<std::string> split_scorers(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item != "occlusion" && item != "vgrad" && item != "lime" &&
        item != "shap") {
      throw ParameterError("unknown scorer '" + item +
                           "' (expected occlusion, vgrad, lime or shap)");
    }
    out.push_back(item);
  }
  if (out.empty()) throw ParameterError("--scorer is empty");
  return out;
}

Loaded load_inputs(const CommonFlags& f) {
  ClassifierHandle base = load_model(f.model_path);
  LabeledDataset data = load_csv_dataset(f.data_path);
  if (data.d != base->input_dim()) {
    throw DimensionError(f.data_path + ": rows have " +
                         std::to_string(data.d) + " features, model expects " +
                         std::to_string(base->input_dim()));
  }
  if (data.m > base->num_classes()) {
    throw DataError(f.data_path + ": labels reach class " +
                    std::to_string(data.m - 1) + " but the model has " +
                    std::to_string(base->num_classes()) + " classes");
  }
  if (f.limit && *f.limit < data.size()) {
    data.inputs.resize(*f.limit);
    data.labels.resize(*f.limit);
  }
  FeatureGrouping grouping = f.grouping_path.empty()
                                 ? FeatureGrouping::trivial(data.d)
                                 : FeatureGrouping::load(f.grouping_path);
  if (grouping.raw_dim() != data.d) {
    throw DimensionError(f.grouping_path + ": grouping covers " +
                         std::to_string(grouping.raw_dim()) +
                         " features, data has " + std::to_string(data.d));
  }
  const size_t n = grouping.group_count();
  SmoothingConfig cfg(f.q, f.lambda_num, f.seed, n);
  Loaded out;
  out.data = std::move(data);
  out.model = std::make_unique<SmoothedModel>(std::move(base),
                                              std::move(grouping), cfg);
  return out;
}

ScoreVector compute_scores(const std::string& scorer, const ScorerFlags& s,
                           const SmoothedModel& model,
                           std::span<const double> x, uint64_t stream) {
  const bool smoothed = s.scorer_model == "smoothed";
  if (scorer == "vgrad") {
    return smoothed ? smoothed_gradient_scores(model, x)
                    : gradient_scores(model.base(), x, model.grouping());
  }
  const ScoringTarget target =
      smoothed ? ScoringTarget::smoothed(model)
               : ScoringTarget::base(model.base(), model.grouping());
  if (scorer == "occlusion") return occlusion_scores(target, x);
  if (scorer == "lime") {
    LimeOptions opt;
    opt.samples = s.lime_samples;
    opt.kernel_width = s.lime_width;
    opt.rng_state = stream;
    return lime_lite_scores(target, x, opt);
  }
  if (scorer == "shap") {
    ShapOptions opt;
    opt.permutations = s.shap_permutations;
    opt.rng_state = stream;
    return shap_lite_scores(target, x, opt);
  }
  throw ParameterError("unknown scorer '" + scorer + "'");
}

size_t resolve_topk(const ScorerFlags& s, size_t n) {
  const size_t k = s.topk ? *s.topk : (n + 3) / 4;
  if (k > n) {
    throw ParameterError("--topk " + std::to_string(k) + " exceeds n = " +
                         std::to_string(n));
  }
  return k;
}

Json meta_line(const std::string& command, const CommonFlags& f,
               const SmoothedModel& model, size_t examples) {
  Json j;
  j["type"] = "meta";
  j["command"] = command;
  j["q"] = f.q;
  j["lambda_num"] = f.lambda_num;
  j["lambda"] = model.lambda();
  j["seed"] = f.seed;
  j["n"] = model.n();
  j["d"] = model.d();
  j["m"] = model.m();
  j["examples"] = examples;
  return j;
}

// value(r) for r = 0..n given per-example (eligible, radius).
std::vector<double> curve_values(const std::vector<bool>& eligible,
                                 const std::vector<size_t>& radius, size_t n) {
  std::vector<double> values(n + 1, 0.0);
  const size_t total = radius.size();
  if (total == 0) return values;
  for (size_t r = 0; r <= n; ++r) {
    size_t hits = 0;
    for (size_t i = 0; i < total; ++i) hits += eligible[i] && radius[i] >= r;
    values[r] = static_cast<double>(hits) / static_cast<double>(total);
  }
  return values;
}

Json curve_line(const std::string& kind, const std::vector<double>& values) {
  Json j;
  j["type"] = "curve";
  j["kind"] = kind;
  Json points = Json::array();
  for (size_t r = 0; r < values.size(); ++r) {
    points.push_back(Json{{"r", r}, {"value", values[r]}});
  }
  j["points"] = std::move(points);
  return j;
}

void write_curve_csv(const std::string& path,
                     const std::vector<std::string>& names,
                     const std::vector<std::vector<double>>& columns) {
  std::string text = "r";
  for (const auto& name : names) text += "," + name;
  text += "\n";
  for (size_t r = 0; r < columns.front().size(); ++r) {
    text += std::to_string(r);
    for (const auto& col : columns) text += "," + format_double(col[r]);
    text += "\n";
  }
  write_text_file(path, text);
}

void emit(const std::vector<Json>& lines, const std::string& out_path,
          std::ostream& out) {
  std::string text;
  for (const auto& line : lines) text += line.dump() + "\n";
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    write_text_file(out_path, text);
  }
}

void append_raw(std::vector<Json>& lines, const std::string& json_text) {
  lines.push_back(Json::parse(json_text));
}

int cmd_synth(size_t per_class, std::optional<size_t> count, size_t d,
              size_t m, double separation, const CommonFlags& f,
              std::ostream& out) {
  if (count) per_class = (*count + m - 1) / m;
  LabeledDataset data = synth_blobs(per_class, d, m, separation, f.seed);
  if (count) {
    // Lower classes take the remainder; samples are class-major.
    LabeledDataset kept = data;
    kept.inputs.clear();
    kept.labels.clear();
    for (size_t c = 0; c < m; ++c) {
      const size_t take = *count / m + (c < *count % m ? 1 : 0);
      for (size_t i = 0; i < take; ++i) {
        kept.inputs.push_back(data.inputs[c * per_class + i]);
        kept.labels.push_back(c);
      }
    }
    data = std::move(kept);
  }
  const std::string text = dataset_to_csv(data);
  if (f.out_path.empty() || f.out_path == "-") {
    out << text;
  } else {
    write_text_file(f.out_path, text);
  }
  return kExitOk;
}

int cmd_train(const std::string& data_path, size_t epochs, double rate,
              const CommonFlags& f, std::ostream& out) {
  const LabeledDataset data = load_csv_dataset(data_path);
  FitReport report;
  const LinearSoftmaxModel model = fit_logistic(data, epochs, rate, f.seed,
                                                &report);
  if (f.out_path.empty()) throw ParameterError("train needs --out");
  save_model(model, f.out_path);
  Json j;
  j["type"] = "train";
  j["examples"] = data.size();
  j["d"] = data.d;
  j["m"] = data.m;
  j["epochs"] = epochs;
  j["final_loss"] = mean_cross_entropy(model, data);
  j["accuracy"] = accuracy(model, data);
  j["final_learning_rate"] = report.final_learning_rate;
  out << j.dump() << "\n";
  return kExitOk;
}

int cmd_certify(const CommonFlags& f, const ScorerFlags& s,
                const std::string& curve_csv, std::ostream& out) {
  const std::string scorer = split_scorers(s.scorer).at(0);
  Loaded in = load_inputs(f);
  const SmoothedModel& model = *in.model;
  const MuMode mode = parse_mu_mode(f.mu_mode);
  const size_t n = model.n();
  const size_t k = resolve_topk(s, n);
  const size_t count = in.data.size();

  const auto records = parallel_map(count, f.workers, [&](size_t i) {
    const auto& x = in.data.inputs[i];
    const ScoreVector scores =
        compute_scores(scorer, s, model, x, derive_stream(f.seed, i));
    return certify_example(model, x, topk_binarize(scores, k),
                           std::to_string(i), mode);
  });

  std::vector<Json> lines;
  Json meta = meta_line("certify", f, model, count);
  meta["scorer"] = scorer;
  meta["scorer_model"] = s.scorer_model;
  meta["topk"] = k;
  meta["mu_mode"] = f.mu_mode;
  lines.push_back(std::move(meta));

  std::vector<bool> consistent(count);
  std::vector<size_t> r_inc(count), r_dec(count);
  double sum_inc = 0.0, sum_dec = 0.0;
  size_t n_consistent = 0;
  for (size_t i = 0; i < count; ++i) {
    append_raw(lines, cert_record_to_json(records[i]));
    consistent[i] = records[i].consistent;
    r_inc[i] = records[i].r_inc;
    r_dec[i] = records[i].r_dec;
    n_consistent += records[i].consistent;
    sum_inc += static_cast<double>(records[i].r_inc);
    sum_dec += static_cast<double>(records[i].r_dec);
  }
  const auto inc = curve_values(consistent, r_inc, n);
  const auto dec = curve_values(consistent, r_dec, n);
  lines.push_back(curve_line("inc", inc));
  lines.push_back(curve_line("dec", dec));

  Json summary;
  summary["type"] = "summary";
  summary["examples"] = count;
  summary["consistent"] = n_consistent;
  summary["consistent_rate"] =
      count ? static_cast<double>(n_consistent) / count : 0.0;
  summary["mean_r_inc"] = count ? sum_inc / count : 0.0;
  summary["mean_r_dec"] = count ? sum_dec / count : 0.0;
  lines.push_back(std::move(summary));

  emit(lines, f.out_path, out);
  if (!curve_csv.empty()) write_curve_csv(curve_csv, {"inc", "dec"}, {inc, dec});
  return kExitOk;
}

int cmd_accuracy_curve(const CommonFlags& f, const std::string& curve_csv,
                       std::ostream& out) {
  Loaded in = load_inputs(f);
  const SmoothedModel& model = *in.model;
  const size_t count = in.data.size();

  struct Row {
    size_t cls;
    size_t base_cls;
    Radius r;
  };
  const auto rows = parallel_map(count, f.workers, [&](size_t i) {
    const auto& x = in.data.inputs[i];
    const TopClass top = top_class_and_gap(smoothed_predict(model, x));
    const size_t base_cls = top_class_and_gap(model.base()->evaluate(x)).cls;
    return Row{top.cls, base_cls, radius_from_gap(top.gap, model.lambda())};
  });

  std::vector<Json> lines;
  lines.push_back(meta_line("accuracy-curve", f, model, count));
  std::vector<bool> correct(count);
  std::vector<size_t> radius(count);
  size_t base_correct = 0;
  for (size_t i = 0; i < count; ++i) {
    correct[i] = rows[i].cls == in.data.labels[i];
    radius[i] = rows[i].r.integer;
    base_correct += rows[i].base_cls == in.data.labels[i];
    Json j;
    j["type"] = "accuracy";
    j["id"] = std::to_string(i);
    j["label"] = in.data.labels[i];
    j["class"] = rows[i].cls;
    j["correct"] = static_cast<bool>(correct[i]);
    j["r_dec_real"] = rows[i].r.real;
    j["r_dec"] = rows[i].r.integer;
    lines.push_back(std::move(j));
  }
  const auto values = curve_values(correct, radius, model.n());
  lines.push_back(curve_line("accuracy", values));
  Json summary;
  summary["type"] = "summary";
  summary["examples"] = count;
  summary["smoothed_accuracy"] = values[0];
  summary["base_accuracy"] =
      count ? static_cast<double>(base_correct) / count : 0.0;
  lines.push_back(std::move(summary));

  emit(lines, f.out_path, out);
  if (!curve_csv.empty()) write_curve_csv(curve_csv, {"accuracy"}, {values});
  return kExitOk;
}

int cmd_explain(const CommonFlags& f, const ScorerFlags& s, size_t r_inc,
                size_t r_dec, bool binary_search, std::ostream& out) {
  const auto scorers = split_scorers(s.scorer);
  Loaded in = load_inputs(f);
  const SmoothedModel& model = *in.model;
  const size_t count = in.data.size();
  const size_t n = model.n();
  GreedyOptions opt;
  opt.mu_mode = parse_mu_mode(f.mu_mode);
  opt.binary_search = binary_search;

  std::vector<Json> lines;
  Json meta = meta_line("explain", f, model, count);
  meta["scorers"] = scorers;
  meta["scorer_model"] = s.scorer_model;
  meta["rinc"] = r_inc;
  meta["rdec"] = r_dec;
  meta["mu_mode"] = f.mu_mode;
  meta["binary_search"] = binary_search;
  lines.push_back(std::move(meta));

  std::vector<Json> summaries;
  for (const auto& scorer : scorers) {
    const auto results = parallel_map(count, f.workers, [&](size_t i) {
      const auto& x = in.data.inputs[i];
      const ScoreVector scores =
          compute_scores(scorer, s, model, x, derive_stream(f.seed, i));
      return greedy_stable_attribution(model, x, scores, r_inc, r_dec, opt);
    });
    double sum_k = 0.0;
    size_t not_met = 0;
    for (size_t i = 0; i < count; ++i) {
      const double k_x = static_cast<double>(results[i].mask.popcount()) /
                         static_cast<double>(n);
      sum_k += k_x;
      not_met += !results[i].met;
      Json j;
      j["type"] = "explain";
      j["scorer"] = scorer;
      j["id"] = std::to_string(i);
      j["mask"] = results[i].mask.to_string();
      j["k_x"] = k_x;
      j["met"] = results[i].met;
      j["checks"] = results[i].checks;
      lines.push_back(std::move(j));
    }
    Json summary;
    summary["type"] = "summary";
    summary["scorer"] = scorer;
    summary["examples"] = count;
    summary["mean_k_x"] = count ? sum_k / count : 0.0;
    summary["not_met"] = not_met;
    summaries.push_back(std::move(summary));
  }
  for (auto& j : summaries) lines.push_back(std::move(j));
  emit(lines, f.out_path, out);
  return kExitOk;
}

int cmd_attack(const CommonFlags& f, const ScorerFlags& s,
               std::optional<size_t> budget, std::ostream& out,
               std::ostream& err) {
  const std::string scorer = split_scorers(s.scorer).at(0);
  Loaded in = load_inputs(f);
  const SmoothedModel& model = *in.model;
  const MuMode mode = parse_mu_mode(f.mu_mode);
  const size_t k = resolve_topk(s, model.n());
  const size_t count = in.data.size();

  struct Row {
    CertRecord cert;
    AttackResult inc;
    AttackResult dec;
  };
  const auto rows = parallel_map(count, f.workers, [&](size_t i) {
    const auto& x = in.data.inputs[i];
    const ScoreVector scores =
        compute_scores(scorer, s, model, x, derive_stream(f.seed, i));
    const Mask phi = topk_binarize(scores, k);
    const SmoothedModel certifier = model_for_mode(model, phi, mode);
    const size_t free = model.n() - phi.popcount();
    const size_t b = budget ? std::min(*budget, free) : free;
    return Row{certify_example(model, x, phi, std::to_string(i), mode),
               attack_incremental(certifier, x, phi, b),
               attack_decremental(certifier, x, phi, b)};
  });

  std::vector<Json> lines;
  Json meta = meta_line("attack", f, model, count);
  meta["scorer"] = scorer;
  meta["scorer_model"] = s.scorer_model;
  meta["topk"] = k;
  meta["mu_mode"] = f.mu_mode;
  if (budget) meta["budget"] = *budget;
  lines.push_back(std::move(meta));

  size_t inc_found = 0, dec_found = 0, violations = 0;
  for (size_t i = 0; i < count; ++i) {
    const Row& row = rows[i];
    const bool inc_ok = !row.inc.found || row.inc.radius > row.cert.r_inc;
    const bool dec_ok = !row.dec.found || row.dec.radius > row.cert.r_dec;
    inc_found += row.inc.found;
    dec_found += row.dec.found;
    violations += !inc_ok + !dec_ok;
    Json j;
    j["type"] = "attack";
    j["id"] = row.cert.id;
    j["phi"] = row.cert.phi;
    j["r_inc"] = row.cert.r_inc;
    j["r_dec"] = row.cert.r_dec;
    j["inc_found"] = row.inc.found;
    j["inc_radius"] = row.inc.radius;
    j["dec_found"] = row.dec.found;
    j["dec_radius"] = row.dec.radius;
    j["sound"] = inc_ok && dec_ok;
    lines.push_back(std::move(j));
  }
  Json summary;
  summary["type"] = "summary";
  summary["examples"] = count;
  summary["inc_witnesses"] = inc_found;
  summary["dec_witnesses"] = dec_found;
  summary["violations"] = violations;
  summary["verdict"] = violations == 0 ? "PASS" : "FAIL";
  lines.push_back(std::move(summary));
  emit(lines, f.out_path, out);
  if (violations != 0) {
    err << "attack: " << violations
        << " witness(es) found inside a certified radius\n";
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_selfcheck(const SelfcheckOptions& opt, const CommonFlags& f,
                  std::ostream& out, std::ostream& err) {
  const auto reports = run_selfcheck(opt);
  std::vector<Json> lines;
  bool ok = true;
  for (const auto& r : reports) {
    Json j;
    j["type"] = "suite";
    j["name"] = r.name;
    j["trials"] = r.trials;
    j["checks"] = r.checks;
    j["failures"] = r.failures;
    j["passed"] = r.passed();
    if (r.failing_seed) {
      j["failing_seed"] = *r.failing_seed;
      j["detail"] = r.detail;
      err << "selfcheck: " << r.name << " failed (seed " << *r.failing_seed
          << "): " << r.detail << "\n";
    }
    ok = ok && r.passed();
    lines.push_back(std::move(j));
  }
  Json summary;
  summary["type"] = "summary";
  summary["suites"] = reports.size();
  summary["verdict"] = ok ? "PASS" : "FAIL";
  lines.push_back(std::move(summary));
  emit(lines, f.out_path, out);
  return ok ? kExitOk : kExitVerification;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kParameter:
    case ErrorKind::kPrecondition:
    case ErrorKind::kResource:
    case ErrorKind::kCapability:
    case ErrorKind::kArity:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Certified stable feature attributions by multiplicative "
               "smoothing"};
  app.name("muscert");
  app.require_subcommand(1);

  CommonFlags f;
  f.workers = default_workers();
  ScorerFlags s;

  auto* synth = app.add_subcommand("synth", "Write a Gaussian blobs CSV");
  size_t per_class = 100, synth_d = 16, synth_m = 3;
  double separation = 4.0;
  std::optional<size_t> synth_count;
  synth->add_option("--per-class", per_class)->capture_default_str();
  synth->add_option("--count", synth_count,
                    "Total examples, split evenly (overrides --per-class)");
  synth->add_option("--d", synth_d)->capture_default_str();
  synth->add_option("--m", synth_m)->capture_default_str();
  synth->add_option("--separation", separation)->capture_default_str();
  synth->add_option("--seed", f.seed)->capture_default_str();
  synth->add_option("--out", f.out_path, "Output CSV (default: stdout)");

  auto* train = app.add_subcommand("train", "Fit a softmax regression");
  std::string train_data;
  size_t epochs = 2000;
  double rate = 1.0;
  train->add_option("--data", train_data, "Labeled CSV")->required();
  train->add_option("--epochs", epochs)->capture_default_str();
  train->add_option("--learning-rate", rate)->capture_default_str();
  train->add_option("--seed", f.seed)->capture_default_str();
  train->add_option("--out", f.out_path, "Model JSON")->required();

  std::string curve_csv;
  auto* certify = app.add_subcommand("certify", "Certify top-k attributions");
  add_common_flags(certify, f);
  add_mu_flag(certify, f);
  add_scorer_flags(certify, s, false);
  certify->add_option("--topk", s.topk, "Attribution size (default ceil(n/4))");
  certify->add_option("--curve-csv", curve_csv, "Also write the curves as CSV");

  auto* acc = app.add_subcommand("accuracy-curve",
                                 "Certified accuracy against radius");
  add_common_flags(acc, f);
  acc->add_option("--curve-csv", curve_csv, "Also write the curve as CSV");

  auto* explain = app.add_subcommand("explain", "Greedy stable attributions");
  add_common_flags(explain, f);
  add_mu_flag(explain, f);
  add_scorer_flags(explain, s, true);
  size_t r_inc = 1, r_dec = 1;
  bool binary_search = false;
  explain->add_option("--rinc", r_inc, "Incremental radius target")
      ->capture_default_str();
  explain->add_option("--rdec", r_dec, "Decremental radius target")
      ->capture_default_str();
  explain->add_flag("--binary-search", binary_search,
                    "Binary search over prefix lengths");

  auto* attack = app.add_subcommand("attack",
                                    "Search for flips inside certificates");
  add_common_flags(attack, f);
  add_mu_flag(attack, f);
  add_scorer_flags(attack, s, false);
  attack->add_option("--topk", s.topk, "Attribution size (default ceil(n/4))");
  std::optional<size_t> budget;
  attack->add_option("--budget", budget,
                     "Greedy steps (default: all free features)");

  auto* selfcheck = app.add_subcommand("selfcheck", "Run the oracle suites");
  SelfcheckOptions sc;
  selfcheck->add_option("--max-n", sc.max_n)->capture_default_str();
  selfcheck->add_option("--trials", sc.trials)->capture_default_str();
  selfcheck->add_option("--seed", sc.seed)->capture_default_str();
  selfcheck->add_option("--q", sc.q, "Pin q (needs --lambda-num)");
  selfcheck->add_option("--lambda-num", sc.lambda_num, "Pin lambda numerator");
  add_io_flags(selfcheck, f);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth) {
      return cmd_synth(per_class, synth_count, synth_d, synth_m, separation,
                       f, out);
    }
    if (*train) return cmd_train(train_data, epochs, rate, f, out);
    if (*certify) return cmd_certify(f, s, curve_csv, out);
    if (*acc) return cmd_accuracy_curve(f, curve_csv, out);
    if (*explain) return cmd_explain(f, s, r_inc, r_dec, binary_search, out);
    if (*attack) return cmd_attack(f, s, budget, out, err);
    if (*selfcheck) return cmd_selfcheck(sc, f, out, err);
  } catch (const Error& e) {
    err << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace muscert::cli
