#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "belief/baselines.hpp"
#include "belief/benchdata.hpp"
#include "belief/error.hpp"
#include "belief/evaluation.hpp"
#include "belief/io.hpp"
#include "belief/report.hpp"
#include "belief/selection.hpp"

namespace belief::cli {

namespace {

struct DataArgs {
  std::string input;
  std::string dataset;
  std::string format = "csv";
  std::optional<Index> label_column;
  std::vector<Index> nominal;
  std::optional<Index> n_features;
};

struct SelectArgs {
  SelectorConfig config;
  std::optional<Index> n_select;
  std::string aggregation = "pooled";
};

struct OutputArgs {
  std::string output;
  bool text = false;
};

/// Files are staged in memory and written only once the command succeeded.
class Outputs {
 public:
  explicit Outputs(std::ostream& out) : out_(out) {}

  void add(const std::string& path, std::string content) {
    files_.emplace_back(path, std::move(content));
  }

  void commit() {
    for (const auto& [path, content] : files_) {
      if (path.empty() || path == "-") {
        out_ << content;
        continue;
      }
      const std::string staging = path + ".partial";
      {
        std::ofstream f(staging, std::ios::binary);
        f << content;
        if (!f) {
          std::filesystem::remove(staging);
          throw DataError("cannot write '" + path + "'");
        }
      }
      std::filesystem::rename(staging, path);
    }
  }

 private:
  std::ostream& out_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

void add_data_options(CLI::App* cmd, DataArgs& a, bool allow_generated) {
  auto* input = cmd->add_option("--input,-i", a.input, "Dataset file");
  if (allow_generated) {
    auto* gen = cmd->add_option("--dataset", a.dataset,
                                "Generate a named benchmark instead of reading a file");
    input->excludes(gen);
  }
  cmd->add_option("--format", a.format, "Input format")
      ->check(CLI::IsMember({"libsvm", "csv"}));
  cmd->add_option("--label-column", a.label_column, "CSV class column (default: last)");
  cmd->add_option("--nominal", a.nominal, "Nominal CSV feature indices")->delimiter(',');
  cmd->add_option("--n-features", a.n_features, "Force the libSVM feature count");
}

void add_selector_options(CLI::App* cmd, SelectArgs& s, bool redundancy) {
  auto& c = s.config;
  cmd->add_option("--k", c.k, "Neighbors per class")->capture_default_str();
  cmd->add_option("--sample-rate", c.sample_rate, "Sampling rate in (0, 1]")
      ->capture_default_str();
  cmd->add_option("--batches", c.batches, "Number of sample batches")->capture_default_str();
  cmd->add_option("--nfeat", s.n_select, "Number of features to select");
  cmd->add_option("--partitions", c.partitions, "Data partitions")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_flag("--deterministic", c.deterministic,
                "Exact accumulation, bit-identical for any partition count");
  cmd->add_option("--threads", c.threads, "Worker threads (0: OpenMP default)");
  cmd->add_option("--aggregation", s.aggregation, "Batch aggregation")
      ->check(CLI::IsMember({"pooled", "per-batch"}));
  cmd->add_option("--threshold", c.threshold, "Mark features with normalized weight above");
  if (redundancy) {
    cmd->add_option("--theta", c.theta, "Redundancy weight")->capture_default_str();
    cmd->add_option("--eta", c.eta, "Tracking multiplier")->capture_default_str();
    cmd->add_option("--kappa", c.kappa, "Collision threshold")->capture_default_str();
  }
}

void add_output_options(CLI::App* cmd, OutputArgs& o) {
  cmd->add_option("--output,-o", o.output, "Output file (default: stdout)");
  cmd->add_flag("--text", o.text, "Plain 'feature score' lines instead of JSON");
}

struct Loaded {
  std::shared_ptr<const Dataset> data;
  std::optional<GroundTruth> truth;
};

Loaded load(const DataArgs& a, std::uint64_t seed) {
  if (!a.dataset.empty()) {
    Benchmark b = generate(a.dataset, seed);
    return {std::make_shared<const Dataset>(std::move(b.data)), std::move(b.truth)};
  }
  if (a.input.empty()) throw std::invalid_argument("--input or --dataset is required");
  LoadOptions opts;
  opts.format = data_format_from_string(a.format);
  opts.libsvm.n_features = a.n_features;
  opts.csv.label_column = a.label_column;
  opts.csv.nominal = a.nominal;
  return {std::make_shared<const Dataset>(load_dataset(a.input, opts)), std::nullopt};
}

GroundTruth read_truth(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open '" + path + "'");
  try {
    return GroundTruth::from_json(nlohmann::json::parse(f));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad ground truth '" + path + "': " + e.what());
  }
}

std::vector<Index> read_selection(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open '" + path + "'");
  try {
    const auto doc = nlohmann::json::parse(f);
    std::vector<Index> out;
    for (const auto& s : doc.at("selected")) out.push_back(s.at("feature").get<Index>());
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad selection '" + path + "': " + e.what());
  }
}

void finish_config(SelectArgs& s, const Dataset& data, Index default_select) {
  s.config.n_select = s.n_select.value_or(std::min(default_select, data.n_features()));
  s.config.aggregation = aggregation_from_string(s.aggregation);
}

void print_warnings(const RankingResult& r, std::ostream& err) {
  for (const auto& w : r.metadata.warnings) err << "warning: " << w << '\n';
}

std::string render(const RankingResult& r, const OutputArgs& o) {
  return o.text ? r.to_text() : dump(r.to_json());
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"BELIEF feature weighting and selection"};
  app.name("belief");
  app.require_subcommand(1);

  // gen
  std::string gen_name, gen_output, gen_format = "csv";
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "Write a synthetic benchmark and its ground truth");
  gen->add_option("name", gen_name, "Benchmark name")
      ->required()
      ->check(CLI::IsMember(benchmark_names()));
  gen->add_option("--output,-o", gen_output, "Data file; truth goes to <output>.truth.json")
      ->required();
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--format", gen_format, "Output format")
      ->check(CLI::IsMember({"libsvm", "csv"}));

  // rank
  DataArgs rank_data;
  SelectArgs rank_sel;
  OutputArgs rank_out;
  auto* rank = app.add_subcommand("rank", "BELIEF weights only (no redundancy)");
  add_data_options(rank, rank_data, true);
  add_selector_options(rank, rank_sel, false);
  add_output_options(rank, rank_out);

  // select
  DataArgs sel_data;
  SelectArgs sel_sel;
  OutputArgs sel_out;
  std::string dump_redundancy;
  auto* select = app.add_subcommand("select", "BELIEF with mCR redundancy and SFS");
  add_data_options(select, sel_data, true);
  add_selector_options(select, sel_sel, true);
  add_output_options(select, sel_out);
  select->add_option("--dump-redundancy", dump_redundancy, "Write the redundancy table JSON");

  // mrmr
  DataArgs mrmr_data;
  OutputArgs mrmr_out;
  std::optional<Index> mrmr_n;
  int mrmr_bins = kDefaultBins;
  std::uint64_t mrmr_seed = 1;
  auto* mrmr = app.add_subcommand("mrmr", "Mutual-information mRMR baseline");
  add_data_options(mrmr, mrmr_data, true);
  add_output_options(mrmr, mrmr_out);
  mrmr->add_option("--nfeat", mrmr_n, "Number of features to select");
  mrmr->add_option("--bins", mrmr_bins, "Equal-width bins for numeric features")
      ->capture_default_str();
  mrmr->add_option("--seed", mrmr_seed, "Seed for generated datasets");

  // eval
  DataArgs eval_data;
  SelectArgs eval_sel;
  std::string eval_output, truth_path, selection_path, test_path, method_name = "belief+mcr";
  std::vector<Index> eval_features;
  double zeta = kDefaultZeta;
  int folds = 0, bins = kDefaultBins;
  Index knn_k = 1;
  auto* eval = app.add_subcommand("eval", "Success score and classifier metrics");
  add_data_options(eval, eval_data, true);
  add_selector_options(eval, eval_sel, true);
  eval->add_option("--output,-o", eval_output, "Output file (default: stdout)");
  eval->add_option("--truth", truth_path, "Ground truth JSON");
  eval->add_option("--selection", selection_path, "Selection JSON from select/rank/mrmr");
  eval->add_option("--features", eval_features, "Selected feature indices")->delimiter(',');
  eval->add_option("--zeta", zeta, "Redundancy penalty of the success score")
      ->capture_default_str();
  eval->add_option("--folds", folds, "Stratified cross-validation folds");
  eval->add_option("--method", method_name, "Selector used inside cross-validation")
      ->check(CLI::IsMember({"belief", "belief+mcr", "mrmr", "all"}));
  eval->add_option("--bins", bins, "Bins for mrmr")->capture_default_str();
  eval->add_option("--knn-k", knn_k, "Neighbors of the k-NN classifier")->capture_default_str();
  eval->add_option("--test", test_path, "Hold-out file scored with the given features");

  // bench
  DataArgs bench_data;
  SelectArgs bench_sel;
  std::string bench_output, bench_truth;
  auto* bench = app.add_subcommand("bench", "Run selection and report bytes and timings");
  add_data_options(bench, bench_data, true);
  add_selector_options(bench, bench_sel, true);
  bench->add_option("--output,-o", bench_output, "Output file (default: stdout)");
  bench->add_option("--truth", bench_truth, "Ground truth JSON for a success score");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  Outputs outputs(out);

  if (*gen) {
    Benchmark b = generate(gen_name, gen_seed);
    std::ostringstream data;
    if (data_format_from_string(gen_format) == DataFormat::libsvm) {
      write_libsvm(data, b.data);
    } else {
      write_csv(data, b.data);
    }
    outputs.add(gen_output, data.str());
    outputs.add(gen_output + ".truth.json", dump(b.truth.to_json()));
  } else if (*rank) {
    const Loaded in = load(rank_data, rank_sel.config.seed);
    finish_config(rank_sel, *in.data, in.data->n_features());
    rank_sel.config.theta = 0.0;
    rank_sel.config.redundancy = false;
    const RankingResult r = run_belief(rank_sel.config, in.data);
    print_warnings(r, err);
    outputs.add(rank_out.output, render(r, rank_out));
  } else if (*select) {
    const Loaded in = load(sel_data, sel_sel.config.seed);
    finish_config(sel_sel, *in.data, 10);
    const RankingResult r = run_belief(sel_sel.config, in.data);
    print_warnings(r, err);
    outputs.add(sel_out.output, render(r, sel_out));
    if (!dump_redundancy.empty()) {
      outputs.add(dump_redundancy,
                  dump(r.redundancy ? r.redundancy->to_json() : nlohmann::json::object()));
    }
  } else if (*mrmr) {
    const Loaded in = load(mrmr_data, mrmr_seed);
    const Index n = mrmr_n.value_or(std::min<Index>(10, in.data->n_features()));
    outputs.add(mrmr_out.output, render(mrmr_select(*in.data, n, mrmr_bins), mrmr_out));
  } else if (*eval) {
    if (truth_path.empty() && folds == 0 && test_path.empty()) {
      throw std::invalid_argument("eval needs --truth, --folds or --test");
    }
    nlohmann::json doc;
    std::vector<Index> features = eval_features;
    if (!selection_path.empty()) features = read_selection(selection_path);
    if (!truth_path.empty()) {
      if (features.empty()) throw std::invalid_argument("--truth needs --features or --selection");
      const GroundTruth truth = read_truth(truth_path);
      const auto c = composition(features, truth);
      doc["features"] = features;
      doc["success"] = success_score(features, truth, zeta);
      doc["composition"] = {{"relevant", c.relevant},
                            {"redundant", c.redundant},
                            {"irrelevant", c.irrelevant}};
    }
    if (folds > 0 || !test_path.empty()) {
      const Loaded in = load(eval_data, eval_sel.config.seed);
      const Dataset data = zscore_normalize(*in.data);
      if (folds > 0) {
        PipelineConfig pipe;
        pipe.method = method_from_string(method_name);
        finish_config(eval_sel, data, 10);
        pipe.selector = eval_sel.config;
        pipe.bins = bins;
        pipe.knn_k = knn_k;
        doc["cross_validation"] =
            cross_validate(data, folds, pipe, eval_sel.config.seed).to_json();
      }
      if (!test_path.empty()) {
        if (features.empty()) throw std::invalid_argument("--test needs --features or --selection");
        DataArgs test_args = eval_data;
        test_args.input = test_path;
        test_args.dataset.clear();
        const Loaded test = load(test_args, eval_sel.config.seed);
        const Dataset test_data = zscore_normalize(*test.data);
        const auto m = evaluate(knn_classify(data, test_data, knn_k, features),
                                test_data.labels(), data.n_classes());
        doc["holdout"] = {{"accuracy", m.accuracy}, {"f1", m.f1}};
      }
    }
    outputs.add(eval_output, dump(doc));
  } else if (*bench) {
    const Loaded in = load(bench_data, bench_sel.config.seed);
    finish_config(bench_sel, *in.data, 10);
    const RankingResult r = run_belief(bench_sel.config, in.data);
    print_warnings(r, err);
    RunReport report = make_report(bench_sel.config, *in.data, r);
    std::optional<GroundTruth> truth = in.truth;
    if (!bench_truth.empty()) truth = read_truth(bench_truth);
    if (truth) report.scores["success"] = success_score(report.selected, *truth);
    outputs.add(bench_output, dump(report.to_json()));
  }
  outputs.commit();
  return ok;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("belief");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return data_error;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const IntegrityError& e) {
    err << "internal error: " << e.what() << '\n';
    return internal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return internal;
  }
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace belief::cli
