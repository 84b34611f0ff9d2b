#include "spsdgeo/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "spsdgeo/batch.hpp"
#include "spsdgeo/dataset.hpp"
#include "spsdgeo/embedding.hpp"
#include "spsdgeo/errors.hpp"
#include "spsdgeo/eval.hpp"
#include "spsdgeo/features.hpp"
#include "spsdgeo/matrix_set.hpp"
#include "spsdgeo/synth.hpp"
#include "spsdgeo/transport.hpp"

namespace spsdgeo {

namespace {

using nlohmann::json;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

json mean_diag_json(const MeanDiagnostics& d) {
  return json{{"iterations", d.iterations},
              {"final_residual", d.final_residual}};
}

json spsd_diag_json(const SpsdMeanDiagnostics& d) {
  return json{{"grassmann_mean", mean_diag_json(d.grassmann)},
              {"spd_mean", mean_diag_json(d.spd)}};
}

// Items as structure pairs at the requested rank, reusing factored storage
// when the stored rank already matches.
std::vector<SpsdPoint> factored_items(const MatrixSet& set, int rank,
                                      bool force_rank) {
  if (set.storage == MatrixSet::Storage::Factored && set.r == rank)
    return set.factored;
  return batch::factor(set.compose_all(), rank, force_rank);
}

struct MeanOptions {
  double eps = 1e-10;
  int max_iter = 200;
};

void add_mean_options(CLI::App* cmd, MeanOptions& opts) {
  cmd->add_option("--eps", opts.eps, "mean convergence threshold");
  cmd->add_option("--max-iter", opts.max_iter, "mean iteration cap");
}

int command_mean(const std::string& input, const std::string& output, int rank,
                 const MeanOptions& mean_opts, bool force_rank, json& report) {
  const MatrixSet set = read_dataset(input);
  const std::vector<SpsdPoint> items = factored_items(set, rank, force_rank);
  SpsdMeanDiagnostics diag;
  const MeanConfig cfg{mean_opts.eps, mean_opts.max_iter};
  const SpsdPoint mean = spsd_mean(items, cfg, &diag);
  write_dataset(MatrixSet::from_factored({mean}), output);
  report["convergence"] = spsd_diag_json(diag);
  report["metrics"]["count"] = items.size();
  return 0;
}

int command_adapt(const std::string& source_path,
                  const std::string& target_path, const std::string& output,
                  const std::string& transport_out, const DaConfig& cfg,
                  json& report) {
  const MatrixSet source = read_dataset(source_path);
  const MatrixSet target = read_dataset(target_path);
  const DaResult result =
      da_adapt(source.compose_all(), target.compose_all(), cfg);
  write_dataset(MatrixSet::from_dense(result.adapted, source.labels), output);
  if (!transport_out.empty()) write_transport(result.transport, transport_out);
  report["convergence"] = {
      {"source", spsd_diag_json(result.diagnostics.source_mean)},
      {"target", spsd_diag_json(result.diagnostics.target_mean)}};
  report["metrics"]["adapted_count"] = result.adapted.size();
  return 0;
}

int command_oos(const std::string& transport_path, const std::string& input,
                const std::string& output, bool force_rank, json& report) {
  const SpsdTransport transport = read_transport(transport_path);
  const MatrixSet set = read_dataset(input);
  const std::vector<Matrix> mats = set.compose_all();
  std::vector<Matrix> adapted(mats.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(mats.size()); ++i) {
    try {
      adapted[i] = da_oos(transport, mats[i], force_rank);
    } catch (...) {
#pragma omp critical(spsdgeo_oos_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  write_dataset(MatrixSet::from_dense(adapted, set.labels), output);
  report["metrics"]["count"] = adapted.size();
  return 0;
}

int command_embed(const std::vector<std::string>& inputs,
                  const std::string& output, int rank, int components,
                  const std::string& k_mode, bool whiten,
                  const MeanOptions& mean_opts, bool force_rank,
                  json& report) {
  std::vector<std::vector<SpsdPoint>> sets;
  std::vector<int> set_ids;
  std::vector<int> labels;
  bool all_labelled = true;
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    const MatrixSet set = read_dataset(inputs[s]);
    sets.push_back(factored_items(set, rank, force_rank));
    for (std::size_t i = 0; i < sets.back().size(); ++i)
      set_ids.push_back(static_cast<int>(s));
    if (set.labels)
      labels.insert(labels.end(), set.labels->begin(), set.labels->end());
    else
      all_labelled = false;
  }

  const MeanConfig cfg{mean_opts.eps, mean_opts.max_iter};
  const TangentBatch batch = embed_set(sets, std::nullopt, cfg);

  std::optional<double> fixed_k;
  if (k_mode != "auto") {
    try {
      fixed_k = std::stod(k_mode);
    } catch (const std::exception&) {
      throw ConfigError("embed: --k-mode must be 'auto' or a number");
    }
  }
  const VectorizeResult vecs = vectorize(batch, fixed_k, whiten);
  PcaModel model = pca_fit(vecs.vectors, components);
  model.k_used = vecs.k_used;
  const Matrix scores = pca_apply(model, vecs.vectors);

  write_feature_csv(output, set_ids,
                    all_labelled ? std::optional<std::vector<int>>(labels)
                                 : std::nullopt,
                    scores);
  report["metrics"]["k_used"] = vecs.k_used;
  report["metrics"]["rows"] = scores.rows();
  report["metrics"]["components"] = components;
  return 0;
}

int command_dist(const std::string& input, const std::string& output, int rank,
                 double k, bool pairwise, bool force_rank, json& report) {
  if (!pairwise) throw ConfigError("dist: only --pairwise output is supported");
  const MatrixSet set = read_dataset(input);
  const std::vector<SpsdPoint> items = factored_items(set, rank, force_rank);
  const Matrix lengths =
      batch::pairwise_curve_length(items, SpsdMetricConfig{k});
  write_matrix_csv(output, lengths, "d");
  report["metrics"]["count"] = items.size();
  return 0;
}

int command_features(const std::string& input, const std::string& output,
                     const std::string& grid_spec, const FeatureConfig& base_cfg,
                     json& report) {
  FeatureConfig cfg = base_cfg;
  if (!grid_spec.empty()) {
    const auto comma = grid_spec.find(',');
    if (comma == std::string::npos)
      throw ConfigError("features: --grid expects nx,ny");
    try {
      cfg.grid = std::make_pair(std::stoi(grid_spec.substr(0, comma)),
                                std::stoi(grid_spec.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("features: --grid expects nx,ny");
    }
  }
  const PixelTable table = read_pixel_csv(input);
  if (cfg.grid && table.pixels.rows() != static_cast<Eigen::Index>(
                                             cfg.grid->first) *
                                             cfg.grid->second)
    throw ShapeMismatch("features: grid size differs from pixel count");

  const FeatureResult result = extract_features(table.pixels, cfg);
  std::optional<std::vector<int>> labels;
  if (table.labels) {
    labels.emplace();
    for (int idx : result.pixel_indices)
      labels->push_back((*table.labels)[static_cast<std::size_t>(idx)]);
  }
  write_dataset(MatrixSet::from_factored(result.descriptors, labels), output);
  report["metrics"]["pixels"] = table.pixels.rows();
  report["metrics"]["descriptors"] = result.descriptors.size();
  report["metrics"]["skipped"] =
      static_cast<std::size_t>(table.pixels.rows()) -
      result.descriptors.size();
  return 0;
}

int command_synth(const SynthConfig& cfg, const std::string& out_dir,
                  json& report) {
  const SynthData data = synth_generate(cfg);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_dataset(data.source, dir / "source.json");
  write_dataset(data.target, dir / "target.json");

  json truth;
  truth["schema_version"] = 1;
  truth["kind"] = "synth_ground_truth";
  truth["config"] = {{"d", cfg.d},
                     {"r", cfg.r},
                     {"classes", cfg.classes},
                     {"per_class", cfg.per_class},
                     {"seed", cfg.seed},
                     {"subspace_rotation", cfg.subspace_rotation},
                     {"core_congruence", cfg.core_congruence},
                     {"noise_scale", cfg.noise_scale}};
  auto matrix_json = [](const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  truth["rotation"] = data.rotation ? matrix_json(*data.rotation) : json();
  truth["core_factor"] =
      data.core_factor ? matrix_json(*data.core_factor) : json();
  std::ofstream out(dir / "ground_truth.json", std::ios::trunc);
  if (!out) throw IoError("cannot write ground_truth.json");
  out << truth.dump(2) << "\n";

  report["metrics"]["per_domain"] = data.source.size();
  return 0;
}

int command_eval(const std::string& train_path, const std::string& test_path,
                 const std::string& metrics, std::optional<int> train_set,
                 std::optional<int> test_set, json& report) {
  auto load = [](const std::string& path, std::optional<int> set_filter) {
    FeatureTable table = read_feature_csv(path);
    if (set_filter) {
      if (table.set_ids.empty())
        throw ConfigError("eval: CSV has no set column to filter on");
      FeatureTable filtered;
      std::vector<Eigen::Index> keep;
      for (std::size_t i = 0; i < table.set_ids.size(); ++i)
        if (table.set_ids[i] == *set_filter)
          keep.push_back(static_cast<Eigen::Index>(i));
      filtered.features.resize(static_cast<Eigen::Index>(keep.size()),
                               table.features.cols());
      if (table.labels) filtered.labels.emplace();
      for (std::size_t i = 0; i < keep.size(); ++i) {
        filtered.features.row(static_cast<Eigen::Index>(i)) =
            table.features.row(keep[i]);
        filtered.set_ids.push_back(*set_filter);
        if (table.labels)
          filtered.labels->push_back(
              (*table.labels)[static_cast<std::size_t>(keep[i])]);
      }
      return filtered;
    }
    return table;
  };

  const FeatureTable train = load(train_path, train_set);
  const FeatureTable test = load(test_path, test_set);
  if (!train.labels) throw ConfigError("eval: training CSV has no labels");
  if (!test.labels) throw ConfigError("eval: test CSV has no labels");

  const std::vector<int> predicted =
      nearest_centroid(train.features, *train.labels, test.features);
  const ConfusionSummary summary = cohen_kappa(*test.labels, predicted);

  for (const std::string& metric : {std::string("kappa"), std::string("accuracy")}) {
    if (metrics.find(metric) == std::string::npos) continue;
    if (metric == "kappa") report["metrics"]["kappa"] = summary.kappa;
    if (metric == "accuracy") report["metrics"]["accuracy"] = summary.accuracy;
  }
  report["metrics"]["p_o"] = summary.accuracy;
  report["metrics"]["p_e"] = summary.chance;
  report["metrics"]["n_train"] = train.features.rows();
  report["metrics"]["n_test"] = test.features.rows();
  if (summary.chance_degenerate) report["metrics"]["chance_degenerate"] = true;
  return 0;
}

bool is_validation_error(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) ||
         dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const ShapeMismatch*>(&e) ||
         dynamic_cast<const InvariantViolation*>(&e) ||
         dynamic_cast<const IoError*>(&e) ||
         dynamic_cast<const LengthMismatch*>(&e) ||
         dynamic_cast<const DimensionMismatch*>(&e) ||
         dynamic_cast<const IndexOutOfRange*>(&e) ||
         dynamic_cast<const EmptySet*>(&e) ||
         dynamic_cast<const EmptyClass*>(&e) ||
         dynamic_cast<const TooFewPoints*>(&e) ||
         dynamic_cast<const InvalidComponentCount*>(&e);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Riemannian geometry of fixed-rank SPSD matrices"};
  app.require_subcommand(1);

  // mean
  std::string mean_input, mean_output;
  int mean_rank = 1;
  MeanOptions mean_opts;
  bool mean_force = false;
  CLI::App* mean_cmd = app.add_subcommand("mean", "Riemannian mean of a dataset");
  mean_cmd->add_option("--input", mean_input)->required();
  mean_cmd->add_option("--rank", mean_rank)->required();
  mean_cmd->add_option("--output", mean_output)->required();
  add_mean_options(mean_cmd, mean_opts);
  mean_cmd->add_flag("--force-rank", mean_force, "truncate to rank instead of rejecting");

  // adapt
  std::string adapt_source, adapt_target, adapt_output, adapt_transport_out;
  DaConfig adapt_cfg;
  MeanOptions adapt_mean;
  int adapt_subsample = 0;
  CLI::App* adapt_cmd =
      app.add_subcommand("adapt", "transport a source set onto a target set");
  adapt_cmd->add_option("--source", adapt_source)->required();
  adapt_cmd->add_option("--target", adapt_target)->required();
  adapt_cmd->add_option("--rank", adapt_cfg.rank)->required();
  adapt_cmd->add_option("--k", adapt_cfg.metric.k);
  add_mean_options(adapt_cmd, adapt_mean);
  adapt_cmd->add_option("--mean-subsample", adapt_subsample);
  adapt_cmd->add_option("--seed", adapt_cfg.seed);
  adapt_cmd->add_flag("--force-rank", adapt_cfg.force_rank);
  adapt_cmd->add_option("--output", adapt_output)->required();
  adapt_cmd->add_option("--transport-out", adapt_transport_out);

  // oos
  std::string oos_transport, oos_input, oos_output;
  bool oos_force = false;
  CLI::App* oos_cmd =
      app.add_subcommand("oos", "apply a stored transport to new data");
  oos_cmd->add_option("--transport", oos_transport)->required();
  oos_cmd->add_option("--input", oos_input)->required();
  oos_cmd->add_option("--output", oos_output)->required();
  oos_cmd->add_flag("--force-rank", oos_force);

  // embed
  std::vector<std::string> embed_inputs;
  std::string embed_output, embed_k_mode = "auto";
  int embed_rank = 1, embed_components = 1;
  bool embed_whiten = false, embed_force = false;
  MeanOptions embed_mean;
  CLI::App* embed_cmd =
      app.add_subcommand("embed", "tangent embedding reduced with PCA");
  embed_cmd->add_option("--input", embed_inputs)->required()->expected(-1);
  embed_cmd->add_option("--rank", embed_rank)->required();
  embed_cmd->add_option("--components", embed_components)->required();
  embed_cmd->add_option("--k-mode", embed_k_mode, "auto or a fixed value");
  embed_cmd->add_flag("--whiten", embed_whiten);
  add_mean_options(embed_cmd, embed_mean);
  embed_cmd->add_flag("--force-rank", embed_force);
  embed_cmd->add_option("--output", embed_output)->required();

  // dist
  std::string dist_input, dist_output;
  int dist_rank = 1;
  double dist_k = 1.0;
  bool dist_pairwise = false, dist_force = false;
  CLI::App* dist_cmd =
      app.add_subcommand("dist", "pairwise approximate-geodesic lengths");
  dist_cmd->add_option("--input", dist_input)->required();
  dist_cmd->add_option("--rank", dist_rank)->required();
  dist_cmd->add_option("--k", dist_k);
  dist_cmd->add_flag("--pairwise", dist_pairwise);
  dist_cmd->add_flag("--force-rank", dist_force);
  dist_cmd->add_option("--output", dist_output)->required();

  // features
  std::string feat_input, feat_output, feat_grid;
  FeatureConfig feat_cfg;
  feat_cfg.min_valid = 0;  // resolved after parsing (default rank + 1)
  CLI::App* feat_cmd =
      app.add_subcommand("features", "local covariance descriptors from pixels");
  feat_cmd->add_option("--input", feat_input)->required();
  feat_cmd->add_option("--grid", feat_grid, "nx,ny");
  feat_cmd->add_option("--window", feat_cfg.window)->required();
  feat_cmd->add_option("--neighbors", feat_cfg.neighbors)->required();
  feat_cmd->add_option("--rank", feat_cfg.rank)->required();
  feat_cmd->add_option("--min-valid", feat_cfg.min_valid);
  feat_cmd->add_option("--output", feat_output)->required();

  // synth
  SynthConfig synth_cfg;
  std::string synth_distort, synth_out_dir;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "seeded two-domain benchmark generator");
  synth_cmd->add_option("--d", synth_cfg.d)->required();
  synth_cmd->add_option("--r", synth_cfg.r)->required();
  synth_cmd->add_option("--classes", synth_cfg.classes)->required();
  synth_cmd->add_option("--per-class", synth_cfg.per_class)->required();
  synth_cmd->add_option("--seed", synth_cfg.seed)->required();
  synth_cmd->add_option("--distort", synth_distort,
                        "comma list of subspace_rotation,core_congruence");
  synth_cmd->add_option("--noise", synth_cfg.noise_scale);
  synth_cmd->add_option("--out-dir", synth_out_dir)->required();

  // eval
  std::string eval_train, eval_test, eval_metric = "kappa,accuracy";
  int eval_train_set = -1, eval_test_set = -1;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "nearest-centroid classification metrics");
  eval_cmd->add_option("--train", eval_train)->required();
  eval_cmd->add_option("--test", eval_test)->required();
  eval_cmd->add_option("--metric", eval_metric);
  eval_cmd->add_option("--train-set", eval_train_set,
                       "filter the train CSV by its set column");
  eval_cmd->add_option("--test-set", eval_test_set,
                       "filter the test CSV by its set column");

  std::vector<const char*> argv;
  argv.push_back("spsdgeo");
  for (const std::string& a : args) argv.push_back(a.c_str());

  json report;
  Timer timer;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help() << std::flush;
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  int code = 0;
  try {
    if (mean_cmd->parsed()) {
      report["command"] = "mean";
      report["config"] = {{"input", mean_input},   {"rank", mean_rank},
                          {"eps", mean_opts.eps},  {"max_iter", mean_opts.max_iter},
                          {"output", mean_output}, {"force_rank", mean_force}};
      code = command_mean(mean_input, mean_output, mean_rank, mean_opts,
                          mean_force, report);
    } else if (adapt_cmd->parsed()) {
      adapt_cfg.mean = MeanConfig{adapt_mean.eps, adapt_mean.max_iter};
      if (adapt_subsample > 0) adapt_cfg.mean_subsample = adapt_subsample;
      report["command"] = "adapt";
      report["config"] = {{"source", adapt_source},
                          {"target", adapt_target},
                          {"rank", adapt_cfg.rank},
                          {"k", adapt_cfg.metric.k},
                          {"eps", adapt_cfg.mean.eps},
                          {"max_iter", adapt_cfg.mean.max_iter},
                          {"mean_subsample", adapt_subsample},
                          {"seed", adapt_cfg.seed},
                          {"force_rank", adapt_cfg.force_rank},
                          {"output", adapt_output}};
      code = command_adapt(adapt_source, adapt_target, adapt_output,
                           adapt_transport_out, adapt_cfg, report);
    } else if (oos_cmd->parsed()) {
      report["command"] = "oos";
      report["config"] = {{"transport", oos_transport},
                          {"input", oos_input},
                          {"output", oos_output},
                          {"force_rank", oos_force}};
      code = command_oos(oos_transport, oos_input, oos_output, oos_force,
                         report);
    } else if (embed_cmd->parsed()) {
      report["command"] = "embed";
      report["config"] = {{"inputs", embed_inputs},
                          {"rank", embed_rank},
                          {"components", embed_components},
                          {"k_mode", embed_k_mode},
                          {"whiten", embed_whiten},
                          {"eps", embed_mean.eps},
                          {"max_iter", embed_mean.max_iter},
                          {"force_rank", embed_force},
                          {"output", embed_output}};
      code = command_embed(embed_inputs, embed_output, embed_rank,
                           embed_components, embed_k_mode, embed_whiten,
                           embed_mean, embed_force, report);
    } else if (dist_cmd->parsed()) {
      report["command"] = "dist";
      report["config"] = {{"input", dist_input},
                          {"rank", dist_rank},
                          {"k", dist_k},
                          {"pairwise", dist_pairwise},
                          {"force_rank", dist_force},
                          {"output", dist_output}};
      code = command_dist(dist_input, dist_output, dist_rank, dist_k,
                          dist_pairwise, dist_force, report);
    } else if (feat_cmd->parsed()) {
      if (feat_cfg.min_valid == 0) feat_cfg.min_valid = feat_cfg.rank + 1;
      report["command"] = "features";
      report["config"] = {{"input", feat_input},
                          {"grid", feat_grid},
                          {"window", feat_cfg.window},
                          {"neighbors", feat_cfg.neighbors},
                          {"rank", feat_cfg.rank},
                          {"min_valid", feat_cfg.min_valid},
                          {"output", feat_output}};
      code = command_features(feat_input, feat_output, feat_grid, feat_cfg,
                              report);
    } else if (synth_cmd->parsed()) {
      synth_cfg.subspace_rotation =
          synth_distort.find("subspace_rotation") != std::string::npos;
      synth_cfg.core_congruence =
          synth_distort.find("core_congruence") != std::string::npos;
      report["command"] = "synth";
      report["config"] = {{"d", synth_cfg.d},
                          {"r", synth_cfg.r},
                          {"classes", synth_cfg.classes},
                          {"per_class", synth_cfg.per_class},
                          {"seed", synth_cfg.seed},
                          {"distort", synth_distort},
                          {"noise", synth_cfg.noise_scale},
                          {"out_dir", synth_out_dir}};
      code = command_synth(synth_cfg, synth_out_dir, report);
    } else if (eval_cmd->parsed()) {
      report["command"] = "eval";
      report["config"] = {{"train", eval_train},
                          {"test", eval_test},
                          {"metric", eval_metric}};
      code = command_eval(eval_train, eval_test, eval_metric,
                          eval_train_set >= 0 ? std::optional<int>(eval_train_set)
                                              : std::nullopt,
                          eval_test_set >= 0 ? std::optional<int>(eval_test_set)
                                             : std::nullopt,
                          report);
    }
  } catch (const NoConvergence& e) {
    report["error"] = {{"type", "NoConvergence"},
                       {"message", e.what()},
                       {"iterations", e.iterations},
                       {"final_residual", e.final_residual}};
    code = 3;
  } catch (const RankMismatch& e) {
    report["error"] = {{"type", "RankMismatch"},
                       {"message", e.what()},
                       {"actual_rank", e.actual_rank}};
    code = 3;
  } catch (const Error& e) {
    report["error"] = {{"type", is_validation_error(e) ? "validation" : "numerical"},
                       {"message", e.what()}};
    code = is_validation_error(e) ? 2 : 3;
  }

  report["timings_ms"] = {{"total", timer.ms()}};
  out << report.dump(2) << "\n";
  return code;
}

}  // namespace spsdgeo
