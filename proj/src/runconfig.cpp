#include "noisebench/runconfig.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>

#include "noisebench/error.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void expect_keys(const json& obj, const std::string& section,
                 const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key))
      throw config_error("unknown key '" + key + "' in " + section);
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("bad value for '") + key + "'");
  }
}

FeatureMode feature_mode_from_string(const std::string& name) {
  if (name == "flatten") return FeatureMode::Flatten;
  if (name == "stats") return FeatureMode::Stats;
  throw config_error("features.mode must be 'flatten' or 'stats', got '" + name + "'");
}

ModelSpec model_spec_from_json(const json& j, std::size_t position) {
  const std::string section = "models[" + std::to_string(position) + "]";
  expect_keys(j, section,
              {"family", "id", "use_pca", "seed", "hidden_layers", "epochs", "batch_size",
               "learning_rate", "n_trees", "features_per_split", "bootstrap", "max_depth",
               "min_samples_split", "k", "variance_floor_scale"});
  if (!j.contains("family")) throw config_error(section + ": missing 'family'");

  ModelSpec spec;
  spec.family = model_family_from_string(j.at("family").get<std::string>());
  spec.id = get_or<std::string>(j, "id", "");
  if (spec.id.empty()) spec.id = to_string(spec.family);
  spec.use_pca = get_or<bool>(j, "use_pca", spec.family == ModelFamily::Tree ||
                                                spec.family == ModelFamily::Knn);
  spec.seed = get_or<std::uint64_t>(j, "seed", 0);

  if (j.contains("hidden_layers"))
    spec.mlp.hidden_layers = j.at("hidden_layers").get<std::vector<std::size_t>>();
  spec.mlp.epochs = get_or<int>(j, "epochs", spec.mlp.epochs);
  spec.mlp.batch_size = get_or<int>(j, "batch_size", spec.mlp.batch_size);
  spec.mlp.learning_rate = get_or<double>(j, "learning_rate", spec.mlp.learning_rate);
  spec.forest.n_trees = get_or<int>(j, "n_trees", spec.forest.n_trees);
  spec.forest.features_per_split =
      get_or<int>(j, "features_per_split", spec.forest.features_per_split);
  spec.forest.bootstrap = get_or<bool>(j, "bootstrap", spec.forest.bootstrap);
  spec.tree.max_depth = get_or<int>(j, "max_depth", spec.tree.max_depth);
  spec.tree.min_samples_split = get_or<int>(j, "min_samples_split", spec.tree.min_samples_split);
  spec.forest.tree = spec.tree;
  spec.knn.k = get_or<int>(j, "k", spec.knn.k);
  spec.gnb.variance_floor_scale =
      get_or<double>(j, "variance_floor_scale", spec.gnb.variance_floor_scale);
  return spec;
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw config_error("config root must be a JSON object");
  expect_keys(j, "config root",
              {"seed", "data", "shape", "features", "pca", "models", "eval", "noise",
               "output_dir"});

  RunConfig cfg;
  cfg.seed_given = j.contains("seed");
  cfg.master_seed = get_or<std::uint64_t>(j, "seed", cfg.master_seed);
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);

  if (j.contains("data")) {
    const json& data = j.at("data");
    expect_keys(data, "data", {"root", "synth", "synth_seed"});
    if (data.contains("root") && data.contains("synth"))
      throw config_error("data: 'root' and 'synth' are mutually exclusive");
    cfg.synth_seed_given = data.contains("synth_seed");
    cfg.synth_seed = get_or<std::uint64_t>(data, "synth_seed", 0);
    if (data.contains("root")) {
      cfg.dataset_root = data.at("root").get<std::string>();
    } else if (data.contains("synth")) {
      const json& s = data.at("synth");
      expect_keys(s, "data.synth",
                  {"n_classes", "n_subjects", "segments_per_cell", "n_channels", "n_samples",
                   "sample_rate_hz"});
      SynthSpec spec;
      spec.n_classes = get_or<int>(s, "n_classes", spec.n_classes);
      spec.n_subjects = get_or<int>(s, "n_subjects", spec.n_subjects);
      spec.segments_per_cell = get_or<int>(s, "segments_per_cell", spec.segments_per_cell);
      spec.n_channels = get_or<int>(s, "n_channels", spec.n_channels);
      spec.n_samples = get_or<int>(s, "n_samples", spec.n_samples);
      spec.sample_rate_hz = get_or<double>(s, "sample_rate_hz", spec.sample_rate_hz);
      cfg.synth = spec;
    }
  }
  if (!cfg.dataset_root && !cfg.synth) {
    const char* env = std::getenv(kDatasetRootEnvVar);
    if (env == nullptr || *env == '\0')
      throw config_error(std::string("config names no data source and ") + kDatasetRootEnvVar +
                         " is not set");
    cfg.dataset_root = env;
  }

  if (j.contains("shape")) {
    const json& s = j.at("shape");
    expect_keys(s, "shape",
                {"n_classes", "n_subjects", "segments_per_cell", "n_samples", "n_channels"});
    cfg.shape.n_classes = get_or<int>(s, "n_classes", cfg.shape.n_classes);
    cfg.shape.n_subjects = get_or<int>(s, "n_subjects", cfg.shape.n_subjects);
    cfg.shape.segments_per_cell = get_or<int>(s, "segments_per_cell", cfg.shape.segments_per_cell);
    cfg.shape.n_samples = get_or<int>(s, "n_samples", cfg.shape.n_samples);
    cfg.shape.n_channels = get_or<int>(s, "n_channels", cfg.shape.n_channels);
  }

  if (j.contains("features")) {
    const json& f = j.at("features");
    expect_keys(f, "features", {"mode"});
    cfg.pipeline.features.mode =
        feature_mode_from_string(get_or<std::string>(f, "mode", "flatten"));
  }

  if (j.contains("pca")) {
    const json& p = j.at("pca");
    expect_keys(p, "pca", {"variance_target"});
    cfg.pipeline.pca.variance_target =
        get_or<double>(p, "variance_target", cfg.pipeline.pca.variance_target);
    if (!(cfg.pipeline.pca.variance_target > 0.0) || cfg.pipeline.pca.variance_target > 1.0)
      throw config_error("pca.variance_target must be in (0, 1]");
  }

  if (j.contains("models")) {
    const json& models = j.at("models");
    if (!models.is_array() || models.empty())
      throw config_error("models must be a non-empty array");
    for (std::size_t i = 0; i < models.size(); ++i)
      cfg.models.push_back(model_spec_from_json(models[i], i));
  } else {
    cfg.models = default_model_specs();
  }
  cfg.model_seed_given.resize(cfg.models.size(), false);
  if (j.contains("models"))
    for (std::size_t i = 0; i < cfg.models.size(); ++i)
      cfg.model_seed_given[i] = j.at("models")[i].contains("seed");
  {
    std::set<std::string> ids;
    for (const ModelSpec& spec : cfg.models)
      if (!ids.insert(spec.id).second)
        throw config_error("duplicate model id '" + spec.id + "'");
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    expect_keys(e, "eval", {"mode", "k", "holdout_fraction", "shuffle_seed"});
    std::string mode = get_or<std::string>(e, "mode", "kfold");
    if (mode == "kfold")
      cfg.eval.mode = EvalMode::KFold;
    else if (mode == "holdout")
      cfg.eval.mode = EvalMode::Holdout;
    else
      throw config_error("eval.mode must be 'kfold' or 'holdout', got '" + mode + "'");
    cfg.eval.k = get_or<int>(e, "k", cfg.eval.k);
    if (cfg.eval.k < 2) throw config_error("eval.k must be >= 2");
    cfg.eval.holdout_fraction = get_or<double>(e, "holdout_fraction", cfg.eval.holdout_fraction);
    if (!(cfg.eval.holdout_fraction > 0.0) || cfg.eval.holdout_fraction > 0.5)
      throw config_error("eval.holdout_fraction must be in (0, 0.5]");
    cfg.shuffle_seed_given = e.contains("shuffle_seed");
    cfg.eval.shuffle_seed = get_or<std::uint64_t>(e, "shuffle_seed", 0);
  }

  if (j.contains("noise")) {
    const json& n = j.at("noise");
    expect_keys(n, "noise", {"snr_grid", "trials", "master_seed"});
    if (n.contains("snr_grid")) {
      cfg.snr_grid = n.at("snr_grid").get<std::vector<double>>();
      if (cfg.snr_grid.empty()) throw config_error("noise.snr_grid must be non-empty");
      for (double s : cfg.snr_grid)
        if (std::isnan(s) || s == -std::numeric_limits<double>::infinity())
          throw config_error("noise.snr_grid values must be finite or +inf");
      std::set<double> unique(cfg.snr_grid.begin(), cfg.snr_grid.end());
      if (unique.size() != cfg.snr_grid.size())
        throw config_error("noise.snr_grid has duplicate values");
    }
    cfg.noise.trials = get_or<int>(n, "trials", 5);
    if (cfg.noise.trials < 1) throw config_error("noise.trials must be >= 1");
    cfg.noise_seed_given = n.contains("master_seed");
    cfg.noise.master_seed = get_or<std::uint64_t>(n, "master_seed", 0);
  } else {
    cfg.noise.trials = 5;
  }

  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw structure_error("cannot open config file: " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config " + file.string() + ": " + e.what());
  }
  RunConfig cfg = run_config_from_json(j);
  resolve_seeds(cfg);
  return cfg;
}

void resolve_seeds(RunConfig& cfg) {
  if (!cfg.shuffle_seed_given)
    cfg.eval.shuffle_seed = mix64_seq({cfg.master_seed, 0x5348'5546'464C'4500ULL});
  if (!cfg.noise_seed_given)
    cfg.noise.master_seed = mix64_seq({cfg.master_seed, 0x4E4F'4953'4500ULL});
  if (!cfg.synth_seed_given)
    cfg.synth_seed = mix64_seq({cfg.master_seed, 0x5359'4E54'4800ULL});
  cfg.model_seed_given.resize(cfg.models.size(), false);
  for (std::size_t i = 0; i < cfg.models.size(); ++i)
    if (!cfg.model_seed_given[i])
      cfg.models[i].seed = mix64_seq({cfg.master_seed, 0x4D4F'4445'4C00ULL, i});
}

ordered_json resolved_config_json(const RunConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.master_seed;

  // The echo stays loadable as a config: feeding it back reproduces the run.
  ordered_json data;
  if (cfg.dataset_root) {
    data["root"] = *cfg.dataset_root;
  } else {
    data["synth"] = {{"n_classes", cfg.synth->n_classes},
                     {"n_subjects", cfg.synth->n_subjects},
                     {"segments_per_cell", cfg.synth->segments_per_cell},
                     {"n_channels", cfg.synth->n_channels},
                     {"n_samples", cfg.synth->n_samples},
                     {"sample_rate_hz", cfg.synth->sample_rate_hz}};
    data["synth_seed"] = cfg.synth_seed;
  }
  j["data"] = std::move(data);
  if (cfg.dataset_root)
    j["shape"] = {{"n_classes", cfg.shape.n_classes},
                  {"n_subjects", cfg.shape.n_subjects},
                  {"segments_per_cell", cfg.shape.segments_per_cell},
                  {"n_samples", cfg.shape.n_samples},
                  {"n_channels", cfg.shape.n_channels}};

  j["features"] = {{"mode", cfg.pipeline.features.mode == FeatureMode::Flatten ? "flatten"
                                                                               : "stats"}};
  j["pca"] = {{"variance_target", cfg.pipeline.pca.variance_target}};

  ordered_json models = ordered_json::array();
  for (const ModelSpec& spec : cfg.models) {
    ordered_json m;
    m["family"] = to_string(spec.family);
    m["id"] = spec.id;
    m["use_pca"] = spec.use_pca;
    m["seed"] = spec.seed;
    switch (spec.family) {
      case ModelFamily::Mlp:
        m["hidden_layers"] = spec.mlp.hidden_layers;
        m["epochs"] = spec.mlp.epochs;
        m["batch_size"] = spec.mlp.batch_size;
        m["learning_rate"] = spec.mlp.learning_rate;
        break;
      case ModelFamily::Tree:
        m["max_depth"] = spec.tree.max_depth;
        m["min_samples_split"] = spec.tree.min_samples_split;
        break;
      case ModelFamily::Forest:
        m["n_trees"] = spec.forest.n_trees;
        m["features_per_split"] = spec.forest.features_per_split;
        m["bootstrap"] = spec.forest.bootstrap;
        break;
      case ModelFamily::Knn:
        m["k"] = spec.knn.k;
        break;
      case ModelFamily::Gnb:
        m["variance_floor_scale"] = spec.gnb.variance_floor_scale;
        break;
    }
    models.push_back(std::move(m));
  }
  j["models"] = std::move(models);

  j["eval"] = {{"mode", cfg.eval.mode == EvalMode::KFold ? "kfold" : "holdout"},
               {"k", cfg.eval.k},
               {"holdout_fraction", cfg.eval.holdout_fraction},
               {"shuffle_seed", cfg.eval.shuffle_seed}};
  j["noise"] = {{"snr_grid", cfg.snr_grid},
                {"trials", cfg.noise.trials},
                {"master_seed", cfg.noise.master_seed}};
  // output_dir is an I/O location, not a result-affecting parameter; the CLI
  // records it in the report header so bodies stay location-independent.
  return j;
}

Dataset load_config_dataset(const RunConfig& cfg, unsigned jobs) {
  if (cfg.dataset_root) return load_activity_dataset(*cfg.dataset_root, cfg.shape, jobs);
  return synth_dataset(*cfg.synth, cfg.synth_seed);
}

}  // namespace noisebench
