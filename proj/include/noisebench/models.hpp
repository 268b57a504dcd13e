#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "noisebench/matrix.hpp"

namespace noisebench {

enum class ModelFamily { Mlp, Tree, Forest, Knn, Gnb };

std::string to_string(ModelFamily family);
ModelFamily model_family_from_string(const std::string& name);

struct MlpParams {
  std::vector<std::size_t> hidden_layers{128, 64};
  int epochs = 30;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

struct TreeParams {
  int max_depth = 0;  // 0 = unlimited
  int min_samples_split = 2;
};

struct ForestParams {
  int n_trees = 100;
  bool bootstrap = true;
  int features_per_split = 0;  // 0 = ceil(sqrt(d))
  TreeParams tree;
};

struct KnnParams {
  int k = 5;
};

struct GnbParams {
  double variance_floor_scale = 1e-9;  // floor = scale * max feature variance
};

struct ModelSpec {
  ModelFamily family = ModelFamily::Knn;
  std::string id;        // report label, e.g. "dnn", "dtc_pca"
  bool use_pca = false;  // pipeline applies PCA before this model
  std::uint64_t seed = 0;

  MlpParams mlp;
  TreeParams tree;
  ForestParams forest;
  KnnParams knn;
  GnbParams gnb;
};

// The five benchmark families with their default hyperparameters; seeds are
// resolved later from the master seed.
std::vector<ModelSpec> default_model_specs();

class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  ModelFamily family() const { return family_; }
  const std::string& id() const { return id_; }
  std::size_t input_dim() const { return input_dim_; }
  int n_classes() const { return n_classes_; }

  // One label in [1, n_classes] per row. Throws on dimensionality mismatch.
  std::vector<int> predict(const Matrix& X) const;

  // Per-class probabilities, rows summing to 1; argmax agrees with predict.
  // Mlp, Gnb and Forest only; other families throw a capability error.
  Matrix predict_proba(const Matrix& X) const;

  // Hash over all fitted parameters; used by the determinism and
  // leakage-guard checks.
  virtual std::uint64_t param_hash() const = 0;

  friend std::unique_ptr<TrainedModel> fit_model(const ModelSpec&, const Matrix&,
                                                 const std::vector<int>&, int);

 protected:
  virtual std::vector<int> do_predict(const Matrix& X) const = 0;
  virtual Matrix do_predict_proba(const Matrix& X) const;

  ModelFamily family_ = ModelFamily::Knn;
  std::string id_;
  std::size_t input_dim_ = 0;
  int n_classes_ = 0;
};

// Validates inputs (finite features, labels covering 1..n_classes, at least
// one sample per class) and dispatches to the family trainer. Deterministic
// given spec.seed. n_classes 0 derives the count from the largest label.
std::unique_ptr<TrainedModel> fit_model(const ModelSpec& spec, const Matrix& X,
                                        const std::vector<int>& y, int n_classes = 0);

}  // namespace noisebench
