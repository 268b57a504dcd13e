#include "noisebench/models.hpp"

#include <algorithm>
#include <cmath>

#include "noisebench/error.hpp"
#include "noisebench/models/forest.hpp"
#include "noisebench/models/gnb.hpp"
#include "noisebench/models/knn.hpp"
#include "noisebench/models/mlp.hpp"
#include "noisebench/models/tree.hpp"

namespace noisebench {

std::string to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::Mlp: return "mlp";
    case ModelFamily::Tree: return "tree";
    case ModelFamily::Forest: return "forest";
    case ModelFamily::Knn: return "knn";
    case ModelFamily::Gnb: return "gnb";
  }
  return "?";
}

ModelFamily model_family_from_string(const std::string& name) {
  if (name == "mlp" || name == "dnn") return ModelFamily::Mlp;
  if (name == "tree" || name == "dtc") return ModelFamily::Tree;
  if (name == "forest" || name == "rfc") return ModelFamily::Forest;
  if (name == "knn") return ModelFamily::Knn;
  if (name == "gnb") return ModelFamily::Gnb;
  throw config_error("unknown model family: " + name);
}

std::vector<ModelSpec> default_model_specs() {
  std::vector<ModelSpec> specs(5);
  specs[0].family = ModelFamily::Mlp;
  specs[0].id = "dnn";
  specs[1].family = ModelFamily::Tree;
  specs[1].id = "dtc_pca";
  specs[1].use_pca = true;
  specs[2].family = ModelFamily::Forest;
  specs[2].id = "rfc";
  specs[3].family = ModelFamily::Knn;
  specs[3].id = "knn_pca";
  specs[3].use_pca = true;
  specs[4].family = ModelFamily::Gnb;
  specs[4].id = "gnb";
  return specs;
}

std::vector<int> TrainedModel::predict(const Matrix& X) const {
  if (X.rows() == 0) return {};
  if (X.cols() != input_dim_)
    throw argument_error("predict: expected " + std::to_string(input_dim_) + " features, got " +
                         std::to_string(X.cols()));
  return do_predict(X);
}

Matrix TrainedModel::predict_proba(const Matrix& X) const {
  if (X.rows() == 0) return Matrix(0, static_cast<std::size_t>(n_classes_));
  if (X.cols() != input_dim_)
    throw argument_error("predict_proba: expected " + std::to_string(input_dim_) +
                         " features, got " + std::to_string(X.cols()));
  return do_predict_proba(X);
}

Matrix TrainedModel::do_predict_proba(const Matrix&) const {
  throw capability_error("predict_proba: not supported for " + to_string(family_) + " models");
}

std::unique_ptr<TrainedModel> fit_model(const ModelSpec& spec, const Matrix& X,
                                        const std::vector<int>& y, int n_classes) {
  if (X.rows() != y.size())
    throw argument_error("fit: row/label count mismatch (" + std::to_string(X.rows()) + " vs " +
                         std::to_string(y.size()) + ")");
  if (X.rows() == 0) throw argument_error("fit: empty training set");

  const double* data = X.data();
  for (std::size_t i = 0; i < X.rows() * X.cols(); ++i)
    if (!std::isfinite(data[i])) throw argument_error("fit: non-finite feature value");

  int top = 0;
  for (int label : y) {
    if (label < 1) throw argument_error("fit: labels must be >= 1");
    top = std::max(top, label);
  }
  if (n_classes == 0) n_classes = top;
  if (top > n_classes)
    throw argument_error("fit: label " + std::to_string(top) + " exceeds n_classes");
  std::vector<std::size_t> per_class(static_cast<std::size_t>(n_classes) + 1, 0);
  for (int label : y) ++per_class[static_cast<std::size_t>(label)];
  for (int c = 1; c <= n_classes; ++c)
    if (per_class[static_cast<std::size_t>(c)] == 0)
      throw argument_error("fit: class " + std::to_string(c) + " has no samples");
  if (X.rows() < static_cast<std::size_t>(n_classes))
    throw argument_error("fit: fewer samples than classes");

  std::unique_ptr<TrainedModel> model;
  switch (spec.family) {
    case ModelFamily::Mlp:
      model = fit_mlp(spec.mlp, spec.seed, X, y, n_classes);
      break;
    case ModelFamily::Tree: {
      std::vector<std::size_t> all(X.rows());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      model = std::make_unique<TreeModel>(build_tree(X, y, all, n_classes, spec.tree), X.cols(),
                                          n_classes);
      break;
    }
    case ModelFamily::Forest:
      model = fit_forest(spec.forest, spec.seed, X, y, n_classes);
      break;
    case ModelFamily::Knn:
      model = fit_knn(spec.knn, X, y, n_classes);
      break;
    case ModelFamily::Gnb:
      model = fit_gnb(spec.gnb, X, y, n_classes);
      break;
  }
  model->id_ = spec.id.empty() ? to_string(spec.family) : spec.id;
  return model;
}

}  // namespace noisebench
