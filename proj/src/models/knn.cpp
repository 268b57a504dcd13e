#include "noisebench/models/knn.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include "noisebench/error.hpp"

namespace noisebench {

KnnModel::KnnModel(Matrix train_X, std::vector<int> train_y, int k, int n_classes)
    : train_X_(std::move(train_X)), train_y_(std::move(train_y)), k_(k) {
  family_ = ModelFamily::Knn;
  input_dim_ = train_X_.cols();
  n_classes_ = n_classes;
}

std::uint64_t KnnModel::param_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto absorb = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001B3ULL;
  };
  absorb(static_cast<std::uint64_t>(k_));
  const double* data = train_X_.data();
  for (std::size_t i = 0; i < train_X_.rows() * train_X_.cols(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof bits);
    absorb(bits);
  }
  for (int label : train_y_) absorb(static_cast<std::uint64_t>(label));
  return h;
}

std::vector<int> KnnModel::do_predict(const Matrix& X) const {
  const std::size_t n_train = train_X_.rows();
  const std::size_t d = train_X_.cols();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), n_train);

  std::vector<int> out(X.rows());
  std::vector<std::pair<double, int>> candidates(n_train);  // (squared distance, label)
  std::vector<std::int64_t> votes(static_cast<std::size_t>(n_classes_) + 1);
  std::vector<double> nearest(static_cast<std::size_t>(n_classes_) + 1);

  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto q = X.row(i);
    for (std::size_t t = 0; t < n_train; ++t) {
      auto r = train_X_.row(t);
      double dist = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double diff = q[j] - r[j];
        dist += diff * diff;
      }
      candidates[t] = {dist, train_y_[t]};
    }
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     candidates.end());

    std::fill(votes.begin(), votes.end(), 0);
    std::fill(nearest.begin(), nearest.end(), std::numeric_limits<double>::infinity());
    for (std::size_t t = 0; t < k; ++t) {
      auto [dist, label] = candidates[t];
      ++votes[static_cast<std::size_t>(label)];
      nearest[static_cast<std::size_t>(label)] = std::min(nearest[static_cast<std::size_t>(label)], dist);
    }

    int best = 1;
    for (int c = 2; c <= n_classes_; ++c) {
      auto cc = static_cast<std::size_t>(c);
      auto bc = static_cast<std::size_t>(best);
      if (votes[cc] > votes[bc] || (votes[cc] == votes[bc] && nearest[cc] < nearest[bc]))
        best = c;  // remaining ties keep the lowest label
    }
    out[i] = best;
  }
  return out;
}

std::unique_ptr<KnnModel> fit_knn(const KnnParams& params, const Matrix& X,
                                  const std::vector<int>& y, int n_classes) {
  if (params.k < 1) throw argument_error("knn: k must be >= 1");
  return std::make_unique<KnnModel>(X, y, params.k, n_classes);
}

}  // namespace noisebench
