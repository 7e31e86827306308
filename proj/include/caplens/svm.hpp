// Copyright 2026 The caplens Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caplens/dataset.hpp"
#include "caplens/embeddings.hpp"

namespace caplens {

// Row-major n x d feature block with +1/-1 labels.
struct TrainingData {
  std::span<const double> X;
  std::size_t dim = 0;
  std::span<const int> y;

  std::size_t rows() const { return dim == 0 ? 0 : X.size() / dim; }
  std::span<const double> row(std::size_t i) const { return X.subspan(i * dim, dim); }
};

struct SvmConfig {
  double C = 1.0;
  std::optional<double> gamma;  // nullopt: "scale"
  double tolerance = 1e-3;
  std::size_t max_iter = 0;     // 0: max(10^7, 100 n)
  std::size_t cache_bytes = std::size_t{100} << 20;
  std::size_t max_train = 0;    // seeded training subsample cap, 0 = off

  void validate() const;
};

// Kernel cache budget: CAPLENS_CACHE (MB) when set, else `fallback`.
std::size_t cache_bytes_from_env(std::size_t fallback);

// 1 / (d * population variance of all entries). Throws DegenerateData on
// zero variance.
double gamma_scale(std::span<const double> X, std::size_t dim);
double gamma_scale(const EmbeddingMatrix& matrix);

// exp(-gamma * |x - y|^2). Throws std::invalid_argument on a dim mismatch.
double rbf(std::span<const double> x, std::span<const double> y, double gamma);

struct SvmModel {
  std::size_t dim = 0;
  double gamma = 0.0;
  double C = 1.0;
  double rho = 0.0;                       // decision = sum coef_i K(sv_i, x) - rho
  std::vector<double> support_vectors;    // row-major, |coef| x dim
  std::vector<double> coef;               // alpha_i * y_i, alpha_i > 0 only
  std::vector<std::size_t> support_indices;  // rows of the training data

  // Solver bookkeeping, not serialized.
  bool converged = true;
  std::size_t iterations = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;

  std::size_t n_support() const { return coef.size(); }
  double bias() const { return -rho; }
  std::span<const double> support_vector(std::size_t i) const {
    return {support_vectors.data() + i * dim, dim};
  }
};

struct Prediction {
  bool label = false;
  double decision = 0.0;
};

// Soft-margin SMO on the dual with maximal-violating-pair selection. The
// seed only drives the optional training subsample.
SvmModel train(const TrainingData& data, const SvmConfig& config, std::uint64_t seed = 0);

// Throws DegenerateData for a model without support vectors and
// std::invalid_argument on a dim mismatch.
Prediction predict(const SvmModel& model, std::span<const double> x);

// 0.5 * sum_ij coef_i coef_j K_ij - sum_i |coef_i|, the minimized dual.
double dual_objective(const SvmModel& model);

void write_model(const SvmModel& model, std::ostream& out);
SvmModel read_model(std::istream& in);
void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

struct CvResult {
  Property property = Property::Num;
  CaptionScope scope;
  std::string pretraining_tag = "none";
  std::uint64_t seed = 0;
  int folds = 5;
  double C = 1.0;
  std::string gamma = "scale";
  std::vector<double> fold_gammas;
  std::vector<double> fold_accuracies;  // percent
  std::vector<std::size_t> fold_sizes;
  double mean = 0.0;
  double std = 0.0;  // population std over folds
  bool converged = true;

  std::string cell(int precision = 1) const;  // "76.4 ± 0.2"
};

// Train on k-1 folds, test on the held-out one. Throws ValidationError
// naming the dataset ids that have no embedding row.
CvResult cross_validate(const ClassificationDataset& dataset, const FoldSplit& folds,
                        const EmbeddingMatrix& embeddings, const SvmConfig& config,
                        unsigned jobs = 1);

std::string cv_result_to_json(const CvResult& result);
CvResult cv_result_from_json(std::string_view json_text);

}  // namespace caplens
