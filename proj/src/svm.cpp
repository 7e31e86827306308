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

#include "caplens/svm.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <list>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "caplens/error.hpp"
#include "caplens/rng.hpp"
#include "caplens/stats.hpp"

namespace caplens {

namespace {

constexpr double kTau = 1e-12;
constexpr char kModelMagic[4] = {'C', 'S', 'V', 'M'};
constexpr std::uint16_t kModelVersion = 1;

// LRU cache of Q rows (Q_ij = y_i y_j K_ij) under a byte budget. Always
// holds at least the two rows of the current working pair.
class KernelCache {
 public:
  KernelCache(const TrainingData& data, double gamma, std::size_t budget_bytes)
      : data_(data), gamma_(gamma), n_(data.rows()) {
    const std::size_t row_bytes = std::max<std::size_t>(n_ * sizeof(double), 1);
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  const std::vector<double>& row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
      ++hits_;
      rows_.splice(rows_.begin(), rows_, it->second);
      return it->second->second;
    }
    ++misses_;
    std::vector<double> values;
    if (rows_.size() >= capacity_) {
      values = std::move(rows_.back().second);
      index_.erase(rows_.back().first);
      rows_.pop_back();
    }
    values.resize(n_);
    const auto xi = data_.row(i);
    const double yi = data_.y[i];
    for (std::size_t k = 0; k < n_; ++k) {
      values[k] = yi * data_.y[k] * rbf(xi, data_.row(k), gamma_);
    }
    rows_.emplace_front(i, std::move(values));
    index_[i] = rows_.begin();
    return rows_.front().second;
  }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  const TrainingData& data_;
  double gamma_;
  std::size_t n_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, std::vector<double>>> rows_;
  std::unordered_map<std::size_t, decltype(rows_)::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

void check_data(const TrainingData& data) {
  if (data.dim == 0) throw ValidationError("training data has dimension 0");
  if (data.X.size() % data.dim != 0 || data.rows() != data.y.size()) {
    throw ValidationError("training features and labels are misaligned");
  }
  if (data.rows() < 2) throw DegenerateData("training needs at least two rows");
  bool pos = false;
  bool neg = false;
  for (int label : data.y) {
    if (label == 1) {
      pos = true;
    } else if (label == -1) {
      neg = true;
    } else {
      throw ValidationError(fmt::format("label {} is not +1 or -1", label));
    }
  }
  if (!pos || !neg) throw DegenerateData("training data contains a single class");
  for (double v : data.X) {
    if (!std::isfinite(v)) throw ValidationError("non-finite training feature");
  }
}

// Solves min 0.5 a'Qa - e'a s.t. 0 <= a <= C, y'a = 0.
SvmModel solve(const TrainingData& data, const SvmConfig& config, double gamma) {
  const std::size_t n = data.rows();
  const double C = config.C;
  const std::size_t max_iter =
      config.max_iter > 0 ? config.max_iter : std::max<std::size_t>(10'000'000, 100 * n);
  const auto& y = data.y;

  std::vector<double> alpha(n, 0.0);
  std::vector<double> G(n, -1.0);
  KernelCache cache(data, gamma, config.cache_bytes);

  SvmModel model;
  model.dim = data.dim;
  model.gamma = gamma;
  model.C = C;
  model.converged = false;

  std::size_t iter = 0;
  while (true) {
    // I_up maximizes -y G, I_low maximizes y G; strict comparisons keep
    // the lowest index on ties.
    double g_up = -std::numeric_limits<double>::infinity();
    double g_low = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1;
    std::ptrdiff_t j = -1;
    for (std::size_t t = 0; t < n; ++t) {
      const double yg = y[t] * G[t];
      const bool up = y[t] == 1 ? alpha[t] < C : alpha[t] > 0;
      const bool low = y[t] == 1 ? alpha[t] > 0 : alpha[t] < C;
      if (up && -yg > g_up) {
        g_up = -yg;
        i = static_cast<std::ptrdiff_t>(t);
      }
      if (low && yg > g_low) {
        g_low = yg;
        j = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i < 0 || j < 0 || g_up + g_low < config.tolerance) {
      model.converged = true;
      break;
    }
    if (iter >= max_iter) {
      spdlog::warn("SMO stopped after {} iterations without reaching tolerance", iter);
      break;
    }
    ++iter;

    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);
    // Copy row i: fetching row j may evict it under a tight budget.
    const std::vector<double> Qi = cache.row(ui);
    const std::vector<double>& Qj = cache.row(uj);
    const double old_ai = alpha[ui];
    const double old_aj = alpha[uj];
    double ai = old_ai;
    double aj = old_aj;

    if (y[ui] != y[uj]) {
      double quad = Qi[ui] + Qj[uj] + 2.0 * Qi[uj];
      if (quad <= 0) quad = kTau;
      const double delta = (-G[ui] - G[uj]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) {
          aj = 0;
          ai = diff;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      double quad = Qi[ui] + Qj[uj] - 2.0 * Qi[uj];
      if (quad <= 0) quad = kTau;
      const double delta = (G[ui] - G[uj]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }
    alpha[ui] = ai;
    alpha[uj] = aj;
    const double dai = ai - old_ai;
    const double daj = aj - old_aj;
    for (std::size_t k = 0; k < n; ++k) G[k] += Qi[k] * dai + Qj[k] * daj;
  }

  // Bias as the mean y G over free vectors, else the midpoint of bounds.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  std::size_t n_free = 0;
  CompensatedSum free_sum;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] == -1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha[t] <= 0) {
      if (y[t] == 1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      ++n_free;
      free_sum.add(yg);
    }
  }
  model.rho = n_free > 0 ? free_sum.value() / static_cast<double>(n_free) : (ub + lb) / 2.0;

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0) continue;
    model.coef.push_back(alpha[t] * y[t]);
    model.support_indices.push_back(t);
    const auto row = data.row(t);
    model.support_vectors.insert(model.support_vectors.end(), row.begin(), row.end());
  }
  model.iterations = iter;
  model.cache_hits = cache.hits();
  model.cache_misses = cache.misses();
  return model;
}

template <typename T>
T le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

template <typename T>
void put(std::ostream& out, T v) {
  v = le(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) {
    throw FormatError("truncated model file");
  }
  return le(v);
}

double population_std(std::span<const double> xs, double mean) {
  CompensatedSum ss;
  for (double x : xs) ss.add((x - mean) * (x - mean));
  return std::sqrt(ss.value() / static_cast<double>(xs.size()));
}

}  // namespace

void SvmConfig::validate() const {
  if (!(C > 0) || !std::isfinite(C)) throw ValidationError(fmt::format("C must be > 0, got {}", C));
  if (gamma && (!(*gamma > 0) || !std::isfinite(*gamma))) {
    throw ValidationError(fmt::format("gamma must be > 0, got {}", *gamma));
  }
  if (!(tolerance > 0)) throw ValidationError("tolerance must be > 0");
}

std::size_t cache_bytes_from_env(std::size_t fallback) {
  const char* raw = std::getenv("CAPLENS_CACHE");
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long mb = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') {
    throw Error(fmt::format("CAPLENS_CACHE must be a size in MB, got '{}'", raw));
  }
  return static_cast<std::size_t>(mb) << 20;
}

double gamma_scale(std::span<const double> X, std::size_t dim) {
  if (X.empty() || dim == 0) throw DegenerateData("gamma scale of an empty matrix");
  const double n = static_cast<double>(X.size());
  const double mean = compensated_sum(X) / n;
  CompensatedSum ss;
  for (double v : X) ss.add((v - mean) * (v - mean));
  const double var = ss.value() / n;
  if (!(var > 0)) throw DegenerateData("gamma scale undefined: features have zero variance");
  return 1.0 / (static_cast<double>(dim) * var);
}

double gamma_scale(const EmbeddingMatrix& matrix) {
  std::vector<double> values(matrix.values().begin(), matrix.values().end());
  return gamma_scale(values, matrix.dim());
}

double rbf(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) {
    throw std::invalid_argument(
        fmt::format("rbf: dimension mismatch ({} vs {})", x.size(), y.size()));
  }
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

SvmModel train(const TrainingData& data, const SvmConfig& config, std::uint64_t seed) {
  config.validate();
  check_data(data);
  const std::size_t n = data.rows();
  if (config.max_train > 0 && n > config.max_train) {
    std::vector<std::size_t> picked(n);
    std::iota(picked.begin(), picked.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(picked));
    picked.resize(config.max_train);
    std::sort(picked.begin(), picked.end());
    std::vector<double> X;
    std::vector<int> y;
    for (std::size_t i : picked) {
      const auto row = data.row(i);
      X.insert(X.end(), row.begin(), row.end());
      y.push_back(data.y[i]);
    }
    SvmConfig inner = config;
    inner.max_train = 0;
    SvmModel model = train(TrainingData{X, data.dim, y}, inner, seed);
    for (std::size_t& idx : model.support_indices) idx = picked[idx];
    return model;
  }
  const double gamma = config.gamma ? *config.gamma : gamma_scale(data.X, data.dim);
  return solve(data, config, gamma);
}

Prediction predict(const SvmModel& model, std::span<const double> x) {
  if (model.coef.empty()) throw DegenerateData("model has no support vectors");
  if (x.size() != model.dim) {
    throw std::invalid_argument(
        fmt::format("predict: expected dimension {}, got {}", model.dim, x.size()));
  }
  CompensatedSum sum;
  for (std::size_t i = 0; i < model.coef.size(); ++i) {
    sum.add(model.coef[i] * rbf(model.support_vector(i), x, model.gamma));
  }
  const double decision = sum.value() - model.rho;
  return {decision > 0, decision};
}

double dual_objective(const SvmModel& model) {
  CompensatedSum quad;
  CompensatedSum lin;
  for (std::size_t i = 0; i < model.coef.size(); ++i) {
    lin.add(std::abs(model.coef[i]));
    for (std::size_t j = 0; j < model.coef.size(); ++j) {
      quad.add(model.coef[i] * model.coef[j] *
               rbf(model.support_vector(i), model.support_vector(j), model.gamma));
    }
  }
  return 0.5 * quad.value() - lin.value();
}

void write_model(const SvmModel& model, std::ostream& out) {
  out.write(kModelMagic, 4);
  put<std::uint16_t>(out, kModelVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.dim));
  put<double>(out, model.gamma);
  put<double>(out, model.C);
  put<double>(out, model.rho);
  put<std::uint64_t>(out, model.coef.size());
  for (std::size_t i = 0; i < model.coef.size(); ++i) {
    put<std::uint64_t>(out, model.support_indices[i]);
    put<double>(out, model.coef[i]);
    for (double v : model.support_vector(i)) put<double>(out, v);
  }
  if (!out) throw Error("failed writing model");
}

SvmModel read_model(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kModelMagic, 4) != 0) {
    throw FormatError("not a model file (magic mismatch)", std::nullopt, 0);
  }
  const auto version = get<std::uint16_t>(in);
  if (version != kModelVersion) {
    throw FormatError(fmt::format("unsupported model format version {}", version));
  }
  SvmModel model;
  model.dim = get<std::uint32_t>(in);
  model.gamma = get<double>(in);
  model.C = get<double>(in);
  model.rho = get<double>(in);
  const auto count = get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    model.support_indices.push_back(get<std::uint64_t>(in));
    model.coef.push_back(get<double>(in));
    for (std::size_t k = 0; k < model.dim; ++k) model.support_vectors.push_back(get<double>(in));
  }
  return model;
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write model '{}'", path.string()));
  write_model(model, out);
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open model '{}'", path.string()));
  return read_model(in);
}

std::string CvResult::cell(int precision) const {
  return fmt::format("{:.{}f} ± {:.{}f}", mean, precision, std, precision);
}

CvResult cross_validate(const ClassificationDataset& dataset, const FoldSplit& folds,
                        const EmbeddingMatrix& embeddings, const SvmConfig& config,
                        unsigned jobs) {
  config.validate();
  if (folds.fold_of.size() != dataset.items.size()) {
    throw ValidationError("fold split does not match the dataset");
  }
  const JoinedFeatures joined = join(dataset, embeddings);
  if (!joined.missing.empty()) {
    throw ValidationError(fmt::format("{} dataset image(s) have no embedding: {}",
                                      joined.missing.size(), fmt::join(joined.missing, ", ")));
  }
  const auto k = static_cast<std::size_t>(folds.k);
  const std::size_t d = joined.dim;

  CvResult result;
  result.property = dataset.property;
  result.scope = dataset.scope;
  result.pretraining_tag = embeddings.pretraining_tag();
  result.seed = dataset.seed;
  result.folds = folds.k;
  result.C = config.C;
  result.gamma = config.gamma ? fmt::format("{}", *config.gamma) : "scale";
  result.fold_gammas.assign(k, 0.0);
  result.fold_accuracies.assign(k, 0.0);
  result.fold_sizes = folds.fold_sizes();
  std::vector<char> converged(k, 1);

  auto run_fold = [&](std::size_t f) {
    std::vector<double> X;
    std::vector<int> y;
    std::vector<std::size_t> test;
    for (std::size_t r = 0; r < joined.rows(); ++r) {
      if (static_cast<std::size_t>(folds.fold_of[joined.item_index[r]]) == f) {
        test.push_back(r);
        continue;
      }
      X.insert(X.end(), joined.X.begin() + static_cast<std::ptrdiff_t>(r * d),
               joined.X.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
      y.push_back(joined.y[r]);
    }
    if (test.empty()) throw DegenerateData(fmt::format("fold {} is empty", f));
    const SvmModel model = train(TrainingData{X, d, y}, config, Rng::derive(dataset.seed, f).next());
    std::size_t correct = 0;
    for (std::size_t r : test) {
      const std::span<const double> x(joined.X.data() + r * d, d);
      if (predict(model, x).label == (joined.y[r] == 1)) ++correct;
    }
    result.fold_gammas[f] = model.gamma;
    result.fold_accuracies[f] =
        100.0 * static_cast<double>(correct) / static_cast<double>(test.size());
    converged[f] = model.converged ? 1 : 0;
  };

  const unsigned workers = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(k));
  if (workers == 1) {
    for (std::size_t f = 0; f < k; ++f) run_fold(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t f = next++; f < k; f = next++) {
            try {
              run_fold(f);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  result.mean = compensated_sum(result.fold_accuracies) / static_cast<double>(k);
  result.std = population_std(result.fold_accuracies, result.mean);
  result.converged = std::all_of(converged.begin(), converged.end(), [](char c) { return c; });
  return result;
}

std::string cv_result_to_json(const CvResult& r) {
  nlohmann::ordered_json j;
  j["property"] = to_code(r.property);
  j["scope"] = to_string(r.scope);
  j["pretraining_tag"] = r.pretraining_tag;
  j["seed"] = r.seed;
  j["folds"] = r.folds;
  j["C"] = r.C;
  j["gamma"] = r.gamma;
  j["fold_gammas"] = r.fold_gammas;
  j["fold_sizes"] = r.fold_sizes;
  j["fold_accuracies"] = r.fold_accuracies;
  j["mean"] = r.mean;
  j["std"] = r.std;
  j["cell"] = r.cell();
  j["converged"] = r.converged;
  return j.dump(1) + "\n";
}

CvResult cv_result_from_json(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    CvResult r;
    r.property = property_from_code(j.at("property").get<std::string>());
    r.scope = scope_from_string(j.at("scope").get<std::string>());
    r.pretraining_tag = j.at("pretraining_tag").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.folds = j.at("folds").get<int>();
    r.C = j.at("C").get<double>();
    r.gamma = j.at("gamma").get<std::string>();
    r.fold_gammas = j.at("fold_gammas").get<std::vector<double>>();
    r.fold_sizes = j.at("fold_sizes").get<std::vector<std::size_t>>();
    r.fold_accuracies = j.at("fold_accuracies").get<std::vector<double>>();
    r.mean = j.at("mean").get<double>();
    r.std = j.at("std").get<double>();
    r.converged = j.at("converged").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("malformed CV result ({})", e.what()));
  }
}

}  // namespace caplens
