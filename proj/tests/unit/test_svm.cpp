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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "caplens/error.hpp"
#include "caplens/rng.hpp"
#include "caplens/svm.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace caplens;
namespace ct = caplens::testing;

namespace {

double training_accuracy(const SvmModel& model, const ct::LabeledPoints& p) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    const auto x = std::span<const double>(p.X).subspan(i * p.dim, p.dim);
    if (predict(model, x).label == (p.y[i] > 0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(p.rows());
}

// The full alpha vector, recovered from the support set.
std::vector<double> alphas(const SvmModel& model, std::size_t n) {
  std::vector<double> a(n, 0.0);
  for (std::size_t s = 0; s < model.n_support(); ++s) {
    a[model.support_indices[s]] = std::abs(model.coef[s]);
  }
  return a;
}

double oracle_objective_at(const ct::LabeledPoints& p, const std::vector<double>& a, double gamma) {
  long double f = 0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.rows(); ++j) {
      f += 0.5L * a[i] * a[j] * p.y[i] * p.y[j] *
           ct::rbf_by_definition(&p.X[i * p.dim], &p.X[j * p.dim], p.dim, gamma);
    }
    f -= a[i];
  }
  return static_cast<double>(f);
}

}  // namespace

TEST_SUITE("svm") {
  TEST_CASE("gamma scale") {
    const std::vector<double> m{0, 0, 2, 2};
    CHECK(gamma_scale(m, 2) == 0.5);
    const std::vector<double> c(12, 3.0);
    CHECK_THROWS_AS(gamma_scale(c, 3), DegenerateData);
    Rng rng(3);
    std::vector<double> r;
    for (int i = 0; i < 800; ++i) r.push_back(2.0 * rng.normal() + 1.0);
    const double oracle = 1.0 / (8.0 * static_cast<double>(ct::two_pass_variance(r)));
    CHECK(std::abs(gamma_scale(r, 8) - oracle) <= 1e-10);
  }

  TEST_CASE("rbf kernel") {
    const std::vector<double> x{0.3, -1.2, 4.0};
    CHECK(rbf(x, x, 0.7) == 1.0);
    const std::vector<double> a{0, 0};
    const std::vector<double> b{1, 0};
    CHECK(rbf(a, b, 1.0) == doctest::Approx(0.367879).epsilon(1e-6));
    CHECK(rbf(a, b, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
      std::vector<double> u(5);
      std::vector<double> v(5);
      for (auto& e : u) e = rng.normal();
      for (auto& e : v) e = rng.normal();
      CHECK(rbf(u, v, 0.3) == rbf(v, u, 0.3));
      CHECK(rbf(u, v, 0.3) == doctest::Approx(ct::rbf_by_definition(u.data(), v.data(), 5, 0.3)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(rbf(x, a, 1.0), std::invalid_argument);
  }

  TEST_CASE("two clusters are separated") {
    const auto p = ct::two_clusters(17);
    const auto model = train(p.data(), SvmConfig{});
    CHECK(model.converged);
    CHECK(training_accuracy(model, p) == 1.0);
    const auto oracle = ct::solve_dual_projected_gradient(p.X, p.dim, p.y, model.gamma, 1.0);
    CHECK(std::abs(dual_objective(model) - oracle.objective) <=
          1e-3 * std::abs(oracle.objective));
  }

  TEST_CASE("XOR is classified") {
    const auto p = ct::xor_pattern();
    SvmConfig config;
    config.gamma = 1.0;
    config.C = 10.0;
    const auto model = train(p.data(), config);
    CHECK(training_accuracy(model, p) == 1.0);
    const auto oracle = ct::solve_dual_projected_gradient(p.X, p.dim, p.y, 1.0, 10.0);
    CHECK(std::abs(dual_objective(model) - oracle.objective) <=
          1e-3 * std::abs(oracle.objective));
  }

  TEST_CASE("dual objective matches the reference solver") {
    Rng sizes(2024);
    std::size_t instances = 0;
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
      const std::size_t n = 10 + sizes.below(41);
      const std::size_t d = 1 + sizes.below(8);
      const double C = seed % 3 == 0 ? 10.0 : 1.0;
      const auto p = ct::random_instance(n, d, seed);
      SvmConfig config;
      config.C = C;
      const auto model = train(p.data(), config, seed);
      const auto oracle = ct::solve_dual_projected_gradient(p.X, p.dim, p.y, model.gamma, C);
      const double smo = dual_objective(model);
      INFO("seed " << seed << " n " << n << " d " << d);
      CHECK(std::abs(smo - oracle.objective) <= 1e-3 * std::abs(oracle.objective));
      CHECK(std::abs(oracle_objective_at(p, alphas(model, n), model.gamma) - smo) <=
            1e-9 * std::abs(smo));
      ++instances;
    }
    CHECK(instances >= 20);
  }

  TEST_CASE("dual feasibility") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto p = ct::random_instance(40, 4, seed);
      SvmConfig config;
      config.C = 2.0;
      const auto model = train(p.data(), config);
      double balance = 0;
      for (std::size_t s = 0; s < model.n_support(); ++s) {
        const double a = std::abs(model.coef[s]);
        CHECK(a > 0.0);
        CHECK(a <= config.C);
        CHECK((model.coef[s] > 0) == (p.y[model.support_indices[s]] > 0));
        balance += model.coef[s];
      }
      CHECK(std::abs(balance) <= 1e-6 * config.C * 40);
    }
  }

  TEST_CASE("support vectors beyond the margin keep their label") {
    const auto p = ct::two_clusters(5);
    const auto model = train(p.data(), SvmConfig{});
    for (std::size_t s = 0; s < model.n_support(); ++s) {
      const auto pred = predict(model, model.support_vector(s));
      if (std::abs(pred.decision) > model.C * 1e-3) CHECK(pred.label == (model.coef[s] > 0));
    }
  }

  TEST_CASE("flipping the labels flips the decision") {
    const auto p = ct::random_instance(30, 3, 77);
    auto flipped = p;
    for (int& y : flipped.y) y = -y;
    SvmConfig config;
    config.gamma = 0.5;
    const auto a = train(p.data(), config);
    const auto b = train(flipped.data(), config);
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> x(3);
      for (auto& e : x) e = rng.normal();
      const double da = predict(a, x).decision;
      const double db = predict(b, x).decision;
      CHECK(std::abs(da + db) <= 1e-6 * std::max(1.0, std::abs(da)));
    }
  }

  TEST_CASE("a model without support vectors cannot predict") {
    SvmModel empty;
    empty.dim = 2;
    empty.gamma = 1.0;
    const std::vector<double> x{0, 0};
    CHECK_THROWS_AS(predict(empty, x), DegenerateData);
  }

  TEST_CASE("translation leaves decisions unchanged") {
    const auto p = ct::random_instance(40, 5, 8);
    auto shifted = p;
    for (std::size_t i = 0; i < shifted.X.size(); ++i) shifted.X[i] += 3.0 + 0.5 * (i % 5);
    SvmConfig config;
    config.gamma = 0.2;
    const auto a = train(p.data(), config);
    const auto b = train(shifted.data(), config);
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> x(5);
      for (auto& e : x) e = rng.normal();
      std::vector<double> xs = x;
      for (std::size_t k = 0; k < 5; ++k) xs[k] += 3.0 + 0.5 * k;
      CHECK(std::abs(predict(a, x).decision - predict(b, xs).decision) <= 1e-8);
    }
  }

  TEST_CASE("training is deterministic") {
    const auto p = ct::random_instance(50, 6, 12);
    const auto a = train(p.data(), SvmConfig{}, 3);
    const auto b = train(p.data(), SvmConfig{}, 3);
    CHECK(a.coef == b.coef);
    CHECK(a.rho == b.rho);
    CHECK(a.support_indices == b.support_indices);
  }

  TEST_CASE("training input validation") {
    const std::vector<double> X{0, 1, 2};
    const std::vector<int> same{1, 1, 1};
    CHECK_THROWS_AS(train(TrainingData{X, 1, same}, SvmConfig{}), DegenerateData);
    const std::vector<double> bad{0, NAN, 2};
    const std::vector<int> y{1, -1, 1};
    CHECK_THROWS_AS(train(TrainingData{bad, 1, y}, SvmConfig{}), ValidationError);
    SvmConfig config;
    config.C = 0;
    CHECK_THROWS_AS(train(TrainingData{X, 1, y}, config), ValidationError);
  }

  TEST_CASE("training subsample cap is seeded") {
    const auto p = ct::random_instance(60, 3, 31);
    SvmConfig config;
    config.max_train = 30;
    const auto a = train(p.data(), config, 9);
    const auto b = train(p.data(), config, 9);
    CHECK(a.support_indices == b.support_indices);
    for (std::size_t idx : a.support_indices) CHECK(idx < 60);
  }

  TEST_CASE("model round-trip") {
    const auto p = ct::two_clusters(2);
    const auto model = train(p.data(), SvmConfig{});
    std::stringstream buf;
    write_model(model, buf);
    const auto back = read_model(buf);
    CHECK(back.coef == model.coef);
    CHECK(back.support_vectors == model.support_vectors);
    CHECK(back.rho == model.rho);
    CHECK(back.gamma == model.gamma);
    std::istringstream junk("nope");
    CHECK_THROWS_AS(read_model(junk), FormatError);
  }

  TEST_CASE("cross-validation on separable data") {
    const auto f = ct::as_cv_fixture(ct::separable_gaussians(200, 8, 1), 1);
    const auto folds = kfold(f.dataset, 5, 1);
    const auto r = cross_validate(f.dataset, folds, f.embeddings, SvmConfig{}, 2);
    CHECK(r.mean >= 95.0);
    CHECK(r.fold_accuracies.size() == 5);
    CHECK(r.cell().find(" ± ") != std::string::npos);
    CHECK(cv_result_from_json(cv_result_to_json(r)).fold_accuracies == r.fold_accuracies);
  }

  TEST_CASE("cross-validation on shuffled labels is at chance") {
    // One 200-point run has a standard deviation near 4.5 points, so the
    // chance level is estimated over ten independent shuffles.
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto f = ct::as_cv_fixture(ct::shuffled_labels(200, 8, seed), seed);
      total += cross_validate(f.dataset, kfold(f.dataset, 5, seed), f.embeddings, SvmConfig{}).mean;
    }
    const double mean = total / 10;
    CHECK(mean >= 45.0);
    CHECK(mean <= 55.0);
  }

  TEST_CASE("cross-validation is independent of the job count") {
    const auto f = ct::as_cv_fixture(ct::random_instance(60, 4, 5), 5);
    const auto folds = kfold(f.dataset, 5, 5);
    const auto one = cross_validate(f.dataset, folds, f.embeddings, SvmConfig{}, 1);
    const auto many = cross_validate(f.dataset, folds, f.embeddings, SvmConfig{}, 5);
    CHECK(one.fold_accuracies == many.fold_accuracies);
    CHECK(cv_result_to_json(one) == cv_result_to_json(many));
  }

  TEST_CASE("cross-validation names missing embeddings") {
    auto f = ct::as_cv_fixture(ct::separable_gaussians(20, 2, 3), 3);
    std::vector<std::string> ids = f.embeddings.ids();
    std::vector<float> values = f.embeddings.values();
    ids.erase(ids.begin() + 4);
    values.erase(values.begin() + 8, values.begin() + 10);
    const EmbeddingMatrix partial(ids, 2, values);
    try {
      cross_validate(f.dataset, kfold(f.dataset, 5, 3), partial, SvmConfig{});
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("p:00004") != std::string::npos);
    }
  }
}
