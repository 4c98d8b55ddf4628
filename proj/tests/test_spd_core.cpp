#include <doctest.h>

#include <cstdio>
#include <random>

#include "spdsc/dataset.hpp"
#include "spdsc/spd.hpp"
#include "test_support.hpp"

using namespace spdsc;
using spdsc::testing::random_spd;

TEST_CASE("validate_spd accepts the identity") {
  const auto m = SpdMatrix::FromDense(Matrix::Identity(3, 3));
  CHECK(m.dim() == 3);
  CHECK(m.mat().isApprox(Matrix::Identity(3, 3)));
}

TEST_CASE("validate_spd rejects indefinite and asymmetric inputs") {
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.0;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(SpdMatrix::FromDense(neg), NotPositiveDefinite);

  Matrix asym(2, 2);
  asym << 2, 1.5, 0.5, 2;
  CHECK_THROWS_AS(SpdMatrix::FromDense(asym), NotSymmetric);
}

TEST_CASE("validate_spd symmetrizes tiny asymmetry") {
  Matrix a(2, 2);
  a << 2, 1 + 1e-12, 1, 2;
  const auto m = SpdMatrix::FromDense(a);
  CHECK(m.mat()(0, 1) == m.mat()(1, 0));
  CHECK(m.mat()(0, 1) == doctest::Approx(1 + 5e-13));
}

TEST_CASE("chol on diagonal matrices") {
  const auto m = SpdMatrix::FromDense(Vector({{4.0, 9.0}}).asDiagonal());
  const CholFactor f = chol(m);
  CHECK(f.lower(0, 0) == doctest::Approx(2.0));
  CHECK(f.lower(1, 1) == doctest::Approx(3.0));
  CHECK(f.logdet == doctest::Approx(std::log(36.0)));

  const CholFactor id = chol(SpdMatrix::FromDense(Matrix::Identity(2, 2)));
  CHECK(id.logdet == doctest::Approx(0.0));
}

TEST_CASE("chol reconstructs random SPD matrices") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = random_spd(rng, 6);
    const CholFactor f = chol(m);
    const Matrix rec = f.lower * f.lower.transpose();
    CHECK((rec - m.mat()).norm() / m.mat().norm() < 1e-12);
  }
}

TEST_CASE("inverse residual and involution") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = random_spd(rng, 5);
    CHECK((m.mat() * m.inverse() - Matrix::Identity(5, 5)).norm() < 1e-9);
    const auto twice = inv(inv(m));
    CHECK((twice.mat() - m.mat()).norm() / m.mat().norm() < 1e-9);
  }
}

TEST_CASE("spectral functions") {
  CHECK(spectral_log(SpdMatrix::FromDense(Matrix::Identity(4, 4))).norm() ==
        doctest::Approx(0.0));

  const auto d = SpdMatrix::FromDense(Vector({{4.0, 16.0}}).asDiagonal());
  const auto root = spectral_sqrt(d);
  CHECK(root.mat()(0, 0) == doctest::Approx(2.0));
  CHECK(root.mat()(1, 1) == doctest::Approx(4.0));

  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = random_spd(rng, 5);
    const auto back = spectral_exp(spectral_log(m));
    CHECK((back.mat() - m.mat()).norm() / m.mat().norm() < 1e-9);
  }
}

TEST_CASE("logdet matches eigenvalue product") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = random_spd(rng, 7);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
    const double expected = es.eigenvalues().array().log().sum();
    CHECK(chol(m).logdet ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("nearest_spd clamps eigenvalues") {
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.0;
  neg(1, 1) = -0.5;
  const auto clamped = nearest_spd(neg, 1e-8);
  CHECK(clamped.mat()(0, 0) == doctest::Approx(1.0));
  CHECK(clamped.mat()(1, 1) == doctest::Approx(1e-8));

  Matrix skew(2, 2);
  skew << 1, 3, 0, 1;
  const auto proj = nearest_spd(skew, 1e-8);
  // Symmetric part [[1, 1.5], [1.5, 1]] has eigenvalues -0.5 and 2.5.
  Eigen::SelfAdjointEigenSolver<Matrix> es(proj.mat());
  CHECK(es.eigenvalues().minCoeff() >= 1e-9);
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(2.5));
}

TEST_CASE("nearest_spd leaves SPD input unchanged and is idempotent") {
  std::mt19937_64 rng(5);
  const auto m = random_spd(rng, 4);
  const auto once = nearest_spd(m.mat(), 1e-8);
  CHECK((once.mat() - m.mat()).norm() < 1e-12);
  const auto twice = nearest_spd(once.mat(), 1e-8);
  CHECK((twice.mat() - once.mat()).norm() <= 1e-12);
}

TEST_CASE("dataset round trip") {
  std::mt19937_64 rng(6);
  Dataset ds;
  ds.dim = 3;
  for (int i = 0; i < 4; ++i) {
    ds.items.push_back({random_spd(rng, 3), "c" + std::to_string(i % 2)});
  }
  const std::string path = "test_roundtrip.json";
  save_dataset(ds, path);
  const Dataset back = load_dataset(path);
  REQUIRE(back.size() == ds.size());
  CHECK(back.dim == ds.dim);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.items[i].mat.mat() == ds.items[i].mat.mat());  // bit exact
    CHECK(back.items[i].label == ds.items[i].label);
  }
  std::remove(path.c_str());
}

TEST_CASE("dataset load rejects bad files") {
  const std::string path = "test_bad.json";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("{\"version\":1,\"dim\":2,\"items\":[{\"label\":null,"
               "\"data\":[1,0,0]}]}",
               f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_dataset(path), DimensionMismatch);
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("{\"version\":1,\"dim\":2,\"items\":[{\"label\":null,"
               "\"data\":[1,0,0,-1]}]}",
               f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_dataset(path), NotPositiveDefinite);
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("not json", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_dataset(path), ParseError);
  std::remove(path.c_str());
}
