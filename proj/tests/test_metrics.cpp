#include <doctest.h>

#include <algorithm>
#include <random>

#include "adaptens/metrics.hpp"

using namespace adaptens;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("perfect forecast scores zero everywhere") {
  const Vector y = vec({1, 2, 3});
  CHECK(mae(y, y) == 0.0);
  CHECK(rmse(y, y) == 0.0);
  CHECK(mape(y, y) == 0.0);
  CHECK(cvar(y, y, 0.05) == 0.0);
  CHECK(cvar(y, y, 1.0) == 0.0);
}

TEST_CASE("hand-computed small case") {
  const Vector y = vec({1, 1});
  const Vector y_hat = vec({2, 0});
  CHECK(mae(y, y_hat) == doctest::Approx(1.0));
  CHECK(rmse(y, y_hat) == doctest::Approx(1.0));
  CHECK(mape(y, y_hat) == doctest::Approx(100.0));
}

TEST_CASE("mape guard reports the offending rows") {
  const Vector y = vec({0, 1});
  const Vector y_hat = vec({1, 1});
  try {
    mape(y, y_hat);
    FAIL("expected MapeGuardError");
  } catch (const MapeGuardError& e) {
    REQUIRE(e.offending.size() == 1);
    CHECK(e.offending[0] == 0);
  }
}

TEST_CASE("length mismatch is rejected") {
  CHECK_THROWS_AS(mae(vec({1, 2}), vec({1})), std::invalid_argument);
}

TEST_CASE("cvar on tiny cases") {
  const Vector y = vec({0, 0});
  SUBCASE("errors {1,3} at alpha 0.5 keep the worse half") {
    const Vector y_hat = vec({1, 3});
    CHECK(cvar(y, y_hat, 0.5) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(cvar_oracle(y, y_hat, 0.5) == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("alpha 1 is the mae, exactly") {
    const Vector y_hat = vec({1, 3});
    CHECK(cvar(y, y_hat, 1.0) == mae(y, y_hat));
  }
  SUBCASE("constant errors give the constant at every alpha") {
    const Vector y_hat = vec({2, 2});
    for (double alpha : {0.05, 0.15, 0.33, 0.5, 1.0}) {
      CHECK(cvar(y, y_hat, alpha) == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("cvar oracle on its own examples") {
  const Vector y1 = vec({0});
  CHECK(cvar_oracle(y1, vec({2}), 0.4) == doctest::Approx(2.0));
  CHECK(cvar_oracle(y1, vec({2}), 1.0) == doctest::Approx(2.0));
  const Vector y3 = vec({0, 0, 0});
  CHECK(cvar_oracle(y3, vec({0, 0, 5}), 1.0 / 3.0) == doctest::Approx(5.0));
  CHECK(cvar(y3, vec({0, 0, 5}), 1.0 / 3.0) == doctest::Approx(5.0));
}

TEST_CASE("alpha outside (0,1] is rejected") {
  CHECK_THROWS_AS(cvar(vec({1}), vec({0}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cvar(vec({1}), vec({0}), 1.5), std::invalid_argument);
  CHECK_THROWS_AS(cvar_oracle(vec({1}), vec({0}), -0.1), std::invalid_argument);
}

TEST_CASE("closed form equals the optimization oracle on random vectors") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> len(1, 50);
  std::normal_distribution<double> normal(0.0, 2.0);
  const double alphas[] = {0.05, 0.15, 0.33, 1.0};
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    Vector y(n), y_hat(n);
    for (int i = 0; i < n; ++i) {
      y(i) = normal(rng);
      y_hat(i) = normal(rng);
    }
    for (double alpha : alphas) {
      CHECK(std::abs(cvar(y, y_hat, alpha) - cvar_oracle(y, y_hat, alpha)) <=
            1e-9);
    }
    CHECK(cvar(y, y_hat, 1.0) == mae(y, y_hat));
  }
}

TEST_CASE("cvar is monotone non-increasing in alpha") {
  std::mt19937 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y(40), y_hat(40);
  for (Index i = 0; i < 40; ++i) {
    y(i) = normal(rng);
    y_hat(i) = normal(rng);
  }
  double previous = std::numeric_limits<double>::infinity();
  for (double alpha : {0.02, 0.05, 0.15, 0.33, 0.6, 1.0}) {
    const double value = cvar(y, y_hat, alpha);
    CHECK(value <= previous + 1e-12);
    previous = value;
  }
}

TEST_CASE("metrics are permutation invariant") {
  std::mt19937 rng(5);
  std::normal_distribution<double> normal(3.0, 1.0);
  const Index n = 64;
  Vector y(n), y_hat(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = normal(rng);
    y_hat(i) = normal(rng);
  }
  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Vector yp(n), y_hatp(n);
  for (Index i = 0; i < n; ++i) {
    yp(i) = y(perm[static_cast<std::size_t>(i)]);
    y_hatp(i) = y_hat(perm[static_cast<std::size_t>(i)]);
  }
  CHECK(mae(y, y_hat) == doctest::Approx(mae(yp, y_hatp)).epsilon(1e-12));
  CHECK(rmse(y, y_hat) == doctest::Approx(rmse(yp, y_hatp)).epsilon(1e-12));
  CHECK(mape(y, y_hat) == doctest::Approx(mape(yp, y_hatp)).epsilon(1e-12));
  CHECK(cvar(y, y_hat, 0.15) ==
        doctest::Approx(cvar(yp, y_hatp, 0.15)).epsilon(1e-12));
}

TEST_CASE("report invariants and serialization order") {
  std::mt19937 rng(12);
  std::normal_distribution<double> normal(4.0, 1.5);
  Vector y(50), y_hat(50);
  for (Index i = 0; i < 50; ++i) {
    y(i) = normal(rng);
    y_hat(i) = normal(rng);
  }
  const MetricsReport r = evaluate(y, y_hat);
  CHECK(r.rmse >= r.mae);
  CHECK(r.cvar05 >= r.cvar15);
  CHECK(r.cvar15 >= r.mae);
  CHECK(r.n_cases == 50);
  CHECK(MetricsReport::csv_header() ==
        "mae,rmse,mape_percent,cvar05,cvar15,n_cases");
  const std::string json = r.json();
  CHECK(json.find("\"mae\"") < json.find("\"rmse\""));
  CHECK(json.find("\"rmse\"") < json.find("\"mape_percent\""));
  CHECK(json.find("\"cvar05\"") < json.find("\"cvar15\""));
  CHECK(json.find("\"cvar15\"") < json.find("\"n_cases\""));
}
