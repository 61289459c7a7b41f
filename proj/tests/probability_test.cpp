#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "infocorr/io.hpp"
#include "infocorr/probability.hpp"
#include "test_support.hpp"

using namespace infocorr;
using namespace testsupport;

TEST_CASE("construction validates and renormalizes") {
  Matrix ok(2, 2);
  ok << 0.25, 0.25, 0.25, 0.25;
  CHECK_NOTHROW(JointPmf{ok});

  Matrix neg(2, 2);
  neg << 0.5, 0.5, 0.25, -0.25;
  CHECK_THROWS_AS(JointPmf{neg}, NotNormalized);

  Matrix off(2, 2);
  off << 0.5, 0.5, 0.25, 0.25;  // sums to 1.5
  CHECK_THROWS_AS(JointPmf{off}, NotNormalized);

  Matrix nan(1, 2);
  nan << 0.5, std::nan("");
  CHECK_THROWS_AS(JointPmf{nan}, NotNormalized);

  Matrix close(2, 2);
  close << 0.25, 0.25, 0.25, 0.25 + 5e-13;
  const JointPmf p(close);
  CHECK(p.probs().sum() == doctest::Approx(1.0).epsilon(1e-15));

  Vector badlen(3);
  badlen << 1, 2, 3;
  CHECK_THROWS_AS(JointPmf(ok, badlen, std::nullopt), ShapeMismatch);
}

TEST_CASE("marginals examples") {
  const auto [ux, uy] = marginals(uniform_pmf(2, 2));
  CHECK(ux(0) == doctest::Approx(0.5));
  CHECK(uy(1) == doctest::Approx(0.5));

  Matrix dsbs(2, 2);
  dsbs << 0.45, 0.05, 0.05, 0.45;
  const auto [dx, dy] = marginals(JointPmf(dsbs));
  CHECK(dx(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dx(1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dy(0) == doctest::Approx(0.5).epsilon(1e-14));

  const auto [px, py] = marginals(point_mass(3, 2, 0, 0));
  CHECK(px(0) == 1.0);
  CHECK(px(1) == 0.0);
  CHECK(py(0) == 1.0);
}

TEST_CASE("attach_condition keeps only positive-weight slices") {
  const JointPmf p = uniform_pmf(2, 2);
  Vector one(1);
  one << 1.0;
  CHECK(attach_condition(one, {p}).u_size() == 1);

  Vector half(2);
  half << 0.5, 0.5;
  const ConditionedJoint two = attach_condition(half, {p, p});
  CHECK(two.u_size() == 2);
  // Flattened joint equals P_U (x) P for identical slices.
  const JointPmf flat = flatten(two);
  for (Index c = 0; c < 4; ++c)
    for (Index u = 0; u < 2; ++u)
      CHECK(flat.probs()(c, u) == doctest::Approx(0.5 * 0.25).epsilon(1e-14));

  Vector w3(3);
  w3 << 0.3, 0.0, 0.7;
  std::mt19937_64 rng(7);
  const JointPmf a = random_pmf(2, 2, rng), b = random_pmf(2, 2, rng), c = random_pmf(2, 2, rng);
  const ConditionedJoint dropped = attach_condition(w3, {a, b, c});
  CHECK(dropped.u_size() == 2);
  CHECK(dropped.weight(0) == doctest::Approx(0.3));
  CHECK(dropped.slice(1).probs() == c.probs());

  Vector bad(2);
  bad << 0.6, 0.6;
  CHECK_THROWS_AS(attach_condition(bad, {p, p}), NotNormalized);
  CHECK_THROWS_AS(attach_condition(half, {p, uniform_pmf(3, 2)}), ShapeMismatch);
}

TEST_CASE("flatten preserves all mass") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const ConditionedJoint cj = random_cj(3, 2, 3, rng);
    CHECK(std::abs(flatten(cj).probs().sum() - 1.0) <= 1e-14);
    CHECK(std::abs(mixture(cj).probs().sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("entropy examples") {
  Vector v2(2);
  v2 << 0.5, 0.5;
  CHECK(entropy(v2) == doctest::Approx(1.0).epsilon(1e-14));
  Vector vd(2);
  vd << 1.0, 0.0;
  CHECK(entropy(vd) == 0.0);
  Vector v4 = Vector::Constant(4, 0.25);
  CHECK(entropy(v4) == doctest::Approx(2.0).epsilon(1e-14));

  std::mt19937_64 rng(13);
  for (int t = 0; t < 200; ++t) {
    const Vector v = random_prob_vector(5, rng);
    const double h = entropy(v);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(5.0) + 1e-12);
  }
}

TEST_CASE("mutual information examples") {
  std::mt19937_64 rng(17);
  CHECK(mutual_information(random_product_pmf(3, 4, rng)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mutual_information(identity_coupling(2)) == doctest::Approx(1.0).epsilon(1e-14));

  const JointPmf p = random_pmf(2, 3, rng);
  Vector half(2);
  half << 0.5, 0.5;
  CHECK(mutual_information(attach_condition(half, {p, p})) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("tv distance examples and metric properties") {
  std::mt19937_64 rng(19);
  const JointPmf p = random_pmf(3, 3, rng);
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(point_mass(2, 2, 0, 0), point_mass(2, 2, 1, 1)) == doctest::Approx(1.0));

  CHECK(tv_distance(identity_coupling(2), uniform_pmf(2, 2)) == doctest::Approx(0.5));

  CHECK_THROWS_AS(tv_distance(p, uniform_pmf(2, 2)), ShapeMismatch);

  for (int t = 0; t < 1000; ++t) {
    const JointPmf a = random_pmf(2, 3, rng);
    const JointPmf b = random_pmf(2, 3, rng);
    const JointPmf c = random_pmf(2, 3, rng);
    const double ab = tv_distance(a, b);
    CHECK(ab == tv_distance(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-15);
    CHECK(ab <= tv_distance(a, c) + tv_distance(c, b) + 1e-12);
  }
}

TEST_CASE("I(XY;U) bounded by H(U) on random decompositions") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 1000; ++t) {
    const ConditionedJoint cj = random_cj(2, 2, 3, rng);
    const double mi = mutual_information(cj);
    CHECK(mi >= 0.0);
    CHECK(mi <= entropy(cj.u_weights()) + 1e-10);
  }
}

TEST_CASE("channel validation") {
  Matrix rows(4, 2);
  rows << 1, 0, 0.5, 0.5, 0.25, 0.75, 0, 1;
  CHECK_NOTHROW(Channel(rows, 2, 2));
  rows(0, 0) = 0.9;
  CHECK_THROWS_AS(Channel(rows, 2, 2), NotNormalized);
  rows(0, 0) = 1.0;
  CHECK_THROWS_AS(Channel(rows, 2, 3), ShapeMismatch);
}

TEST_CASE("condition_on_channel splits and renormalizes") {
  Matrix dsbs(2, 2);
  dsbs << 0.45, 0.05, 0.05, 0.45;
  const JointPmf p(dsbs);
  Matrix rows = Matrix::Zero(4, 3);
  rows.col(0).setOnes();  // constant channel; third column unused
  const ConditionedJoint cj = condition_on_channel(p, Channel(rows, 2, 2));
  CHECK(cj.u_size() == 1);
  CHECK(tv_distance(cj.slice(0), p) <= 1e-15);
}

TEST_CASE("serialization round trip is exact on canonical form") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 50; ++t) {
    const JointPmf p = t % 2 == 0 ? random_pmf(3, 2, rng) : random_pmf_with_values(2, 4, rng);
    const nlohmann::json j1 = to_json(p);
    const JointPmf q = joint_pmf_from_json(j1);
    CHECK(q.probs() == p.probs());  // bit identical
    CHECK(to_json(q).dump() == j1.dump());
  }

  std::vector<JointPmf> slices{random_pmf(2, 2, rng), random_pmf(2, 2, rng)};
  Vector w(2);
  w << 0.25, 0.75;
  const ConditionedJoint cj(w, slices);
  const nlohmann::json j = to_json(cj);
  const ConditionedJoint back = conditioned_joint_from_json(j);
  CHECK(to_json(back).dump() == j.dump());
}

TEST_CASE("parser rejects bad records") {
  using nlohmann::json;
  const auto parse = [](const char* text) { return joint_pmf_from_json(json::parse(text)); };

  CHECK_THROWS_AS(parse(R"({"x_labels":["a"],"y_labels":["b"],"probs":[[1.0,null]]})"),
                  ParseError);
  CHECK_THROWS_AS(parse(R"({"x_labels":["a"],"y_labels":["b","c"],"probs":[[1.5,-0.5]]})"),
                  ParseError);
  CHECK_THROWS_AS(parse(R"({"x_labels":["a"],"y_labels":["b","c"],"probs":[[0.5,0.500000002]]})"),
                  ParseError);
  // A 5e-10 deviation is inside the 1e-9 parser tolerance.
  CHECK_NOTHROW(parse(R"({"x_labels":["a"],"y_labels":["b","c"],"probs":[[0.5,0.5000000005]]})"));
  CHECK_THROWS_AS(parse(R"({"x_labels":["a"],"probs":[[1.0]]})"), ParseError);
}

TEST_CASE("product pmf composes independent pairs") {
  std::mt19937_64 rng(31);
  const JointPmf a = random_pmf(2, 2, rng);
  const JointPmf b = random_pmf(2, 2, rng);
  const JointPmf ab = product_pmf(a, b);
  CHECK(ab.x_size() == 4);
  CHECK(ab.probs()(1 * 2 + 0, 0 * 2 + 1) ==
        doctest::Approx(a.probs()(1, 0) * b.probs()(0, 1)).epsilon(1e-15));
  CHECK(std::abs(ab.probs().sum() - 1.0) <= 1e-12);
}

TEST_CASE("simplex projection") {
  Vector v(3);
  v << 0.2, 0.5, 0.3;
  Vector w = v;
  project_to_simplex(w);
  CHECK((w - v).cwiseAbs().maxCoeff() <= 1e-15);

  Vector z(3);
  z << 1.0, 2.0, -1.0;
  project_to_simplex(z);
  CHECK(z.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(z.minCoeff() >= 0.0);
}
