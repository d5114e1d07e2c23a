#include <doctest.h>

#include <functional>
#include <set>

#include "csikit/clustering.hpp"
#include "csikit/errors.hpp"
#include "csikit/rng.hpp"
#include "oracles.hpp"

using namespace csikit;

namespace {

errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return errc::io_error;
}

}  // namespace

TEST_CASE("kmeans: k = N on distinct rows gives zero inertia") {
  Rng rng(1);
  auto fm = oracles::make_fm(oracles::random_matrix(rng, 12, 3));
  ClusterAssignment a = kmeans(fm, 12, 7);
  CHECK(a.k == 12);
  CHECK(*a.inertia == 0.0);
  std::set<int> distinct(a.labels.begin(), a.labels.end());
  CHECK(distinct.size() == 12);
}

TEST_CASE("kmeans: k = 1 centroid is the column mean") {
  Rng rng(2);
  Matrix pts = oracles::random_matrix(rng, 20, 2);
  auto fm = oracles::make_fm(pts);
  ClusterAssignment a = kmeans(fm, 1, 3);
  CHECK(a.k == 1);

  std::vector<double> mean(2, 0.0);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t d = 0; d < 2; ++d) mean[d] += pts(i, d);
  for (double& v : mean) v /= 20.0;
  double scatter = 0.0;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t d = 0; d < 2; ++d) scatter += (pts(i, d) - mean[d]) * (pts(i, d) - mean[d]);
  CHECK(*a.inertia == doctest::Approx(scatter).epsilon(1e-12));
}

TEST_CASE("kmeans: recovers well-separated blobs exactly") {
  Rng rng(3);
  auto blobs = oracles::make_blobs(rng, {{0, 0}, {10, 0}, {0, 10}}, {20, 15, 10}, 0.1);
  ClusterAssignment a = kmeans(oracles::make_fm(blobs.points), 3, 11);
  CHECK(a.k == 3);
  CHECK(oracles::same_partition(a.labels, blobs.labels));
  // labels ordered by descending cluster size
  auto sizes = a.cluster_sizes();
  CHECK(sizes == std::vector<std::size_t>{20, 15, 10});
}

TEST_CASE("kmeans: inertia trace is non-increasing") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    const std::size_t n = 10 + rng.uniform_index(40);
    const std::size_t d = 1 + rng.uniform_index(4);
    auto fm = oracles::make_fm(oracles::random_matrix(rng, n, d));
    ClusterAssignment a = kmeans(fm, 3, seed);
    REQUIRE(!a.inertia_trace.empty());
    for (std::size_t i = 1; i < a.inertia_trace.size(); ++i)
      CHECK(a.inertia_trace[i] <= a.inertia_trace[i - 1] + 1e-9 * (1.0 + a.inertia_trace[i - 1]));
    CHECK(*a.inertia == a.inertia_trace.back());
  }
}

TEST_CASE("kmeans: deterministic for a fixed seed") {
  Rng rng(4);
  auto fm = oracles::make_fm(oracles::random_matrix(rng, 30, 3));
  ClusterAssignment a = kmeans(fm, 4, 99);
  ClusterAssignment b = kmeans(fm, 4, 99);
  CHECK(a.labels == b.labels);
  CHECK(*a.inertia == *b.inertia);
}

TEST_CASE("kmeans: parameter errors") {
  Rng rng(5);
  auto fm = oracles::make_fm(oracles::random_matrix(rng, 8, 2));
  CHECK(code_of([&] { kmeans(fm, 0, 0); }) == errc::k_out_of_range);
  CHECK(code_of([&] { kmeans(fm, 9, 0); }) == errc::k_out_of_range);

  Matrix identical(5, 2, 1.5);
  auto dup = oracles::make_fm(identical);
  CHECK(code_of([&] { kmeans(dup, 2, 0); }) == errc::degenerate_input);
  CHECK(kmeans(dup, 1, 0).k == 1);

  KmeansOptions bad;
  bad.restarts = 0;
  CHECK(code_of([&] { kmeans(fm, 2, 0, bad); }) == errc::invalid_params);
}

TEST_CASE("kmeans: metadata echo") {
  Rng rng(6);
  auto fm = oracles::make_fm(oracles::random_matrix(rng, 10, 2));
  KmeansOptions opts;
  opts.restarts = 5;
  opts.max_iter = 50;
  ClusterAssignment a = kmeans(fm, 2, 42, opts);
  CHECK(a.params.at("restarts") == 5.0);
  CHECK(a.params.at("max_iter") == 50.0);
  CHECK(a.params.at("requested_k") == 2.0);
  CHECK(a.seed.value() == 42);
}
