#include <catch2/catch_amalgamated.hpp>

#include <utility>
#include <vector>

#include "ucn/association.hpp"
#include "ucn/oracle.hpp"
#include "ucn/rng.hpp"

using namespace ucn;

namespace {

std::vector<Vec2> cluster(int n, Vec2 at) {
  return std::vector<Vec2>(static_cast<std::size_t>(n), at);
}

std::vector<Vec2> random_users(int n, const GridSpec& grid, Rng& rng) {
  std::vector<Vec2> out;
  const double L = grid.side_len();
  for (int i = 0; i < n; ++i)
    out.push_back({rng.uniform(0.0, L), rng.uniform(0.0, L)});
  return out;
}

}  // namespace

TEST_CASE("multiset tuple counting") {
  REQUIRE(multiset_tuple_count(9, 1) == 9);
  REQUIRE(multiset_tuple_count(9, 2) == 45);   // C(10,2)
  REQUIRE(multiset_tuple_count(16, 3) == 816); // C(18,3)
  REQUIRE(multiset_tuple_count(121, 2) == 7381);
  REQUIRE(multiset_tuple_count(121, 5) == 234531275);
  REQUIRE(multiset_tuple_count(1, 4) == 1);
}

TEST_CASE("single-vehicle search finds the earliest covering point") {
  const GridSpec grid{3, 100.0};
  const ChannelParams params;
  // Four users on the far corner: reachable from six of the nine points,
  // the lexicographically first being x=0, y=2.
  const auto users = cluster(4, {200.0, 200.0});
  const OracleResult r = brute_force_placement(1, grid, users, params);
  REQUIRE(r.best_connected == 4);
  REQUIRE(r.best_xy == std::vector<std::pair<int, int>>{{0, 2}});
  REQUIRE(r.evaluated >= 1);
  REQUIRE(r.evaluated < 9);  // the cover bound pruned the tail
}

TEST_CASE("capacity caps the optimum and stops the search early") {
  const GridSpec grid{3, 100.0};
  const ChannelParams params;  // 20 resource blocks per vehicle
  const auto users = cluster(25, {0.0, 0.0});
  const OracleResult r = brute_force_placement(1, grid, users, params);
  REQUIRE(r.best_connected == 20);
  REQUIRE(r.best_xy == std::vector<std::pair<int, int>>{{0, 0}});
  REQUIRE(r.evaluated == 1);  // first point hits the cap; nothing can beat it
}

TEST_CASE("two vehicles split two separated clusters") {
  const GridSpec grid{5, 100.0};
  const ChannelParams params;
  std::vector<Vec2> users = cluster(12, {0.0, 0.0});
  const auto far = cluster(8, {400.0, 400.0});
  users.insert(users.end(), far.begin(), far.end());

  const OracleResult one = brute_force_placement(1, grid, users, params);
  REQUIRE(one.best_connected == 12);  // no point reaches both corners

  const OracleResult two = brute_force_placement(2, grid, users, params);
  REQUIRE(two.best_connected == 20);
  // Earliest maximizing pair: the origin plus the first point whose disk
  // holds the far cluster.
  REQUIRE(two.best_xy ==
          std::vector<std::pair<int, int>>{{0, 0}, {2, 4}});
}

TEST_CASE("optimum is monotone in the fleet size") {
  const GridSpec grid{4, 100.0};
  const ChannelParams params;
  Rng rng(17);
  for (int scene = 0; scene < 5; ++scene) {
    const auto users = random_users(30, grid, rng);
    int prev = 0;
    for (int k = 1; k <= 3; ++k) {
      const OracleResult r = brute_force_placement(k, grid, users, params);
      REQUIRE(r.best_connected >= prev);
      prev = r.best_connected;
    }
  }
}

TEST_CASE("no node placement beats the exhaustive optimum") {
  const GridSpec grid{4, 100.0};
  const ChannelParams params;
  Rng rng(31);
  for (int scene = 0; scene < 10; ++scene) {
    const auto users = random_users(15, grid, rng);
    const OracleResult r = brute_force_placement(2, grid, users, params);
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<Vec2> pos;
      for (int i = 0; i < 2; ++i)
        pos.push_back(grid.to_meters(rng.uniform_int(grid.m),
                                     rng.uniform_int(grid.m)));
      const AssociationResult a =
          associate(pos, std::vector<std::uint8_t>{1, 1}, users, params);
      REQUIRE(a.connected_total <= r.best_connected);
    }
  }
}

TEST_CASE("reported optimum is reproducible by re-association") {
  const GridSpec grid{4, 100.0};
  const ChannelParams params;
  Rng rng(47);
  for (int scene = 0; scene < 6; ++scene) {
    const auto users = random_users(25, grid, rng);
    const int k = 1 + scene % 3;
    const OracleResult r = brute_force_placement(k, grid, users, params);
    std::vector<Vec2> pos;
    for (const auto& [x, y] : r.best_xy) pos.push_back(grid.to_meters(x, y));
    const AssociationResult a = associate(
        pos, std::vector<std::uint8_t>(static_cast<std::size_t>(k), 1), users,
        params);
    REQUIRE(a.connected_total == r.best_connected);
    // Positions come out as ascending grid indices.
    for (std::size_t i = 1; i < r.best_xy.size(); ++i)
      REQUIRE(r.best_xy[i - 1] <= r.best_xy[i]);
  }
}

TEST_CASE("search is deterministic") {
  const GridSpec grid{4, 100.0};
  const ChannelParams params;
  Rng rng(53);
  const auto users = random_users(20, grid, rng);
  const OracleResult a = brute_force_placement(2, grid, users, params);
  const OracleResult b = brute_force_placement(2, grid, users, params);
  REQUIRE(a.best_connected == b.best_connected);
  REQUIRE(a.best_xy == b.best_xy);
  REQUIRE(a.evaluated == b.evaluated);
}

TEST_CASE("degenerate inputs") {
  const GridSpec grid{3, 100.0};
  const ChannelParams params;

  SECTION("no users") {
    const OracleResult r =
        brute_force_placement(2, grid, std::vector<Vec2>{}, params);
    REQUIRE(r.best_connected == 0);
  }
  SECTION("invalid fleet size") {
    REQUIRE_THROWS_AS(
        brute_force_placement(0, grid, cluster(3, {0, 0}), params),
        std::invalid_argument);
  }
  SECTION("tuple budget guard") {
    REQUIRE_THROWS_AS(
        brute_force_placement(3, grid, cluster(3, {0, 0}), params, 100),
        std::runtime_error);
    // C(11,3) = 165 tuples fit a budget of 165 exactly.
    REQUIRE_NOTHROW(
        brute_force_placement(3, grid, cluster(3, {0, 0}), params, 165));
  }
}
