#include <thread>

#include "support.hpp"
#include "pmw/wrenchspace.hpp"

namespace pmw {
namespace {

bool same_polygon(const ScalingPolygon& a, const ScalingPolygon& b) {
  if (a.polygon.vertices.size() != b.polygon.vertices.size() || a.directions != b.directions) return false;
  for (std::size_t k = 0; k < a.polygon.vertices.size(); ++k)
    if (a.polygon.vertices[k] != b.polygon.vertices[k]) return false;
  return true;
}

TEST(ThreadedSweep, MatchesTheSingleThreadedSweepBitwise) {
  const auto st = test::solve(test::modified_scene());
  const auto v = solve_virtual_masses(st.grasp_system());
  const TorqueBox box(4.2);
  for (auto choice : {InverseChoice::Unweighted, InverseChoice::Equilibrating, InverseChoice::Manipulating}) {
    for (std::size_t n : {3u, 17u, 720u, 1001u}) {
      const auto ref = polygon_scaling_method(st, box, 0.0, n, choice, &v, 1);
      for (unsigned threads : {2u, 3u, 8u, 64u})
        EXPECT_TRUE(same_polygon(ref, polygon_scaling_method(st, box, 0.0, n, choice, &v, threads)))
            << to_string(choice) << " n=" << n << " threads=" << threads;
    }
  }
}

TEST(SharedState, ConcurrentSynthesisMatchesSequential) {
  const auto st = test::solve(test::nominal_scene());
  const auto v = solve_virtual_masses(st.grasp_system());
  std::mt19937_64 rng(61);
  std::vector<PlanarWrench> wrenches;
  for (int i = 0; i < 400; ++i) wrenches.emplace_back(test::random_matrix(rng, 3, 1, 30.0));

  std::vector<Vector> expected;
  for (const auto& h : wrenches) {
    Vector all(18);
    all << min_torque_norm(st, h).tau, equilibrating_torques(st, h).tau, manipulating_torques(st, v, h).tau;
    expected.push_back(all);
  }

  constexpr unsigned kThreads = 8;
  std::vector<Vector> got(wrenches.size());
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < kThreads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < wrenches.size(); i += kThreads) {
        Vector all(18);
        all << min_torque_norm(st, wrenches[i]).tau, equilibrating_torques(st, wrenches[i]).tau,
            manipulating_torques(st, v, wrenches[i]).tau;
        got[i] = all;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < wrenches.size(); ++i) EXPECT_EQ(got[i], expected[i]) << i;
}

TEST(SharedState, ConcurrentSweepsAndZonotopeQueries) {
  const auto st = test::solve(test::nominal_scene());
  const TorqueBox box(4.2);
  const auto ref = polygon_scaling_method(st, box, 0.0, 360, InverseChoice::Equilibrating);
  const auto z = feasible_zonotope(st, box);
  std::mt19937_64 rng(62);
  const Matrix probe = test::random_matrix(rng, 3, 300, 30.0);
  const auto depth = z.signed_depth_batch(probe);

  std::vector<int> ok(6, 0);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < ok.size(); ++t) {
    pool.emplace_back([&, t] {
      bool good = true;
      for (int rep = 0; rep < 5; ++rep) {
        good = good && same_polygon(ref, polygon_scaling_method(st, box, 0.0, 360, InverseChoice::Equilibrating, nullptr,
                                                                 static_cast<unsigned>(t % 3 + 1)));
        good = good && z.signed_depth_batch(probe) == depth;
      }
      ok[t] = good ? 1 : 0;
    });
  }
  for (auto& th : pool) th.join();
  for (int v : ok) EXPECT_EQ(v, 1);
}

}  // namespace
}  // namespace pmw
