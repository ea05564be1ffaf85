#include <doctest.h>

#include <random>

#include "swarmsync/graph.hpp"

using namespace swarmsync;

namespace {

Topology make(int n, std::initializer_list<std::pair<int, int>> undirected_edges,
              std::initializer_list<int> leader_links) {
  Topology t;
  t.adjacency = MatrixXd::Zero(n, n);
  for (auto [a, b] : undirected_edges) {
    t.adjacency(a, b) = 1.0;
    t.adjacency(b, a) = 1.0;
  }
  t.leader_weights = VectorXd::Zero(n);
  for (int i : leader_links) t.leader_weights(i) = 1.0;
  return t;
}

// The four switching topologies of the reference scenario (unit weights,
// undirected follower edges, agents 0-based).
std::vector<Topology> figure_topologies() {
  return {
      make(5, {{0, 1}, {0, 4}, {0, 2}, {1, 2}, {3, 4}, {4, 2}, {1, 3}}, {0, 4}),
      make(5, {{0, 1}, {1, 2}, {0, 3}, {0, 4}, {4, 3}, {1, 3}, {2, 4}}, {0, 4}),
      make(5, {{0, 4}, {0, 1}, {2, 4}, {3, 4}, {1, 2}, {1, 3}}, {0, 4}),
      make(5, {{0, 1}, {2, 3}, {0, 4}, {0, 2}, {1, 4}, {1, 3}, {1, 2}, {3, 4}}, {0, 4}),
  };
}

// Random leader-rooted digraph: spanning arborescence from the leader plus
// random extra directed edges with random positive weights.
Topology random_leader_rooted(std::mt19937& rng, int max_n = 8) {
  std::uniform_int_distribution<int> nd(1, max_n);
  std::uniform_real_distribution<double> wd(0.2, 2.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const int n = nd(rng);
  Topology t;
  t.adjacency = MatrixXd::Zero(n, n);
  t.leader_weights = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> pd(0, i);
    const int parent = pd(rng); // 0 = leader, else follower parent-1
    if (parent == 0)
      t.leader_weights(i) = wd(rng);
    else
      t.adjacency(i, parent - 1) = wd(rng);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && ud(rng) < 0.3) t.adjacency(i, j) = wd(rng);
  return t;
}

// Reachability oracle via boolean matrix powers over the augmented graph.
bool reachable_oracle(const Topology& t) {
  const int n = t.n_agents();
  MatrixXd reach = MatrixXd::Zero(n + 1, n + 1); // node 0 = leader
  for (int i = 0; i < n; ++i) {
    if (t.leader_weights(i) > 0) reach(0, i + 1) = 1;
    for (int j = 0; j < n; ++j)
      if (t.adjacency(i, j) > 0) reach(j + 1, i + 1) = 1;
  }
  MatrixXd closure = reach + MatrixXd::Identity(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) {
    closure = closure * closure;
    closure = (closure.array() > 0).cast<double>();
  }
  for (int i = 1; i <= n; ++i)
    if (closure(0, i) == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("build_matrices: empty two-agent graph gives zero Laplacian") {
  Topology t = make(2, {}, {});
  const auto m = build_matrices(t);
  CHECK(m.L.isZero(0.0));
  CHECK(m.D.isZero(0.0));
  CHECK(m.B.isZero(0.0));
}

TEST_CASE("build_matrices: unit path 1-2-3") {
  Topology t = make(3, {{0, 1}, {1, 2}}, {});
  const auto m = build_matrices(t);
  MatrixXd expected(3, 3);
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK((m.L - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_matrices: first reference topology degree counts") {
  const auto topos = figure_topologies();
  const auto m = build_matrices(topos[0]);
  VectorXd expected(5);
  expected << 3, 3, 3, 2, 3;
  CHECK((m.D.diagonal() - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(topos[0].leader_weights(0) == 1.0);
  CHECK(topos[0].leader_weights(4) == 1.0);
}

TEST_CASE("Laplacian rows sum to zero exactly") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Topology t = random_leader_rooted(rng);
    const auto m = build_matrices(t);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < t.n_agents(); ++i)
      CHECK(std::abs(m.L.row(i).sum()) <= t.n_agents() * eps * (1.0 + m.D(i, i)));
  }
}

TEST_CASE("check_leader_rooted basics") {
  Topology chain = make(2, {}, {});
  chain.leader_weights(0) = 1.0;
  chain.adjacency(1, 0) = 1.0; // agent 2 listens to agent 1
  CHECK(check_leader_rooted(chain));

  const Topology isolated = make(2, {}, {});
  CHECK_FALSE(check_leader_rooted(isolated));

  for (const auto& t : figure_topologies()) CHECK(check_leader_rooted(t));
}

TEST_CASE("check_leader_rooted agrees with matrix-power oracle (N <= 4)") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::uniform_int_distribution<int> nd(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = nd(rng);
    Topology t;
    t.adjacency = MatrixXd::Zero(n, n);
    t.leader_weights = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (ud(rng) < 0.3) t.leader_weights(i) = 1.0;
      for (int j = 0; j < n; ++j)
        if (i != j && ud(rng) < 0.35) t.adjacency(i, j) = 1.0;
    }
    CHECK(check_leader_rooted(t) == reachable_oracle(t));
  }
}

TEST_CASE("coupling_matrix examples") {
  Topology single = make(1, {}, {0});
  const MatrixXd c1 = coupling_matrix(single, 1.0, 1.0);
  CHECK(c1(0, 0) == doctest::Approx(1.0));

  Topology chain = make(2, {}, {});
  chain.leader_weights(0) = 1.0;
  chain.adjacency(1, 0) = 1.0;
  const MatrixXd c2 = coupling_matrix(chain, 1.0, 1.0);
  MatrixXd expected(2, 2);
  expected << 1, 0, -1, 1;
  CHECK((c2 - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c2.determinant() == doctest::Approx(1.0));

  const Topology zero = make(2, {}, {});
  CHECK_THROWS_AS(coupling_matrix(zero, 1.0, 1.0), SingularCoupling);
}

TEST_CASE("leader-rooted implies nonsingular coupling for any positive gains") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> gd(0.05, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    Topology t = random_leader_rooted(rng);
    if (!check_leader_rooted(t)) continue;
    CHECK_NOTHROW(coupling_matrix(t, gd(rng), gd(rng)));
  }
}

TEST_CASE("graph_lyapunov examples") {
  Topology single = make(1, {}, {0});
  const GraphLyapunov g1 = graph_lyapunov(single, 1.0, 1.0);
  CHECK(g1.q(0) == doctest::Approx(1.0));
  CHECK(g1.P(0, 0) == doctest::Approx(1.0));
  CHECK(g1.Q(0, 0) == doctest::Approx(2.0));

  Topology chain = make(2, {}, {});
  chain.leader_weights(0) = 1.0;
  chain.adjacency(1, 0) = 1.0;
  const GraphLyapunov g2 = graph_lyapunov(chain, 1.0, 1.0);
  CHECK(g2.q(0) == doctest::Approx(1.0));
  CHECK(g2.q(1) == doctest::Approx(2.0));
  CHECK(g2.P(1, 1) == doctest::Approx(0.5));
  MatrixXd expected(2, 2);
  expected << 2, -0.5, -0.5, 1;
  CHECK((g2.Q - expected).cwiseAbs().maxCoeff() < 1e-14);

  const GraphLyapunov g3 = graph_lyapunov(figure_topologies()[0], 1.0, 1.0);
  CHECK(g3.q_min_eig > 0.0);
}

TEST_CASE("graph_lyapunov residual and positivity over random leader-rooted graphs") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const Topology t = random_leader_rooted(rng);
    const MatrixXd coupling = coupling_matrix(t, 1.0, 1.0);
    const GraphLyapunov g = graph_lyapunov(t, 1.0, 1.0);
    const MatrixXd residual = g.P * coupling + coupling.transpose() * g.P - g.Q;
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(g.q_min_eig > 0.0);
  }
}

TEST_CASE("active_index counting and right-continuity") {
  SwitchingSchedule one;
  one.switch_times = {0.0};
  one.topology_ids = {0};
  CHECK(active_index(one, 5.0) == std::pair<int, int>{0, 0});

  SwitchingSchedule s = SwitchingSchedule::periodic(0.0, 20.0, 5.0, 4);
  CHECK(active_index(s, 12.0) == std::pair<int, int>{2, 2});
  // Right continuity at a switch instant.
  CHECK(active_index(s, 10.0).first == 2);
  CHECK(active_index(s, 10.0 - 1e-9).first == 1);

  SwitchingSchedule sec5 = SwitchingSchedule::periodic(0.0, 40.0, 5.0, 4);
  const auto [id, count] = active_index(sec5, 21.0);
  CHECK(id == 0); // first topology active again
  CHECK(count == 4);

  int prev = 0;
  for (double t = 0.0; t <= 39.0; t += 0.37) {
    const int c = active_index(sec5, t).second;
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("algebraic_connectivity") {
  CHECK(algebraic_connectivity(make(2, {}, {})) == doctest::Approx(0.0));
  CHECK(algebraic_connectivity(make(2, {{0, 1}}, {})) == doctest::Approx(2.0));
  CHECK(algebraic_connectivity(make(3, {{0, 1}, {1, 2}}, {})) == doctest::Approx(1.0));
}

TEST_CASE("topology validation rejects bad input") {
  Topology t = make(2, {{0, 1}}, {0});
  t.adjacency(0, 0) = 0.5;
  CHECK_THROWS_AS(build_matrices(t), ValidationError);
  Topology neg = make(2, {{0, 1}}, {0});
  neg.adjacency(0, 1) = -1.0;
  CHECK_THROWS_AS(build_matrices(neg), ValidationError);
}
