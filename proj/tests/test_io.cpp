#include "mrfl/io.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace mrfl;

TEST_CASE("graph json round trip") {
  const Graph g = generate(Grid8{3, 4});
  const auto j = io::graph_to_json(g);
  CHECK(j.at("p") == 12);
  CHECK(io::graph_from_json(j) == g);
  CHECK_THROWS(io::graph_from_json(nlohmann::json{{"p", 2}, {"edges", {{0, 2}}}}));
}

TEST_CASE("model json round trip") {
  std::mt19937_64 rng(1);
  const auto m = testing::random_model(rng, 6, 0.5, 0.2, 0.9, 0.4);
  const auto back = io::model_from_json(io::model_to_json(m));
  CHECK(back.graph() == m.graph());
  CHECK(back.couplings() == m.couplings());
  CHECK(back.fields() == m.fields());
  // Parsed through text as well.
  const auto text = io::model_from_json(nlohmann::json::parse(io::model_to_json(m).dump()));
  CHECK(text.couplings() == m.couplings());
}

TEST_CASE("samples csv round trip") {
  const IsingModel m(Graph(3, {{0, 1}, {1, 2}}), {0.5, -0.5}, Eigen::VectorXd::Zero(3));
  const auto s = gibbs_sample(m, 50, 3);
  std::ostringstream os;
  io::write_samples_csv(os, s, 3);
  CHECK(os.str().rfind("# p=3 n=50 seed=3", 0) == 0);
  std::istringstream is(os.str());
  const auto back = io::read_samples_csv(is);
  CHECK(back.spins);
  CHECK(back.alphabet == 2);
  CHECK(back.data == s.data);

  std::istringstream idx("0,2,1\n1,0,0\n");
  const auto three = io::read_samples_csv(idx);
  CHECK_FALSE(three.spins);
  CHECK(three.alphabet == 3);
  CHECK(three.num_samples() == 2);
  std::istringstream wide("0,1\n1,0\n");
  CHECK(io::read_samples_csv(wide, 4).alphabet == 4);
  std::istringstream ragged("0,1\n1\n");
  CHECK_THROWS(io::read_samples_csv(ragged));
}

TEST_CASE("scores csv round trip") {
  const auto sm = score_matrix(xor_triangle(), TestKind::MutualInformation, 1, 1);
  std::ostringstream os;
  io::write_scores_csv(os, sm);
  CHECK(os.str().rfind("i,j,score,S,T\n", 0) == 0);
  std::istringstream is(os.str());
  const auto back = io::read_scores_csv(is);
  CHECK(back.num_nodes() == 3);
  CHECK(back.matrix() == sm.matrix());
  CHECK(back.witness(0, 2).separator == sm.witness(0, 2).separator);
  CHECK(back.witness(0, 2).breaker == sm.witness(0, 2).breaker);
}
