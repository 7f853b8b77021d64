#include "doctest.h"
#include "oracles.hpp"

#include <numbers>
#include <random>
#include <variant>

#include "approxwidths/schemes.hpp"

using namespace approxwidths;

namespace {

VectorXd gaussian(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  VectorXd v(d);
  for (Index i = 0; i < d; ++i) v(i) = g(rng);
  return v;
}

}  // namespace

TEST_CASE("index zero is the trivial subspace") {
  auto g = make_grid(Grid::chebyshev(-1.0, 1.0, 17));
  const Scheme s = Scheme::poly_sup(g);
  const Element x = s.make_element(g->nodes().array().exp().matrix());
  const auto r = best_error(x, s, 0);
  CHECK(r.error == doctest::Approx(std::exp(1.0)));
  CHECK(norm(r.approximant) == 0.0);
  CHECK(s.dimension(0) == 0);
  CHECK(s.dimension(3) == 4);
}

TEST_CASE("poly_sup best error matches exhaustive search") {
  auto g = make_grid(Grid::uniform(0.0, 1.0, 9));
  const Scheme s = Scheme::poly_sup(g);
  const VectorXd f = (6.0 * g->nodes().array()).sin().matrix();
  for (Index n = 1; n <= 3; ++n) {
    const auto r = best_error(s.make_element(f), s, n);
    CHECK(r.error == doctest::Approx(oracle::brute_minimax(g->nodes(), f, n)).epsilon(1e-9));
    const auto& cert = std::get<AlternationCertificate>(r.certificate);
    CHECK(cert.alternates);
    CHECK(Index(cert.nodes.size()) == n + 2);
  }
  CHECK(s.saturation_index() == 8);
  CHECK(best_error(s.make_element(f), s, 20).error < 1e-9);
  CHECK(best_error(s.make_element(f), s, 20).effective_n == 8);
}

TEST_CASE("nterm best error matches support enumeration") {
  std::mt19937_64 rng(5);
  for (double p : {1.0, 1.5, 2.0, kInf}) {
    const Scheme s = Scheme::nterm_lp(p, 8);
    for (int t = 0; t < 5; ++t) {
      const VectorXd v = gaussian(8, rng);
      for (Index n = 0; n <= 8; ++n) {
        const auto r = best_error(Element::seq_lp(v, p), s, n);
        CHECK(r.error == doctest::Approx(oracle::brute_nterm(v, n, p)).epsilon(1e-12));
      }
    }
    CHECK(s.K(3) == 6);
    CHECK_FALSE(s.is_linear());
  }
}

TEST_CASE("trig_l2 best error equals the weighted least-squares distance") {
  const double a = 0.0, b = 2.0 * std::numbers::pi;
  auto g = make_grid(Grid::uniform(a, b, 65));
  const Scheme s = Scheme::trig_l2(g);
  const VectorXd t = g->nodes();
  const VectorXd f = (t.array() * (b - t.array())).matrix();
  const VectorXd w = oracle::trapezoid(t);
  for (Index n = 1; n <= 6; ++n) {
    const auto r = best_error(s.make_element(f), s, n);
    CHECK(r.error == doctest::Approx(oracle::gram_distance(f, oracle::trig_columns(t, a, b, n), w))
                         .epsilon(1e-9));
    CHECK(std::get<OrthogonalityCertificate>(r.certificate).residual_inner_product_max < 1e-10);
  }
  CHECK(s.dimension(2) == 5);
}

TEST_CASE("subspace chain best error equals the Euclidean distance to the span") {
  std::mt19937_64 rng(9);
  MatrixXd B(6, 3);
  for (Index j = 0; j < 3; ++j) B.col(j) = gaussian(6, rng);
  const Scheme s = Scheme::subspace_chain(B);
  const VectorXd x = gaussian(6, rng);
  for (Index n = 1; n <= 3; ++n) {
    const double e = best_error(Element::seq_lp(x, 2.0), s, n).error;
    CHECK(e == doctest::Approx(oracle::gram_distance(x, B.leftCols(n), VectorXd::Ones(6))));
  }
  MatrixXd dep(3, 2);
  dep << 1, 2, 0, 0, 1, 2;
  CHECK_THROWS_AS(Scheme::subspace_chain(dep), PreconditionError);
}

TEST_CASE("projections") {
  MatrixXd B = MatrixXd::Identity(4, 2);
  const Scheme s = Scheme::subspace_chain(B);
  VectorXd x(4);
  x << 1, 2, 3, 4;
  const Element p = apply_projection(Element::seq_lp(x, 2.0), s, 1);
  CHECK(p.values().isApprox((VectorXd(4) << 1, 0, 0, 0).finished()));
  CHECK(projection_bound(s, 2, 3) == doctest::Approx(1.0));
  CHECK(projection_bound(s, 0, 3) == 0.0);
  CHECK_THROWS_AS(apply_projection(Element::seq_lp(x, 2.0), Scheme::nterm_lp(2.0, 4), 1),
                  PreconditionError);
}

TEST_CASE("incompatible elements are rejected") {
  auto g = make_grid(Grid::uniform(0.0, 1.0, 5));
  const Scheme s = Scheme::poly_sup(g);
  CHECK_THROWS_AS(best_error(Element::seq_lp(VectorXd::Ones(5), 2.0), s, 1), PreconditionError);
  CHECK_THROWS_AS(best_error(Element::seq_lp(VectorXd::Ones(3), 1.0), Scheme::nterm_lp(2.0, 3), 1),
                  PreconditionError);
}

TEST_CASE("axioms hold for every scheme") {
  std::mt19937_64 rng(1);
  auto g = make_grid(Grid::chebyshev(-1.0, 1.0, 33));
  auto tg = make_grid(Grid::uniform(0.0, 2.0 * std::numbers::pi, 34));
  const std::vector<Scheme> schemes = {Scheme::poly_sup(g), Scheme::trig_l2(tg),
                                       Scheme::nterm_lp(1.0, 10),
                                       Scheme::subspace_chain(MatrixXd::Identity(10, 10))};
  for (const auto& s : schemes) {
    std::vector<Element> samples;
    for (int i = 0; i < 3; ++i) {
      VectorXd v = gaussian(s.ambient_dimension(), rng);
      // periodic data: both endpoints carry the same sample
      if (s.kind() == SchemeKind::trig_l2) v(v.size() - 1) = v(0);
      samples.push_back(s.make_element(std::move(v)));
    }
    const auto rep = verify_axioms(s, samples, s.saturation_index(), AxiomOptions{.seed = 4});
    CHECK_MESSAGE(rep.sum_closure.pass, s.describe());
    CHECK_MESSAGE(rep.scaling.pass, s.describe());
    CHECK_MESSAGE(rep.density.pass, s.describe());
  }
}

TEST_CASE("worked examples") {
  const Scheme l2 = Scheme::nterm_lp(2.0, 3);
  const auto r = best_error(Element::seq_lp((VectorXd(3) << 3, -2, 1).finished(), 2.0), l2, 1);
  CHECK(r.error == doctest::Approx(std::sqrt(5.0)));
  CHECK(std::get<SupportCertificate>(r.certificate).support == std::vector<Index>{0});

  auto g = make_grid(Grid::chebyshev(-1.0, 1.0, 201));
  const Scheme poly = Scheme::poly_sup(g);
  const auto sq = best_error(poly.make_element(g->nodes().array().square().matrix()), poly, 1);
  CHECK(sq.error == doctest::Approx(0.5).epsilon(1e-12));
  const auto& cert = std::get<AlternationCertificate>(sq.certificate);
  CHECK(g->node(cert.nodes[0]) == -1.0);
  CHECK(g->node(cert.nodes[1]) == 0.0);
  CHECK(g->node(cert.nodes[2]) == 1.0);

  const Element member = poly.make_element((1.0 + 2.0 * g->nodes().array()).matrix());
  const auto m = best_error(member, poly, 1);
  CHECK(m.error < 1e-12);
  CHECK(distance(m.approximant, member) < 1e-12);

  const Scheme chain = Scheme::subspace_chain(MatrixXd::Identity(3, 3));
  const Element x = Element::seq_lp((VectorXd(3) << 1, 1, 0).finished(), 2.0);
  CHECK(apply_projection(x, chain, 1).values().isApprox(VectorXd::Unit(3, 0)));
  const Element px = apply_projection(x, chain, 2);
  CHECK(distance(apply_projection(px, chain, 2), px) == 0.0);

  auto tg = make_grid(Grid::uniform(0.0, 2.0 * std::numbers::pi, 65));
  const Scheme trig = Scheme::trig_l2(tg);
  for (Index k : {1, 5, 31}) CHECK(projection_bound(trig, k, 1) == doctest::Approx(1.0));
  CHECK(projection_bound(trig, 0) == 0.0);

  const VectorXd s = g->nodes().array().sin().matrix();
  CHECK(best_error(poly.make_element(s), poly, 20).error < 1e-6);
}
