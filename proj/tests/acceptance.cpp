// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "approxwidths/approxwidths.hpp"
#include "oracles.hpp"

using namespace approxwidths;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream note;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) note << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

VectorXd gaussian(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  VectorXd v(d);
  for (Index i = 0; i < d; ++i) v(i) = g(rng);
  return v;
}

std::vector<Element> columns(const MatrixXd& X) {
  std::vector<Element> out;
  for (Index j = 0; j < X.cols(); ++j) out.push_back(Element::seq_lp(X.col(j), 2.0));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Scheme catalog used by the random suites.
std::vector<Scheme> catalog() {
  std::mt19937_64 rng(99);
  MatrixXd B(10, 10);
  for (Index j = 0; j < 10; ++j) B.col(j) = gaussian(10, rng);
  return {Scheme::poly_sup(make_grid(Grid::chebyshev(-1.0, 1.0, 65))),
          Scheme::trig_l2(make_grid(Grid::uniform(0.0, 2.0 * std::numbers::pi, 65))),
          Scheme::nterm_lp(1.5, 12), Scheme::subspace_chain(B)};
}

Element random_element(const Scheme& s, std::mt19937_64& rng) {
  if (s.kind() == SchemeKind::poly_sup || s.kind() == SchemeKind::trig_l2) {
    // smooth-ish samples: random low-frequency sums plus a kink
    const VectorXd& t = s.grid()->nodes();
    std::normal_distribution<double> g;
    VectorXd v = VectorXd::Zero(t.size());
    for (int j = 1; j <= 6; ++j) v += (g(rng) / j) * (double(j) * t.array() + g(rng)).sin().matrix();
    v += 0.3 * g(rng) * (t.array() - t.mean()).abs().matrix();
    return s.make_element(std::move(v));
  }
  return s.make_element(gaussian(s.ambient_dimension(), rng));
}

void criterion1(Check& c) {
  std::mt19937_64 rng(101);
  const auto schemes = catalog();
  std::uniform_int_distribution<int> size(1, 4);
  double worst = 0.0;
  for (int f = 0; f < 50; ++f) {
    const Scheme& s = schemes[std::size_t(f) % schemes.size()];
    std::vector<Element> D;
    for (int i = size(rng); i > 0; --i) D.push_back(random_element(s, rng));
    const ErrorProfile prof = error_profile(D, s, 20);
    const auto Q = GeneralizedScheme::classical(s);
    for (Index n = 0; n <= 20; ++n) {
      const double d = gen_kolmogorov_number(D, Q, n).upper;
      worst = std::max(worst, std::abs(d - prof.values(n)));
    }
  }
  c.expect(worst <= 1e-10, "classical reduction deviates by " + fmt(worst));
  c.note << "max |delta_n - alpha_n| = " << fmt(worst);
}

void criterion2(Check& c) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> ratio(0.2, 0.98);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    VectorXd alpha(60);
    double a = std::uniform_real_distribution<double>(0.6, 1.0)(rng);
    for (Index n = 0; n < 60; ++n) {
      alpha(n) = a;
      a *= ratio(rng);
    }
    for (double q : {1.0, 2.0}) {
      const WitnessWeights w = witness_weights(alpha, q);
      double sum = 0.0;
      for (Index n = 0; n < 60; ++n) sum += w.beta.values(n) * std::pow(alpha(n), q);
      worst = std::max(worst, sum);
      c.expect(sum <= 3.0 + 1e-9, "sum b_n alpha_n^q = " + fmt(sum));
      // a unit weight at the first index of every dyadic level reached
      for (int k = 1; k <= w.levels; ++k) {
        Index nk = 0;
        while (alpha(nk) > std::ldexp(1.0, -k)) ++nk;
        c.expect(w.beta.values(nk) == 1.0, "missing unit weight at level " + std::to_string(k));
      }
      c.expect(w.levels >= Index(std::floor(-std::log2(alpha(59)))),
               "dyadic levels stop before the horizon");
      c.expect(w.unit_indices.back() >= 40, "unit weights do not recur up to the horizon");
    }
  }
  c.note << "max weighted sum = " << fmt(worst);
}

void criterion3(Check& c) {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> dim(1, 50);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index d = dim(rng);
    std::vector<double> e(static_cast<std::size_t>(d));
    for (double& v : e) v = std::exp(-8.0 * u(rng)) + 1e-6;
    std::sort(e.begin(), e.end(), std::greater<>());
    const VectorXd eps = Eigen::Map<VectorXd>(e.data(), d);
    const Scheme chain = Scheme::subspace_chain(oracle::random_orthonormal(d, d, rng));
    const Element f = lethargy_witness(eps, chain);
    for (Index k = 0; k < d; ++k)
      worst = std::max(worst, std::abs(best_error(f, chain, k).error - eps(k)));
    worst = std::max(worst, best_error(f, chain, d).error);
  }
  c.expect(worst <= 1e-9, "lethargy deviation " + fmt(worst));
  c.note << "max |E(f,A_k) - eps_k| = " << fmt(worst);
}

void criterion4(Check& c) {
  // a Chebyshev grid of degree 512 (513 extrema nodes, including t = 0)
  auto g = make_grid(Grid::chebyshev(-1.0, 1.0, 513));
  const Scheme s = Scheme::poly_sup(g);
  const Element sq = s.make_element(g->nodes().array().square().matrix());
  const BestApprox r = best_error(sq, s, 1);
  const auto& cert = std::get<AlternationCertificate>(r.certificate);
  c.expect(std::abs(r.error - 0.5) <= 1e-6, "t^2 error " + fmt(r.error));
  c.expect(cert.nodes.size() == 3 && cert.alternates, "alternation certificate");
  for (Index i = 0; i < cert.signed_errors.size(); ++i)
    c.expect(std::abs(std::abs(cert.signed_errors(i)) - r.error) <= 1e-9, "levelled certificate");

  auto g512 = make_grid(Grid::chebyshev(-1.0, 1.0, 512));
  const Scheme s512 = Scheme::poly_sup(g512);
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> deg(1, 20);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Index n = deg(rng);
    const VectorXd coeff = gaussian(n + 1, rng);
    const VectorXd v = chebyshev_vandermonde(*g512, n) * coeff;
    worst = std::max(worst, best_error(s512.make_element(v), s512, n).error);
  }
  c.expect(worst <= 1e-8, "polynomial reproduction error " + fmt(worst));
  const double even = best_error(s512.make_element(g512->nodes().array().square().matrix()), s512, 1).error;
  c.note << "E(t^2, A_1) = " << std::to_string(r.error) << " on 513 nodes (" << std::to_string(even)
         << " on 512, no node at 0), max polynomial error = " << fmt(worst);
}

void criterion5(Check& c) {
  const auto D = columns(MatrixXd::Identity(3, 3));
  const auto Q = GeneralizedScheme::all_subspaces(3);
  const WidthResult w = gen_kolmogorov_number(D, Q, 2, {.seed = 5});
  const double target = 1.0 / std::sqrt(3.0);
  const double sweep = oracle::sphere_sweep_width(MatrixXd::Identity(3, 3), 2, 4000000);
  c.expect(std::abs(w.upper - target) <= 1e-3 && std::abs(w.lower - target) <= 1e-3,
           "delta_2 of the basis = " + fmt(w.upper));
  c.expect(std::abs(w.upper - sweep) <= 1e-3, "disagrees with the sphere sweep " + fmt(sweep));

  const MatrixXd T = VectorXd((VectorXd(3) << 3, 2, 1).finished()).asDiagonal();
  const auto Q3 = GeneralizedScheme::all_subspaces(3);
  const WidthResult d1 = operator_delta(T, Q3, 1);
  const WidthResult d0 = operator_delta(T, Q3, 0);
  c.expect(std::abs(d1.upper - 2.0) <= 1e-3, "delta_1(diag) = " + fmt(d1.upper));
  c.expect(std::abs(d0.upper - 3.0) <= 1e-9, "delta_0(diag) = " + fmt(d0.upper));
  c.expect(std::abs(operator_norm(T, Q3) - d0.upper) <= 1e-9, "norm differs from delta_0");
  c.note << "delta_2 in [" << std::to_string(w.lower) << ", " << std::to_string(w.upper)
         << "], sweep oracle " << std::to_string(sweep);
}

void criterion6(Check& c) {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_gap = 0.0;
  for (int t = 0; t < 20; ++t) {
    MatrixXd X(8, 5);
    for (Index j = 0; j < 5; ++j) {
      const VectorXd v = gaussian(8, rng);
      X.col(j) = v.normalized() * std::pow(u(rng), 1.0 / 8.0);
    }
    const Scheme chain = Scheme::subspace_chain(oracle::random_orthonormal(8, 8, rng));
    const auto D = columns(X);
    const OrderC0Decomposition dec = order_c0_decompose(D, chain, 6, std::nullopt, 1.0);
    c.expect(dec.certified, "decomposition not certified");
    for (const OrderC0Level& l : dec.levels) {
      const int k = int(l.stage);
      c.expect(l.max_atom_norm <= 3.0 * std::ldexp(1.0, -(k - 2)) + 1e-12, "atom bound");
      c.expect(l.max_residual <= std::ldexp(1.0, -2 * k) + 1e-12, "residual bound");
    }
    for (const OrderC0Point& p : dec.points)
      for (Index k = 0; k < p.residual_norms.size(); ++k)
        worst_gap = std::max(worst_gap, std::abs(p.residual_norms(k) - p.reconstruction_errors(k)));
  }
  c.expect(worst_gap <= 1e-9, "reconstruction gap " + fmt(worst_gap));
  c.note << "max |certified - measured residual| = " << fmt(worst_gap);
}

void criterion7(Check& c) {
  std::mt19937_64 rng(707);
  const Scheme trig = Scheme::trig_l2(make_grid(Grid::uniform(0.0, 2.0 * std::numbers::pi, 129)));
  const Scheme chain = Scheme::subspace_chain(oracle::random_orthonormal(40, 30, rng));
  double worst = -kInf, worst_norm = 0.0;
  for (const Scheme* s : {&trig, &chain}) {
    std::vector<Element> fam;
    for (int i = 0; i < 100; ++i) fam.push_back(random_element(*s, rng));
    for (Index k = 0; k <= 30; ++k) {
      const ProjectionDefectReport r = projection_defect(fam, *s, k, 1e-10);
      c.expect(r.holds, "projection inequality fails at k = " + std::to_string(k));
      worst = std::max(worst, r.max_violation);
      if (k >= 1) worst_norm = std::max(worst_norm, std::abs(r.projection_norm - 1.0));
    }
  }
  c.expect(worst_norm <= 1e-9, "|P_k| deviates from 1 by " + fmt(worst_norm));
  c.note << "max violation = " << fmt(worst) << ", max ||P_k| - 1| = " << fmt(worst_norm);
}

void criterion8(Check& c) {
  std::mt19937_64 rng(808);
  const auto schemes = catalog();
  double hom = 0.0;
  for (const Scheme& s : schemes) {
    const double tol = 10.0 * default_tolerance(s);
    for (int t = 0; t < 5; ++t) {
      std::vector<Element> D;
      for (int i = 0; i < 3; ++i) D.push_back(random_element(s, rng));
      const ErrorProfile prof = error_profile(D, s, 20);
      c.expect(prof.monotone(tol), "profile not monotone for " + s.describe());
      const double lam = std::normal_distribution<double>(0.0, 3.0)(rng);
      for (Index n = 0; n <= 20; n += 4) {
        const double e = best_error(D[0], s, n).error;
        const double el = best_error(lam * D[0], s, n).error;
        hom = std::max(hom, std::abs(el - std::abs(lam) * e) / std::max(1.0, std::abs(lam) * e));
      }
    }
  }
  c.expect(hom <= 1e-8, "homogeneity defect " + fmt(hom));

  const auto Q3 = GeneralizedScheme::all_subspaces(3);
  const auto Q5 = GeneralizedScheme::all_subspaces(5);
  for (int t = 0; t < 4; ++t) {
    MatrixXd X3(3, 4), X5(5, 6);
    for (Index j = 0; j < 4; ++j) X3.col(j) = gaussian(3, rng);
    for (Index j = 0; j < 6; ++j) X5.col(j) = gaussian(5, rng);
    c.expect(q_profile(columns(X3), Q3, 3, 1e-6, {.seed = 1}).raw_monotone, "delta-profile in R^3");
    c.expect(q_profile(columns(X5), Q5, 5, 1e-6, {.seed = 1}).raw_monotone, "delta-profile in R^5");
  }

  // subadditivity on the Minkowski sum, widths exact by the sweep
  double slack = kInf;
  for (int t = 0; t < 3; ++t) {
    MatrixXd A(3, 2), B(3, 2);
    for (Index j = 0; j < 2; ++j) {
      A.col(j) = gaussian(3, rng);
      B.col(j) = gaussian(3, rng);
    }
    MatrixXd S(3, 4);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) S.col(2 * i + j) = A.col(i) + B.col(j);
    const auto DA = columns(A), DB = columns(B), DS = columns(S);
    for (Index n = 0; n <= 2; ++n)
      for (Index m = 0; n + m <= 2; ++m) {
        const double lhs = gen_kolmogorov_number(DS, Q3, n + m, {.seed = 2}).lower;
        const double rhs = gen_kolmogorov_number(DA, Q3, n, {.seed = 2}).upper +
                           gen_kolmogorov_number(DB, Q3, m, {.seed = 2}).upper;
        slack = std::min(slack, rhs - lhs);
        c.expect(lhs <= rhs + 1e-3, "subadditivity fails at n = " + std::to_string(n) +
                                        ", m = " + std::to_string(m));
      }
    // the operator analogue is Weyl's inequality
    MatrixXd T1(3, 3), T2(3, 3);
    for (Index j = 0; j < 3; ++j) {
      T1.col(j) = gaussian(3, rng);
      T2.col(j) = gaussian(3, rng);
    }
    for (Index n = 0; n <= 2; ++n)
      for (Index m = 0; n + m <= 2; ++m)
        c.expect(operator_delta(T1 + T2, Q3, n + m).upper <=
                     operator_delta(T1, Q3, n).upper + operator_delta(T2, Q3, m).upper + 1e-3,
                 "operator subadditivity");
  }
  c.note << "homogeneity defect = " << fmt(hom) << ", min subadditivity slack = " << fmt(slack);
}

void criterion9(Check& c) {
  auto g = make_grid(Grid::chebyshev(0.0, std::numbers::pi, 512));
  const Scheme s = Scheme::poly_sup(g);
  std::vector<Element> scaled, plain;
  for (int k = 1; k <= 20; ++k) {
    const VectorXd v = (double(k) * g->nodes().array()).sin().matrix();
    plain.push_back(s.make_element(v));
    scaled.push_back(s.make_element(v / double(k)));
  }
  const double pi = std::numbers::pi;
  VectorXd deltas(4);
  deltas << pi / 20.0, pi / 10.0, pi / 5.0, pi / 2.0;

  const ErrorProfile ps = error_profile(scaled, s, 40);
  const EquicontinuityReport es = equicontinuity_report(scaled, deltas);
  c.expect(ps.values(40) < 1e-3, "sin(kx)/k profile at n = 40 is " + fmt(ps.values(40)));
  double ratio = 0.0;
  for (Index i = 0; i < es.deltas.size(); ++i) ratio = std::max(ratio, es.sup_modulus(i) / es.deltas(i));
  c.expect(ratio <= 1.1, "sup w(f, delta) / delta = " + fmt(ratio));
  c.expect(es.equicontinuous, "sin(kx)/k flagged non-equicontinuous");

  const ErrorProfile pp = error_profile(plain, s, 20);
  const EquicontinuityReport ep = equicontinuity_report(plain, deltas);
  c.expect(!ep.equicontinuous, "sin(kx) not flagged");
  c.expect(pp.values(20) > 0.5, "sin(kx) profile at n = 20 is " + fmt(pp.values(20)));
  c.note << "alpha_40(sin(kx)/k) = " << fmt(ps.values(40)) << ", alpha_20(sin(kx)) = "
         << fmt(pp.values(20)) << ", max w/delta = " << fmt(ratio);
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), got);
  const int st = pclose(f);
  status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

void criterion10(Check& c) {
  const std::string bin = APPROXWIDTHS_BIN, dir = CONFIG_DIR;
  const std::pair<const char*, const char*> runs[] = {
      {"widths", "basis_vectors.json --seed 11"},
      {"axioms", "trig_defect.json"},
      {"hull-check", "random_cloud.json --seed 3"},
      {"widths", "random_cloud.json --output csv"}};
  int count = 0;
  for (const auto& [cmd, args] : runs) {
    const std::string line = bin + " " + cmd + " --config " + dir + "/" + args;
    int s1 = 0, s2 = 0;
    const std::string a = capture(line, s1);
    const std::string b = capture(line, s2);
    c.expect(s1 == 0 && s2 == 0, std::string(cmd) + " exited with " + std::to_string(s1));
    c.expect(!a.empty() && a == b, std::string(cmd) + " reports differ");
    ++count;
  }
  c.note << count << " command pairs byte-identical";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double budget;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> list = {
      {1, 10.0, criterion1}, {2, 1.0, criterion2},  {3, 1.0, criterion3},  {4, 5.0, criterion4},
      {5, 30.0, criterion5}, {6, 5.0, criterion6},  {7, 5.0, criterion7},  {8, 30.0, criterion8},
      {9, 20.0, criterion9}, {10, 5.0, criterion10}};
  bool all = true;
  for (const Criterion& cr : list) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.note << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.budget) {
      c.ok = false;
      c.note << "; over the " << cr.budget << " s budget";
    }
    all = all && c.ok;
    std::printf("criterion %2d: %s (%.2f s) %s\n", cr.id, c.ok ? "PASS" : "FAIL", secs,
                c.note.str().c_str());
  }
  return all ? 0 : 1;
}
