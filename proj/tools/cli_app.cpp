#include "cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "approxwidths/approxwidths.hpp"

namespace approxwidths::cli {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

struct Violation {
  std::string path;
  std::string message;
};

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<Violation> v)
      : std::runtime_error("invalid configuration"), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

// Typed, path-addressed access to the config; problems are collected and
// reported together.
class Reader {
public:
  explicit Reader(const json& root) : root_(root) {}

  const json* at(const std::string& path) const {
    const json* cur = &root_;
    std::size_t pos = 1;
    while (pos <= path.size() && !path.empty()) {
      const std::size_t next = path.find('/', pos);
      const std::string key = path.substr(pos, next == std::string::npos ? std::string::npos
                                                                          : next - pos);
      if (cur->is_array()) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(key);
        } catch (const std::exception&) {
          return nullptr;
        }
        if (idx >= cur->size()) return nullptr;
        cur = &(*cur)[idx];
      } else if (cur->is_object()) {
        auto it = cur->find(key);
        if (it == cur->end()) return nullptr;
        cur = &*it;
      } else {
        return nullptr;
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return cur;
  }

  bool has(const std::string& path) const { return at(path) != nullptr; }

  void fail(const std::string& path, const std::string& message) {
    violations_.push_back({path, message});
  }

  bool object(const std::string& path, bool required) {
    const json* j = at(path);
    if (!j) {
      if (required) fail(path, "required object is missing");
      return false;
    }
    if (!j->is_object()) {
      fail(path, "must be an object");
      return false;
    }
    return true;
  }

  void allow_keys(const std::string& path, std::initializer_list<const char*> keys) {
    const json* j = at(path);
    if (!j || !j->is_object()) return;
    for (auto it = j->begin(); it != j->end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (!known) fail(path + "/" + it.key(), "unknown key");
    }
  }

  std::optional<double> number(const std::string& path, bool required = false) {
    const json* j = at(path);
    if (!j) {
      if (required) fail(path, "required number is missing");
      return std::nullopt;
    }
    if (j->is_string() && (*j == "inf" || *j == "infinity")) return kInf;
    if (!j->is_number()) {
      fail(path, "must be a number");
      return std::nullopt;
    }
    return j->get<double>();
  }

  std::optional<long long> integer(const std::string& path, bool required, long long min) {
    const json* j = at(path);
    if (!j) {
      if (required) fail(path, "required integer is missing");
      return std::nullopt;
    }
    if (!j->is_number_integer()) {
      fail(path, "must be an integer");
      return std::nullopt;
    }
    const long long v = j->get<long long>();
    if (v < min) {
      fail(path, "must be >= " + std::to_string(min));
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::string> string(const std::string& path, bool required,
                                    std::initializer_list<const char*> allowed = {}) {
    const json* j = at(path);
    if (!j) {
      if (required) fail(path, "required string is missing");
      return std::nullopt;
    }
    if (!j->is_string()) {
      fail(path, "must be a string");
      return std::nullopt;
    }
    std::string v = j->get<std::string>();
    if (allowed.size() > 0) {
      bool ok = false;
      std::string list;
      for (const char* a : allowed) {
        ok = ok || v == a;
        list += std::string(list.empty() ? "" : ", ") + a;
      }
      if (!ok) {
        fail(path, "must be one of: " + list);
        return std::nullopt;
      }
    }
    return v;
  }

  std::optional<std::vector<double>> numbers(const std::string& path, bool required) {
    const json* j = at(path);
    if (!j) {
      if (required) fail(path, "required array is missing");
      return std::nullopt;
    }
    if (!j->is_array()) {
      fail(path, "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j->size(); ++i) {
      if (!(*j)[i].is_number()) {
        fail(path + "/" + std::to_string(i), "must be a number");
        return std::nullopt;
      }
      out.push_back((*j)[i].get<double>());
    }
    return out;
  }

  /// Array of equal-length numeric arrays.
  std::optional<std::vector<std::vector<double>>> table(const std::string& path, bool required) {
    const json* j = at(path);
    if (!j) {
      if (required) fail(path, "required array of arrays is missing");
      return std::nullopt;
    }
    if (!j->is_array() || j->empty()) {
      fail(path, "must be a nonempty array of arrays");
      return std::nullopt;
    }
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < j->size(); ++i) {
      auto row = numbers(path + "/" + std::to_string(i), true);
      if (!row) return std::nullopt;
      if (!out.empty() && row->size() != out.front().size()) {
        fail(path + "/" + std::to_string(i), "length differs from the first entry");
        return std::nullopt;
      }
      if (row->empty()) {
        fail(path + "/" + std::to_string(i), "must be nonempty");
        return std::nullopt;
      }
      out.push_back(std::move(*row));
    }
    return out;
  }

  bool ok() const { return violations_.empty(); }
  void finish() {
    if (!violations_.empty()) throw ConfigError(violations_);
  }

private:
  const json& root_;
  std::vector<Violation> violations_;
};

// Library precondition failure attributed to a config location.
struct LocatedError : std::runtime_error {
  LocatedError(std::string p, const std::string& m) : std::runtime_error(m), path(std::move(p)) {}
  std::string path;
};

template <typename F>
auto at_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const PreconditionError& e) {
    throw LocatedError(path, e.what());
  }
}

VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), Index(v.size()));
}

MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  MatrixXd m(Index(rows.size()), Index(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[std::size_t(i)][std::size_t(j)];
  return m;
}

ojson vec_json(const VectorXd& v) {
  ojson a = ojson::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

template <typename T>
ojson list_json(const std::vector<T>& v) {
  ojson a = ojson::array();
  for (const T& x : v) a.push_back(x);
  return a;
}

ojson row(Index n, std::optional<double> value, double lower, double upper,
          const std::string& method) {
  ojson r;
  r["n"] = n;
  r["value"] = value ? ojson(*value) : ojson(nullptr);
  r["lower"] = lower;
  r["upper"] = upper;
  r["method"] = method;
  return r;
}

ojson exact_row(Index n, double v, const std::string& method) { return row(n, v, v, v, method); }

// Everything a command may need, built from the validated config.
struct Setup {
  SpaceKind kind = SpaceKind::grid_sup;
  GridPtr grid;
  double p = kInf;
  Index dimension = 0;  // seq_lp length (0 while unknown)
  std::vector<Element> family;
  std::optional<Scheme> scheme;
  bool all_subspaces = false;
  std::optional<MatrixXd> op;
  double tol = 1e-6;
  Index horizon = 20;
  std::optional<std::uint64_t> seed;
};

struct Needs {
  bool family = true;
  bool scheme = true;
};

Needs needs_of(const std::string& command, const json& config) {
  Needs n;
  if (command == "net") n.scheme = false;
  if (command == "lethargy") n.family = false;
  if (command == "widths") {
    const bool has_op = config.is_object() && config.contains("operator");
    const bool all = config.is_object() && config.contains("generalized_scheme") &&
                     config["generalized_scheme"].is_object() &&
                     config["generalized_scheme"].value("kind", "") == "all_subspaces";
    n.family = !has_op;
    n.scheme = !all;
  }
  return n;
}

bool randomized(const std::string& command, const json& config) {
  if (command == "axioms" || command == "hull-check") return true;
  if (command == "widths") {
    const bool all = config.is_object() && config.contains("generalized_scheme") &&
                     config["generalized_scheme"].is_object() &&
                     config["generalized_scheme"].value("kind", "") == "all_subspaces";
    const bool has_op = config.is_object() && config.contains("operator");
    return all ? !has_op : has_op;
  }
  return false;
}

Setup build(const std::string& command, const json& config, const Overrides& ov, Reader& rd) {
  Setup st;
  if (!config.is_object()) {
    rd.fail("", "configuration must be a JSON object");
    rd.finish();
  }
  rd.allow_keys("", {"description", "space", "family", "scheme", "generalized_scheme", "operator",
                     "horizon", "tol", "seed", "output", "params"});
  const Needs need = needs_of(command, config);

  if (auto h = rd.integer("/horizon", false, 1)) st.horizon = Index(*h);
  if (ov.horizon) {
    if (*ov.horizon < 1) rd.fail("--horizon", "must be >= 1");
    else st.horizon = Index(*ov.horizon);
  }
  if (auto t = rd.number("/tol")) {
    if (!(*t > 0.0)) rd.fail("/tol", "must be > 0");
    else st.tol = *t;
  }
  if (ov.tol) {
    if (!(*ov.tol > 0.0)) rd.fail("--tol", "must be > 0");
    else st.tol = *ov.tol;
  }
  if (auto s = rd.integer("/seed", false, 0)) st.seed = std::uint64_t(*s);
  if (ov.seed) st.seed = ov.seed;
  if (randomized(command, config) && !st.seed)
    rd.fail("/seed", "a seed is required for randomized searches (config or --seed)");
  rd.string("/output", false, {"json", "csv"});
  if (rd.has("/params") && rd.object("/params", false))
    rd.allow_keys("/params", {"stall_ratio", "norm_bound", "growth_tol", "radius", "q", "eps",
                              "trials", "density_tol", "starts", "descent_iterations",
                              "dual_iterations", "sphere_samples", "depth", "scale", "n",
                              "samples", "member", "n_min", "n_max", "k"});

  // space
  const bool need_space = need.family || need.scheme || rd.has("/space");
  if (need_space && rd.object("/space", true)) {
    rd.allow_keys("/space", {"kind", "domain", "nodes", "nodes_kind", "p", "dimension"});
    auto kind = rd.string("/space/kind", true, {"grid_sup", "grid_lp", "seq_lp"});
    if (kind == "seq_lp") {
      st.kind = SpaceKind::seq_lp;
      st.p = rd.number("/space/p").value_or(2.0);
      if (auto d = rd.integer("/space/dimension", false, 1)) st.dimension = Index(*d);
    } else if (kind) {
      st.kind = *kind == "grid_sup" ? SpaceKind::grid_sup : SpaceKind::grid_lp;
      st.p = st.kind == SpaceKind::grid_sup ? kInf : rd.number("/space/p").value_or(2.0);
      auto dom = rd.numbers("/space/domain", true);
      auto m = rd.integer("/space/nodes", true, 2);
      auto nk = rd.string("/space/nodes_kind", false, {"chebyshev", "uniform"});
      if (dom && dom->size() != 2) rd.fail("/space/domain", "must be [a, b]");
      else if (dom && !((*dom)[0] < (*dom)[1])) rd.fail("/space/domain", "needs a < b");
      if (dom && dom->size() == 2 && (*dom)[0] < (*dom)[1] && m) {
        const double a = (*dom)[0], b = (*dom)[1];
        st.grid = at_path("/space", [&] {
          return make_grid(nk.value_or("chebyshev") == "uniform" ? Grid::uniform(a, b, *m)
                                                                 : Grid::chebyshev(a, b, *m));
        });
      }
    }
    if (!(st.p >= 1.0)) rd.fail("/space/p", "must be >= 1");
  }
  rd.finish();

  // family
  if (need.family && rd.object("/family", true)) {
    rd.allow_keys("/family", {"expression", "k", "values"});
    const bool has_expr = rd.has("/family/expression");
    const bool has_vals = rd.has("/family/values");
    if (has_expr == has_vals) {
      rd.fail("/family", "give exactly one of 'expression' or 'values'");
    } else if (has_vals) {
      if (auto t = rd.table("/family/values", true)) {
        const Index len = Index(t->front().size());
        if (st.kind == SpaceKind::seq_lp) {
          if (st.dimension == 0) st.dimension = len;
          if (len != st.dimension)
            rd.fail("/family/values", "entries must have length " + std::to_string(st.dimension));
        } else if (st.grid && len != st.grid->size()) {
          rd.fail("/family/values",
                  "entries must have one value per grid node (" +
                      std::to_string(st.grid->size()) + ")");
        }
        if (rd.ok()) {
          for (const auto& v : *t) {
            VectorXd x = to_vector(v);
            st.family.push_back(at_path("/family/values", [&] {
              switch (st.kind) {
                case SpaceKind::grid_sup: return Element::grid_sup(st.grid, x);
                case SpaceKind::grid_lp: return Element::grid_lp(st.grid, x, st.p);
                default: return Element::seq_lp(x, st.p);
              }
            }));
          }
        }
      }
    } else {
      auto text = rd.string("/family/expression", true);
      std::vector<double> ks;
      const json* kj = rd.at("/family/k");
      if (!kj) {
        rd.fail("/family/k", "required k-list is missing");
      } else if (kj->is_array()) {
        if (auto v = rd.numbers("/family/k", true)) ks = *v;
      } else if (kj->is_object()) {
        rd.allow_keys("/family/k", {"from", "to", "step"});
        auto from = rd.number("/family/k/from", true);
        auto to = rd.number("/family/k/to", true);
        const double step = rd.number("/family/k/step").value_or(1.0);
        if (!(step > 0.0)) rd.fail("/family/k/step", "must be > 0");
        else if (from && to)
          for (double k = *from; k <= *to + 1e-9 * std::abs(step); k += step) ks.push_back(k);
      } else {
        rd.fail("/family/k", "must be an array or {from, to, step}");
      }
      if (ks.empty() && kj && rd.ok()) rd.fail("/family/k", "empty k-list");
      if (st.kind == SpaceKind::seq_lp && st.dimension == 0)
        rd.fail("/space/dimension", "required for expression families on sequences");
      rd.finish();
      ExprPtr e = at_path("/family/expression", [&] { return parse(*text); });
      if (st.kind == SpaceKind::seq_lp) {
        for (std::size_t j = 0; j < ks.size(); ++j) {
          VectorXd v(st.dimension);
          for (Index i = 0; i < st.dimension; ++i)
            v(i) = at_path("/family/expression",
                           [&] { return evaluate(*e, double(i + 1), ks[j]); });
          st.family.push_back(Element::seq_lp(v, st.p));
        }
      } else {
        st.family = at_path("/family/expression",
                            [&] { return materialize_family(*e, ks, st.grid, st.kind, st.p); });
      }
    }
  }
  rd.finish();

  // generalized scheme
  if (rd.object("/generalized_scheme", false)) {
    rd.allow_keys("/generalized_scheme", {"kind"});
    auto k = rd.string("/generalized_scheme/kind", true, {"classical", "all_subspaces"});
    st.all_subspaces = k == "all_subspaces";
  }

  // operator
  if (rd.has("/operator")) {
    if (auto t = rd.table("/operator", true)) {
      st.op = rows_to_matrix(*t);
      if (!st.op->allFinite()) rd.fail("/operator", "entries must be finite");
    }
  }

  // scheme
  if (need.scheme && rd.object("/scheme", true)) {
    rd.allow_keys("/scheme", {"kind", "basis"});
    auto k = rd.string("/scheme/kind", true, {"poly_sup", "trig_l2", "nterm_lp", "subspace_chain"});
    if (k && *k != "subspace_chain" && rd.has("/scheme/basis"))
      rd.fail("/scheme/basis", "only subspace_chain takes a basis");
    if (k == "poly_sup") {
      if (st.kind != SpaceKind::grid_sup) rd.fail("/scheme/kind", "poly_sup needs a grid_sup space");
      else st.scheme = Scheme::poly_sup(st.grid);
    } else if (k == "trig_l2") {
      if (st.kind != SpaceKind::grid_lp || st.p != 2.0)
        rd.fail("/scheme/kind", "trig_l2 needs a grid_lp space with p = 2");
      else st.scheme = at_path("/scheme", [&] { return Scheme::trig_l2(st.grid); });
    } else if (k == "nterm_lp") {
      if (st.kind != SpaceKind::seq_lp) rd.fail("/scheme/kind", "nterm_lp needs a seq_lp space");
      else if (st.dimension == 0 && !st.op)
        rd.fail("/space/dimension", "unknown sequence length");
      else
        st.scheme = Scheme::nterm_lp(st.p, st.dimension > 0 ? st.dimension : st.op->rows());
    } else if (k == "subspace_chain") {
      if (st.kind != SpaceKind::seq_lp || st.p != 2.0) {
        rd.fail("/scheme/kind", "subspace_chain needs a seq_lp space with p = 2");
      } else {
        const json* b = rd.at("/scheme/basis");
        if (!b || (b->is_string() && *b == "identity")) {
          const Index d = st.dimension > 0 ? st.dimension : (st.op ? st.op->rows() : 0);
          if (d == 0) rd.fail("/space/dimension", "unknown sequence length");
          else st.scheme = Scheme::subspace_chain(MatrixXd::Identity(d, d));
        } else if (auto t = rd.table("/scheme/basis", true)) {
          MatrixXd cols = rows_to_matrix(*t).transpose();
          if (st.dimension > 0 && cols.rows() != st.dimension)
            rd.fail("/scheme/basis", "basis vectors must have length " +
                                         std::to_string(st.dimension));
          else
            st.scheme = at_path("/scheme/basis", [&] { return Scheme::subspace_chain(cols); });
          if (st.dimension == 0) st.dimension = cols.rows();
        }
      }
    }
  }
  if (st.all_subspaces) {
    if (st.kind != SpaceKind::seq_lp || st.p != 2.0)
      rd.fail("/generalized_scheme/kind", "all_subspaces needs a seq_lp space with p = 2");
  }
  rd.finish();
  return st;
}

Index param_index(Reader& rd, const std::string& key, std::optional<Index> fallback,
                  long long min = 0) {
  auto v = rd.integer("/params/" + key, !fallback.has_value(), min);
  return v ? Index(*v) : fallback.value_or(0);
}

ojson report_head(const std::string& command, const std::string& hash, const Setup& st) {
  ojson r;
  r["command"] = command;
  r["version"] = APPROXWIDTHS_VERSION;
  r["config_hash"] = hash;
  r["seed"] = st.seed ? ojson(*st.seed) : ojson(nullptr);
  r["horizon"] = st.horizon;
  ojson tol;
  tol["tol"] = st.tol;
  if (st.scheme) tol["solver"] = default_tolerance(*st.scheme);
  r["tolerances"] = tol;
  if (st.scheme) r["scheme"] = st.scheme->describe();
  return r;
}

ojson run_command(const std::string& command, const Setup& st, Reader& rd, ojson rep) {
  ojson result;
  ojson rows = ojson::array();
  const std::span<const Element> fam(st.family);

  if (command == "profile") {
    CompactnessOptions co;
    co.tol = st.tol;
    if (auto v = rd.number("/params/stall_ratio")) co.stall_ratio = *v;
    if (auto v = rd.number("/params/growth_tol")) co.growth_tol = *v;
    co.norm_bound = rd.number("/params/norm_bound");
    rd.finish();
    const CompactnessReport cr = at_path("/family", [&] {
      return compactness_test(fam, *st.scheme, st.horizon, co);
    });
    result["verdict"] = to_string(cr.verdict);
    result["bounded"] = cr.bounded;
    result["max_norm"] = cr.max_norm;
    result["envelope_growth"] = cr.envelope_growth;
    result["decay_statistic"] = cr.decay_statistic;
    result["stall_ratio"] = co.stall_ratio;
    result["monotone"] = cr.profile.monotone(cr.profile.tolerance);
    result["any_near_best"] = cr.profile.any_near_best;
    result["family_size"] = cr.profile.family_size;
    result["argmax"] = list_json(cr.profile.argmax);
    for (Index n = 0; n <= st.horizon; ++n)
      rows.push_back(row(n, cr.profile.values(n), cr.profile.lower(n), cr.profile.values(n),
                         "exact-reduction"));
  } else if (command == "net") {
    auto radius = rd.number("/params/radius", true);
    rd.finish();
    const NetResult net = at_path("/params/radius", [&] { return epsilon_net(fam, *radius); });
    result["radius"] = net.radius;
    result["count"] = Index(net.centers.size());
    result["centers"] = list_json(net.center_indices);
    result["assignment"] = list_json(net.assignment);
    for (Index i = 0; i < Index(fam.size()); ++i)
      rows.push_back(exact_row(i, net.center_distance(i), "net"));
  } else if (command == "witness-weights") {
    const double q = rd.number("/params/q").value_or(1.0);
    rd.finish();
    const ErrorProfile prof = at_path("/family", [&] {
      return error_profile(fam, *st.scheme, st.horizon);
    });
    const WitnessWeights ww = at_path("/params", [&] { return witness_weights(prof, q); });
    result["q"] = q;
    result["unit_indices"] = list_json(ww.unit_indices);
    result["levels"] = ww.levels;
    result["profile_sum"] = ww.profile_sum;
    result["bound"] = 3.0;
    result["profile"] = vec_json(prof.values);
    for (Index n = 0; n < ww.beta.values.size(); ++n)
      rows.push_back(exact_row(n, ww.beta.values(n), "weight"));
  } else if (command == "lethargy") {
    auto eps = rd.numbers("/params/eps", true);
    rd.finish();
    const VectorXd e = to_vector(*eps);
    const Element f = at_path("/params/eps", [&] { return lethargy_witness(e, *st.scheme); });
    double dev = 0.0;
    for (Index k = 0; k < e.size(); ++k) {
      const double got = best_error(f, *st.scheme, k).error;
      dev = std::max(dev, std::abs(got - e(k)));
      rows.push_back(exact_row(k, got, "exact-reduction"));
    }
    result["target"] = vec_json(e);
    result["witness"] = vec_json(f.values());
    result["max_deviation"] = dev;
  } else if (command == "axioms") {
    AxiomOptions ao;
    ao.seed = *st.seed;
    ao.trials = int(param_index(rd, "trials", 8, 1));
    if (auto v = rd.number("/params/density_tol")) ao.density_tol = *v;
    rd.finish();
    const AxiomReport ar =
        at_path("/family", [&] { return verify_axioms(*st.scheme, fam, st.horizon, ao); });
    const auto check = [](const AxiomCheck& c) {
      ojson o;
      o["pass"] = c.pass;
      o["worst"] = c.worst;
      o["witness"] = c.witness;
      return o;
    };
    result["sum_closure"] = check(ar.sum_closure);
    result["scaling"] = check(ar.scaling);
    result["density"] = check(ar.density);
    result["membership_tol"] = ar.membership_tol;
    result["density_tol"] = ar.density_tol;
    for (Index n = 0; n < ar.density_profile.size(); ++n)
      rows.push_back(exact_row(n, ar.density_profile(n), "relative-error"));
  } else if (command == "widths") {
    WidthOptions wo;
    if (st.seed) wo.seed = *st.seed;
    wo.starts = int(param_index(rd, "starts", wo.starts, 0));
    wo.descent_iterations = int(param_index(rd, "descent_iterations", wo.descent_iterations, 0));
    wo.dual_iterations = int(param_index(rd, "dual_iterations", wo.dual_iterations, 0));
    OperatorOptions oo;
    if (st.seed) oo.seed = *st.seed;
    oo.sphere_samples = param_index(rd, "sphere_samples", oo.sphere_samples, 0);
    const double stall = rd.number("/params/stall_ratio").value_or(0.5);
    rd.finish();
    const GeneralizedScheme Q =
        st.all_subspaces
            ? GeneralizedScheme::all_subspaces(st.op ? st.op->rows() : fam.front().size())
            : GeneralizedScheme::classical(*st.scheme);
    result["generalized_scheme"] = Q.describe();
    if (st.op) {
      result["target"] = "operator";
      result["operator_norm"] = at_path("/operator", [&] { return operator_norm(*st.op, Q); });
      for (Index n = 0; n <= st.horizon; ++n) {
        const WidthResult w = at_path("/operator", [&] { return operator_delta(*st.op, Q, n, oo); });
        ojson r = row(n, w.value, w.lower, w.upper, to_string(w.method));
        r["sampled_lower"] = w.sampled_lower ? ojson(*w.sampled_lower) : ojson(nullptr);
        rows.push_back(r);
      }
    } else {
      result["target"] = "set";
      const QProfile qp =
          at_path("/family", [&] { return q_profile(fam, Q, st.horizon, st.tol, wo, stall); });
      result["verdict"] = q_verdict_string(qp.verdict);
      result["raw_monotone"] = qp.raw_monotone;
      ojson opt = ojson::array();
      for (const WidthResult& w : qp.widths) {
        rows.push_back(row(w.n, w.value, w.lower, w.upper, to_string(w.method)));
        opt.push_back(w.optimizer);
      }
      result["optimizers"] = opt;
    }
  } else if (command == "decompose") {
    const Index depth = param_index(rd, "depth", 6, 1);
    auto scale = rd.number("/params/scale");
    rd.finish();
    const OrderC0Decomposition dec = at_path("/family", [&] {
      return order_c0_decompose(fam, *st.scheme, depth, st.horizon, scale);
    });
    result["scale"] = dec.scale;
    result["depth"] = dec.depth;
    result["certified"] = dec.certified;
    result["coefficient_sum"] = dec.coefficient_sum;
    ojson levels = ojson::array();
    for (const OrderC0Level& l : dec.levels) {
      ojson o;
      o["stage"] = l.stage;
      o["n"] = l.n;
      o["threshold"] = l.threshold;
      o["atom_bound"] = l.atom_bound;
      o["max_atom_norm"] = l.max_atom_norm;
      o["residual_bound"] = l.residual_bound;
      o["max_residual"] = l.max_residual;
      o["max_reconstruction_error"] = l.max_reconstruction_error;
      levels.push_back(o);
      rows.push_back(row(l.stage, l.max_residual, 0.0, l.residual_bound, "order-c0"));
    }
    result["levels"] = levels;
  } else if (command == "hull-check") {
    const Index n = param_index(rd, "n", std::nullopt, 0);
    const Index samples = param_index(rd, "samples", 1000, 0);
    rd.finish();
    const HullReport h = at_path("/scheme", [&] {
      return hull_invariance_check(fam, *st.scheme, n, samples, *st.seed);
    });
    result["n"] = h.n;
    result["vertex_value"] = h.vertex_value;
    result["attained_by"] = h.attained_by;
    result["max_hull_value"] = h.max_hull_value;
    result["samples"] = h.samples;
    result["violations"] = h.violations;
    result["holds"] = h.holds;
    result["tol"] = h.tol;
    rows.push_back(row(n, h.max_hull_value, 0.0, h.vertex_value, "hull-sample"));
  } else if (command == "jackson") {
    const Index member = param_index(rd, "member", 0, 0);
    const Index n_min = param_index(rd, "n_min", 1, 0);
    const Index n_max = param_index(rd, "n_max", st.horizon, 0);
    if (member >= Index(fam.size())) rd.fail("/params/member", "out of range");
    rd.finish();
    const JacksonReport jr = at_path("/params", [&] {
      return jackson_ratio(fam[std::size_t(member)], *st.scheme, n_min, n_max);
    });
    result["member"] = member;
    result["max_ratio"] = jr.max_ratio;
    result["errors"] = vec_json(jr.errors);
    result["moduli"] = vec_json(jr.moduli);
    for (std::size_t i = 0; i < jr.degrees.size(); ++i)
      rows.push_back(exact_row(jr.degrees[i], jr.ratios(Index(i)), "ratio"));
  } else if (command == "projection-defect") {
    const Index k = param_index(rd, "k", std::nullopt, 0);
    rd.finish();
    const ProjectionDefectReport pr = at_path("/scheme", [&] {
      return projection_defect(fam, *st.scheme, k, std::max(st.tol * 1e-4, 1e-12));
    });
    result["k"] = pr.k;
    result["projection_norm"] = pr.projection_norm;
    result["bound_factor"] = pr.bound_factor;
    result["max_ratio"] = pr.max_ratio;
    result["max_violation"] = pr.max_violation;
    result["holds"] = pr.holds;
    result["tol"] = pr.tol;
    for (Index i = 0; i < pr.residuals.size(); ++i)
      rows.push_back(row(i, pr.residuals(i), pr.best_errors(i),
                         pr.bound_factor * pr.best_errors(i), "projection"));
  }
  rep["result"] = std::move(result);
  rep["rows"] = std::move(rows);
  return rep;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_into(const ojson& j, int indent, int depth, std::string& out) {
  const auto pad = [&](int d) {
    if (indent > 0) out += "\n" + std::string(std::size_t(indent * d), ' ');
  };
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",";
        first = false;
        pad(depth + 1);
        out += ojson(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_into(it.value(), indent, depth + 1, out);
      }
      pad(depth);
      out += "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && !v.is_structured();
      out += "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += scalars ? ", " : ",";
        first = false;
        if (!scalars) pad(depth + 1);
        dump_into(v, indent, depth + 1, out);
      }
      if (!scalars) pad(depth);
      out += "]";
      return;
    }
    case ojson::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

std::string to_csv(const ojson& rep) {
  std::string out = "n,value,lower,upper,method\n";
  const auto cell = [](const ojson& v) -> std::string {
    if (v.is_null()) return "";
    if (v.is_number_float()) {
      const std::string s = format_double(v.get<double>());
      return s.front() == '"' ? s.substr(1, s.size() - 2) : s;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  for (const auto& r : rep["rows"])
    out += cell(r["n"]) + "," + cell(r["value"]) + "," + cell(r["lower"]) + "," +
           cell(r["upper"]) + "," + cell(r["method"]) + "\n";
  return out;
}

std::string error_text(const std::string& kind, const std::string& message,
                       const std::vector<Violation>& violations) {
  ojson e;
  e["kind"] = kind;
  e["message"] = message;
  ojson v = ojson::array();
  for (const Violation& x : violations) {
    ojson o;
    o["path"] = x.path;
    o["message"] = x.message;
    v.push_back(o);
  }
  e["violations"] = v;
  ojson root;
  root["error"] = e;
  return dump17(root) + "\n";
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string dump17(const ojson& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  return out;
}

Outcome run(const std::string& command, const json& config, const Overrides& ov,
            const std::string& format) {
  bool known = false;
  for (const auto& c : commands()) known = known || c == command;
  if (!known)
    return {2, error_text("usage", "unknown command '" + command + "'", {{"command", "unknown"}})};
  if (format != "json" && format != "csv")
    return {2, error_text("usage", "output must be json or csv", {{"--output", "invalid"}})};

  std::string hash_input = command + "\n" + config.dump() + "\n";
  if (ov.tol) hash_input += "tol=" + format_double(*ov.tol) + "\n";
  if (ov.horizon) hash_input += "horizon=" + std::to_string(*ov.horizon) + "\n";
  if (ov.seed) hash_input += "seed=" + std::to_string(*ov.seed) + "\n";
  const std::string hash = "fnv1a64:" + fnv1a_hex(hash_input);

  try {
    Reader rd(config);
    Setup st = build(command, config, ov, rd);
    ojson rep = run_command(command, st, rd, report_head(command, hash, st));
    rep["status"] = "ok";
    return {0, format == "csv" ? to_csv(rep) : dump17(rep) + "\n"};
  } catch (const ConfigError& e) {
    return {2, error_text("config", e.what(), e.violations)};
  } catch (const LocatedError& e) {
    return {2, error_text("precondition", e.what(), {{e.path, e.what()}})};
  } catch (const PreconditionError& e) {
    return {2, error_text("precondition", e.what(), {{"", e.what()}})};
  } catch (const SolverError& e) {
    return {1, error_text("solver", e.what(), {})};
  }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Best-approximation profiles, approximation-space norms and Kolmogorov widths",
               "approxwidths"};
  std::string command, config_path, format = "json", out_path;
  std::optional<double> tol;
  std::optional<long long> horizon;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(commands()));
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--output", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol", tol, "Tolerance override");
  app.add_option("--horizon", horizon, "Horizon override");
  app.add_option("--seed", seed, "Seed override");
  app.add_option("--out", out_path, "Write the report to this file instead of stdout");
  app.set_version_flag("--version", std::string(APPROXWIDTHS_VERSION));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    out << error_text("usage", e.what(), {{"argv", e.what()}});
    err << "error: " << e.what() << "\n";
    return 2;
  }

  json config;
  {
    std::ifstream in(config_path);
    if (!in) {
      out << error_text("config", "cannot open config file '" + config_path + "'",
                        {{"--config", "cannot open file"}});
      return 2;
    }
    try {
      config = json::parse(in);
    } catch (const json::parse_error& e) {
      out << error_text("config", std::string("malformed JSON: ") + e.what(),
                        {{"", "byte " + std::to_string(e.byte)}});
      return 2;
    }
  }
  if (format == "json" && config.is_object() && config.contains("output") &&
      config["output"].is_string() && app.count("--output") == 0)
    format = config["output"].get<std::string>();
  if (format != "json" && format != "csv") format = "json";

  Overrides ov{tol, horizon, seed};
  const Outcome res = run(command, config, ov, format);
  if (res.exit_code != 0) {
    out << res.text;
    err << "error: approxwidths " << command << " failed (exit " << res.exit_code << ")\n";
    return res.exit_code;
  }
  if (out_path.empty()) {
    out << res.text;
    return 0;
  }
  const std::filesystem::path target(out_path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << res.text;
    if (!f) {
      err << "error: cannot write " << tmp << "\n";
      return 1;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    err << "error: cannot move report into place: " << ec.message() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace approxwidths::cli
