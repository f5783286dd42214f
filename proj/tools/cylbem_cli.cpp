#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cylbem/acceptance.hpp"

using namespace cylbem;

namespace {

struct Options {
  std::string model, out, bc, probes;
  unsigned seed = 7;
  std::map<std::string, double> tol, grid;
};

double opt_or(const std::map<std::string, double>& m, const std::string& k, double fallback) {
  const auto it = m.find(k);
  return it == m.end() ? fallback : it->second;
}

std::map<std::string, double> parse_kv(const std::vector<std::string>& kvs) {
  std::map<std::string, double> m;
  for (const std::string& s : kvs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected NAME=VALUE, got '" + s + "'");
    std::size_t used = 0;
    const double v = std::stod(s.substr(eq + 1), &used);
    if (used != s.size() - eq - 1) throw ConfigError("bad numeric value in '" + s + "'");
    m[s.substr(0, eq)] = v;
  }
  return m;
}

// report sink: a file under --out, or stdout
class Report {
public:
  Report(const Options& o, const std::string& name) {
    if (!o.out.empty()) {
      std::filesystem::create_directories(o.out);
      const std::string path = o.out + "/" + name;
      file_.open(path);
      if (!file_) throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
  std::ofstream file_;
};

Model require_model(const Options& o) {
  if (o.model.empty()) throw ConfigError("--model is required for this subcommand");
  return build_model_from_file(o.model);
}

LayerOperatorSet build_operators(const Model& md, const Eigensystem& es, const Options& o) {
  if (md.region.curves.empty()) throw ConfigError("model has no boundary curves");
  DiscretizeOptions d;
  d.n_closed = static_cast<int>(opt_or(o.grid, "n", 256));
  d.panel = opt_or(o.grid, "panel", d.panel);
  d.graph_halflength = opt_or(o.grid, "L", 20.0);
  d.panel_order = static_cast<int>(opt_or(o.grid, "panel_order", d.panel_order));
  return assemble_operators(make_kernel(es), discretize(md, es, d));
}

// default boundary data: low trig modes on closed curves, a gaussian in the
// axial coordinate on graph curves
Eigen::VectorXd default_data(const Discretization& disc) {
  Eigen::VectorXd f(static_cast<int>(disc.nodes.size()));
  for (int i = 0; i < f.size(); ++i) {
    const BoundaryNode& nd = disc.nodes[i];
    f(i) = disc.patches[nd.patch].n > 0
               ? 1.0 + std::cos(nd.param) + 0.3 * std::sin(2.0 * nd.param)
               : std::exp(-nd.param * nd.param / 8.0);
  }
  return f;
}

std::vector<Vec2> read_probes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open probes file '" + path + "'");
  std::vector<Vec2> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line)
      if (ch == ',' || ch == ';') ch = ' ';
    std::istringstream row(line);
    double x, th;
    if (row >> x >> th) pts.push_back({x, th});
    // a non-numeric first row is treated as a header and skipped
  }
  if (pts.empty()) throw ConfigError("probes file '" + path + "' has no points");
  return pts;
}

// two graph levels, lower first; the cross-section arc of a strip model
std::pair<double, double> arc_of(const Model& md) {
  std::vector<double> levels;
  for (const Curve& c : md.region.curves)
    if (c.kind == Curve::Kind::Graph) levels.push_back(c.level);
  if (levels.size() != 2) throw ConfigError("this subcommand needs a model with two graph curves");
  return {std::min(levels[0], levels[1]), std::max(levels[0], levels[1])};
}

int cmd_spectrum(const Options& o) {
  const Model md = require_model(o);
  const Eigensystem es = compute_eigensystem(md.cyl);
  Report rep(o, "spectrum.csv");
  std::ostream& os = rep.os();
  os.precision(17);
  os << "k,mu,residual\n";
  // residual of the strong equation -phi'' + V phi - mu phi on a dense grid
  const int N = 4096;
  for (int j = 0; j < es.dim; ++j) {
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
      const double th = es.ell * i / N;
      Eigen::VectorXd b;
      detail::trig_basis(es.ell, es.omega, es.mode_cutoff, th, b);
      double phi = 0.0, lap = 0.0;
      for (int k = 0; k < es.dim; ++k) {
        phi += es.U(k, j) * b(k);
        const int kk = (k + 1) / 2;
        lap += es.U(k, j) * (kk * es.omega) * (kk * es.omega) * b(k);
      }
      const double r = lap + (md.cyl.V(th) - es.mu(j)) * phi;
      acc += r * r * es.ell / N;
    }
    os << j << ',' << es.mu(j) << ',' << std::sqrt(acc) << '\n';
  }
  return 0;
}

int cmd_kernel_check(const Options& o) {
  const Model md = require_model(o);
  if (!md.cyl.potential.is_constant())
    throw ConfigError("kernel-check needs a constant potential (independent mode-sum oracle)");
  const double c = md.cyl.potential.mean();
  const Eigensystem es = compute_eigensystem(md.cyl);
  const GreenKernel kern = make_kernel(es);

  const int pairs = static_cast<int>(opt_or(o.grid, "pairs", 500));
  const double gate = opt_or(o.tol, "rel", 1e-10);
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), ut(0.0, es.ell);
  double worst = 0.0;
  int done = 0;
  while (done < pairs) {
    const Vec2 p{ux(rng), ut(rng)}, q{ux(rng), ut(rng)};
    const double dx = std::fabs(p.x - q.x);
    if (cylinder_dist(p, q, es.ell) < 0.1 || dx < 0.05) continue;
    double oracle = std::exp(-std::sqrt(c) * dx) / (2.0 * std::sqrt(c) * es.ell);
    for (int k = 1; k <= 4000; ++k) {
      const double lam = std::sqrt(c + k * es.omega * k * es.omega);
      oracle += 2.0 * std::cos(k * es.omega * (p.theta - q.theta)) * std::exp(-lam * dx) /
                (2.0 * lam * es.ell);
      if (std::exp(-lam * dx) / lam < 1e-18) break;
    }
    const double val = kernel_E(kern, kernel_point(kern, p), kernel_point(kern, q));
    worst = std::max(worst, std::fabs(val - oracle) / std::fabs(oracle));
    ++done;
  }

  Report rep(o, "kernel_check.json");
  json j;
  j["seed"] = o.seed;
  j["pairs"] = pairs;
  j["max_rel_error"] = worst;
  j["gate"] = gate;
  j["pass"] = worst <= gate;
  rep.os() << j.dump(2) << '\n';
  return worst <= gate ? 0 : 2;
}

int cmd_jump_check(const Options& o) {
  const Model md = require_model(o);
  const Eigensystem es = compute_eigensystem(md.cyl);
  const LayerOperatorSet ops = build_operators(md, es, o);
  const int stride = static_cast<int>(opt_or(o.grid, "stride", 16));
  const double gate = opt_or(o.tol, "limit", 1e-4);
  const double tgate = opt_or(o.tol, "total", 1e-4);

  const JumpReport jr = jump_check(ops, default_data(ops.ctx.disc), {1e-1, 3e-2, 1e-2, 3e-3, 1e-3},
                                   stride);
  bool pass = jr.total_double_jump <= tgate && jr.total_dnu_jump <= tgate;
  json rels = json::array();
  for (const JumpRelation& r : jr.relations) {
    pass = pass && r.extrapolated <= gate;
    json e;
    e["relation"] = r.name;
    e["t"] = r.ts;
    e["error"] = r.raw;
    e["order"] = r.order;
    e["extrapolated"] = r.extrapolated;
    rels.push_back(e);
  }
  json j;
  j["seed"] = o.seed;
  j["nodes"] = ops.S.rows();
  j["stride"] = stride;
  j["relations"] = rels;
  j["total_double_jump"] = jr.total_double_jump;
  j["total_dnu_jump"] = jr.total_dnu_jump;
  j["gate"] = gate;
  j["pass"] = pass;
  Report rep(o, "jump_check.json");
  rep.os() << j.dump(2) << '\n';
  return pass ? 0 : 2;
}

int cmd_solve(const Options& o) {
  const Model md = require_model(o);
  const Eigensystem es = compute_eigensystem(md.cyl);
  if (o.probes.empty()) throw ConfigError("--probes is required for solve");
  const std::vector<Vec2> probes = read_probes(o.probes);

  Report rep(o, "solve.csv");
  std::ostream& os = rep.os();
  os.precision(17);
  os << "x,theta,u\n";

  if (o.bc.rfind("mode:xi=", 0) == 0) {
    const double xi = std::stod(o.bc.substr(8));
    const auto [alpha, beta] = arc_of(md);
    const StripFourierSolution sol =
        solve_strip_fourier(es, alpha, beta, {{xi, Eigen::Vector2d(1.0, 0.0)}});
    for (const Vec2& p : probes) os << p.x << ',' << p.theta << ',' << sol.value(p.x, p.theta) << '\n';
    return 0;
  }

  const LayerOperatorSet ops = build_operators(md, es, o);
  Eigen::VectorXd f;
  if (o.bc.rfind("pole:", 0) == 0) {
    double px = 0.0, pth = 0.0;
    if (std::sscanf(o.bc.c_str(), "pole:x=%lf,theta=%lf", &px, &pth) != 2)
      throw ConfigError("expected --bc pole:x=<v>,theta=<v>");
    const PointData pd = kernel_point(ops.ctx.kern, Vec2{px, pth});
    f.resize(static_cast<int>(ops.ctx.disc.nodes.size()));
    for (int i = 0; i < f.size(); ++i) f(i) = kernel_E(ops.ctx.kern, ops.ctx.pdata[i], pd);
  } else if (o.bc.empty() || o.bc == "trig") {
    f = default_data(ops.ctx.disc);
  } else {
    throw ConfigError("unknown --bc '" + o.bc + "' (use mode:xi=V, pole:x=V,theta=V, or trig)");
  }
  const DirichletSolution sol = solve_dirichlet(ops, f);
  for (const Vec2& p : probes) os << p.x << ',' << p.theta << ',' << eval_solution(ops, sol, p) << '\n';
  return 0;
}

int cmd_dtn(const Options& o) {
  const Model md = require_model(o);
  const Eigensystem es = compute_eigensystem(md.cyl);
  const LayerOperatorSet ops = build_operators(md, es, o);
  const double gate = opt_or(o.tol, "quadform", 1e-8);
  const int samples = static_cast<int>(opt_or(o.grid, "samples", 100));
  const DtNReport r = dtn(ops, samples, o.seed);
  json j;
  j["seed"] = o.seed;
  j["nodes"] = r.N.rows();
  j["condition_S"] = r.condition_S;
  j["symmetry_defect"] = r.symmetry_defect;
  j["min_quadform"] = r.min_quadform;
  j["gate"] = gate;
  j["pass"] = r.min_quadform >= -gate;
  Report rep(o, "dtn.json");
  rep.os() << j.dump(2) << '\n';
  return r.min_quadform >= -gate ? 0 : 2;
}

int cmd_tau_sweep(const Options& o) {
  const Model md = require_model(o);
  const Eigensystem es = compute_eigensystem(md.cyl);
  const auto [alpha, beta] = arc_of(md);
  const double lo = opt_or(o.grid, "taumin", -20.0);
  const double hi = opt_or(o.grid, "taumax", 20.0);
  const double step = opt_or(o.grid, "step", 0.5);
  if (!(step > 0) || !(hi > lo)) throw ConfigError("need taumin < taumax and step > 0");
  const SweepResult res = uniform_bound_sweep(es, alpha, beta, lo, hi, step);
  Report rep(o, "tau_sweep.csv");
  write_sweep_csv(rep.os(), res);
  return 0;
}

int cmd_rellich_check(const Options& o) {
  double alpha = 0.0, beta = pi;
  if (!o.model.empty()) {
    const Model md = require_model(o);
    std::vector<double> levels;
    for (const Curve& c : md.region.curves)
      if (c.kind == Curve::Kind::Graph) levels.push_back(c.level);
    if (levels.size() == 2) {
      alpha = std::min(levels[0], levels[1]);
      beta = std::max(levels[0], levels[1]);
    }
  }
  const int trials = static_cast<int>(opt_or(o.grid, "trials", 50));
  const double gate = opt_or(o.tol, "residual", 1e-8);
  std::mt19937 rng(o.seed);
  std::normal_distribution<double> gauss;
  double worst_grad = 0.0, worst_val = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::complex<double>> ac(5), as(5);
    std::vector<double> wc(4), ws(4);
    for (int k = 0; k < 5; ++k) {
      ac[k] = {gauss(rng), gauss(rng)};
      as[k] = {gauss(rng), gauss(rng)};
    }
    for (int k = 0; k < 4; ++k) {
      wc[k] = gauss(rng);
      ws[k] = gauss(rng);
    }
    auto u = [&](double th) {
      std::complex<double> v = 0.0;
      for (int k = 0; k < 5; ++k) v += ac[k] * std::cos(k * th) + as[k] * std::sin(k * th);
      return v;
    };
    auto du = [&](double th) {
      std::complex<double> v = 0.0;
      for (int k = 1; k < 5; ++k)
        v += static_cast<double>(k) * (as[k] * std::cos(k * th) - ac[k] * std::sin(k * th));
      return v;
    };
    auto d2u = [&](double th) {
      std::complex<double> v = 0.0;
      for (int k = 1; k < 5; ++k)
        v -= static_cast<double>(k * k) * (ac[k] * std::cos(k * th) + as[k] * std::sin(k * th));
      return v;
    };
    auto w = [&](double th) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += wc[k] * std::cos(k * th) + ws[k] * std::sin(k * th);
      return v;
    };
    auto dw = [&](double th) {
      double v = 0.0;
      for (int k = 1; k < 4; ++k) v += k * (ws[k] * std::cos(k * th) - wc[k] * std::sin(k * th));
      return v;
    };
    const RellichResult r = rellich_check(alpha, beta, u, du, d2u, w, dw);
    worst_grad = std::max(worst_grad, r.residual_gradient);
    worst_val = std::max(worst_val, r.residual_value);
  }
  const bool pass = worst_grad <= gate && worst_val <= gate;
  json j;
  j["seed"] = o.seed;
  j["trials"] = trials;
  j["arc"] = {alpha, beta};
  j["max_residual_gradient"] = worst_grad;
  j["max_residual_value"] = worst_val;
  j["gate"] = gate;
  j["pass"] = pass;
  Report rep(o, "rellich_check.json");
  rep.os() << j.dump(2) << '\n';
  return pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cylbem: layer potentials and Dirichlet solves on the flat cylinder"};
  app.require_subcommand(1);

  Options o;
  std::vector<std::string> tolv, gridv;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--model", o.model, "model JSON file");
    s->add_option("--out", o.out, "output directory (default: report to stdout)");
    s->add_option("--seed", o.seed, "seed for randomized checks");
    s->add_option("--tol", tolv, "tolerance override NAME=VALUE (repeatable)");
    s->add_option("--grid", gridv, "grid override NAME=VALUE (repeatable)");
    return s;
  };

  auto* sp = add_common(app.add_subcommand("spectrum", "cross-section eigenvalues (CSV)"));
  auto* kc = add_common(app.add_subcommand("kernel-check", "kernel vs independent mode sum"));
  auto* jc = add_common(app.add_subcommand("jump-check", "boundary jump relations (JSON)"));
  auto* sv = add_common(app.add_subcommand("solve", "interior Dirichlet solve at probes (CSV)"));
  sv->add_option("--bc", o.bc, "boundary data: mode:xi=V | pole:x=V,theta=V | trig");
  sv->add_option("--probes", o.probes, "CSV of probe points x,theta");
  auto* dt = add_common(app.add_subcommand("dtn", "Dirichlet-to-Neumann diagnostics (JSON)"));
  auto* ts = add_common(app.add_subcommand("tau-sweep", "uniform-in-tau inverse bounds (CSV)"));
  auto* rc = add_common(app.add_subcommand("rellich-check", "arc identities on random data (JSON)"));
  auto* ac = add_common(app.add_subcommand("acceptance", "run the full acceptance suite"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    o.tol = parse_kv(tolv);
    o.grid = parse_kv(gridv);
    if (sp->parsed()) return cmd_spectrum(o);
    if (kc->parsed()) return cmd_kernel_check(o);
    if (jc->parsed()) return cmd_jump_check(o);
    if (sv->parsed()) return cmd_solve(o);
    if (dt->parsed()) return cmd_dtn(o);
    if (ts->parsed()) return cmd_tau_sweep(o);
    if (rc->parsed()) return cmd_rellich_check(o);
    if (ac->parsed()) return run_acceptance(std::cout);
  } catch (const SolveFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SingularFamily& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IllConditioned& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ExtrapolationUnstable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
