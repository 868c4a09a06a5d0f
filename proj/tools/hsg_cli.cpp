// Command-line driver: index-set counts, abscissa counts, the parabolic
// convergence experiment, and the projection-rate suites, all emitted as CSV.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "hsg/galerkin.hpp"
#include "hsg/quadrature.hpp"
#include "hsg/rates.hpp"

using namespace hsg;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int lo = std::stoi(item.substr(0, dash));
      const int hi = std::stoi(item.substr(dash + 1));
      for (int v = lo; v <= hi; ++v)
        out.push_back(v);
    } else if (!item.empty()) {
      out.push_back(std::stoi(item));
    }
  }
  if (out.empty())
    throw CLI::ValidationError("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      out.push_back(std::stod(item));
  if (out.empty())
    throw CLI::ValidationError("empty real list");
  return out;
}

// one value broadcasts, otherwise one entry per dimension is required
BasisParamsND axis_params(int d, const std::string& alpha_text, const std::string& beta_text) {
  const std::vector<double> alphas = parse_double_list(alpha_text);
  const std::vector<double> betas = parse_double_list(beta_text);
  if ((alphas.size() != 1 && static_cast<int>(alphas.size()) != d) ||
      (betas.size() != 1 && static_cast<int>(betas.size()) != d))
    throw CLI::ValidationError("--alpha/--beta take one value or one per dimension");
  BasisParamsND p;
  for (int j = 0; j < d; ++j)
    p.axes.emplace_back(alphas[alphas.size() == 1 ? 0 : j], betas[betas.size() == 1 ? 0 : j]);
  return p;
}

struct OutputTarget {
  std::ofstream file;
  std::ostream* os = &std::cout;

  void open(const std::string& path) {
    if (path.empty())
      return;
    file.open(path);
    if (!file)
      throw CLI::ValidationError("cannot open output file: " + path);
    os = &file;
  }
};

IndexSet build_kind(const std::string& kind, int d, int n, double gamma, int n1, int d1, int n2,
                    int level) {
  if (kind == "full")
    return build_full(n, d);
  if (kind == "rhc")
    return build_rhc(n, d);
  if (kind == "ohc")
    return build_ohc(n, gamma, d);
  if (kind == "adaptive")
    return build_dim_adaptive(n1, d1, n2, gamma, d);
  if (kind == "smolyak")
    return smolyak_union_index_set(d, build_smolyak(level + d, d));
  throw CLI::ValidationError("unknown kind: " + kind);
}

std::string kind_params(const std::string& kind, int n, double gamma, int n1, int d1, int n2,
                        int level) {
  std::ostringstream os;
  if (kind == "full" || kind == "rhc")
    os << "N=" << n;
  else if (kind == "ohc")
    os << "N=" << n << ";gamma=" << format_g17(gamma);
  else if (kind == "adaptive")
    os << "N1=" << n1 << ";d1=" << d1 << ";N2=" << n2 << ";gamma=" << format_g17(gamma);
  else if (kind == "smolyak")
    os << "L=" << level;
  return os.str();
}

// the reference abscissa counts reported for N = 31 rules
struct AbscissaReference {
  const char* kind;
  int dim;
  std::size_t count;
};
constexpr AbscissaReference kAbscissaRefs[] = {
    {"full", 2, 961},  {"full", 3, 29791}, {"full", 4, 923521},
    {"rhc", 2, 298},   {"rhc", 3, 6612},   {"rhc", 4, 82704},
    {"ohc", 2, 108},   {"ohc", 3, 3348},   {"ohc", 4, 28944},
};

int run_counts(const std::string& kind, const std::vector<int>& dims, int n, double gamma, int n1,
               int d1, int n2, int level, const std::string& out_path) {
  OutputTarget out;
  out.open(out_path);
  (*out.os) << "d,kind,params,cardinality\n";
  for (int d : dims) {
    IndexSet s = build_kind(kind, d, n, gamma, n1, d1, n2, level);
    (*out.os) << d << "," << kind << "," << kind_params(kind, n, gamma, n1, d1, n2, level) << ","
              << s.cardinality() << "\n";
  }
  return 0;
}

int run_abscissas(const std::string& kind, const std::vector<int>& dims, int n, double gamma,
                  const std::string& alpha_text, const std::string& beta_text,
                  const std::string& out_path) {
  OutputTarget out;
  out.open(out_path);
  (*out.os) << "d,kind,params,count,reference,delta,full_grid\n";
  for (int d : dims) {
    const BasisParamsND pd = axis_params(d, alpha_text, beta_text);
    std::size_t count = 0;
    std::string params;
    if (kind == "full") {
      count = full_grid_points(n, d, pd.axes).count();
      params = "order=" + std::to_string(n);
    } else {
      IndexSet s = build_kind(kind, d, n, gamma, 0, 0, 0, 0);
      count = sparse_point_union(s, pd.axes).count();
      params = kind_params(kind, n, gamma, 0, 0, 0, 0);
    }
    std::string ref, delta;
    if (n == 31) {
      for (const auto& r : kAbscissaRefs)
        if (kind == r.kind && d == r.dim) {
          ref = std::to_string(r.count);
          delta = std::to_string(static_cast<long long>(count) - static_cast<long long>(r.count));
        }
    }
    // tensor reference grid of the same order: n distinct nodes per axis
    long long full = 1;
    for (int j = 0; j < d; ++j)
      full *= n;
    (*out.os) << d << "," << kind << "," << params << "," << count << "," << ref << "," << delta
              << "," << full << "\n";
  }
  return 0;
}

int run_convergence(const std::vector<int>& dims, const std::vector<int>& levels,
                    const std::string& alpha_text, const std::string& beta_text, double dt,
                    double tfinal, int quad_order, bool dump, bool no_timing,
                    const std::string& out_path) {
  OutputTarget out;
  out.open(out_path);
  (*out.os) << "# alpha=" << alpha_text << " beta=" << beta_text << " dt=" << format_g17(dt)
            << " T=" << format_g17(tfinal) << "\n";
  (*out.os) << "# proj_quad_order=" << (quad_order > 0 ? std::to_string(quad_order) : "auto")
            << " err_quad_order=2*maxdeg+8\n";
  (*out.os) << "d,level,dof,error,wall_time\n";
  for (int d : dims) {
    for (int L : levels) {
      if (d == 4 && L == 2) {
        (*out.os) << d << "," << L << ",,n/a,\n"; // kept out of the sweep, see README
        continue;
      }
      IndexSet s = experiment_index_set(d, L);
      BasisParamsND p = axis_params(d, alpha_text, beta_text);
      const auto t0 = std::chrono::steady_clock::now();
      ExperimentResult res = solve_experiment(d, s, p, dt, tfinal, quad_order, -1);
      const auto t1 = std::chrono::steady_clock::now();
      const double wall = no_timing ? 0.0 : std::chrono::duration<double>(t1 - t0).count();
      (*out.os) << d << "," << L << "," << res.dof << "," << format_g17(res.error) << ","
                << format_g17(wall) << "\n";
      if (dump && !out_path.empty()) {
        const std::string base = out_path + ".d" + std::to_string(d) + "L" + std::to_string(L);
        std::ofstream mos(base + ".operator.txt");
        assemble(experiment_operator(d), std::make_shared<IndexSet>(s), p).write(mos);
        std::ofstream cos(base + ".solution.txt");
        write_coeffs(res.solution, cos);
      }
    }
  }
  return 0;
}

int run_rates(const std::string& out_path) {
  OutputTarget out;
  out.open(out_path);
  (*out.os) << "suite,label,n,cardinality,error,slope,stderr\n";

  auto fg = full_grid_decay_suite({4, 8, 16, 32});
  std::vector<double> xs, ys;
  for (const auto& pt : fg) {
    (*out.os) << "full_grid,point," << pt.n << "," << pt.cardinality << ","
              << format_g17(pt.error) << ",,\n";
    xs.push_back(pt.n);
    ys.push_back(pt.error);
  }
  const SlopeFit fit = fit_loglog(xs, ys);
  (*out.os) << "full_grid,fit,,,," << format_g17(fit.slope) << "," << format_g17(fit.stderr_slope)
            << "\n";

  for (const auto& pr : rhc_vs_full_suite({3, 5, 7, 9})) {
    (*out.os) << "rhc_vs_full,full," << pr.n_a << "," << pr.card_a << "," << format_g17(pr.err_a)
              << ",,\n";
    (*out.os) << "rhc_vs_full,rhc," << pr.n_b << "," << pr.card_b << "," << format_g17(pr.err_b)
              << ",,\n";
  }

  for (const auto& pr : ohc_vs_rhc_suite(0.25, {8, 16, 32})) {
    (*out.os) << "ohc_vs_rhc,ohc," << pr.n_a << "," << pr.card_a << "," << format_g17(pr.err_a)
              << ",,\n";
    (*out.os) << "ohc_vs_rhc,rhc," << pr.n_b << "," << pr.card_b << "," << format_g17(pr.err_b)
              << ",,\n";
  }

  const std::vector<int> N1s{2, 6, 10, 14}, N2s{2, 4, 6, 8};
  auto table = dim_adaptive_error_table(N1s, N2s);
  for (std::size_t i = 0; i < N1s.size(); ++i)
    for (std::size_t j = 0; j < N2s.size(); ++j)
      (*out.os) << "dim_adaptive,N1=" << N1s[i] << " N2=" << N2s[j] << ",,,"
                << format_g17(table[i][j]) << ",,\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse Hermite spectral experiments"};
  app.require_subcommand(1);

  std::string kind = "rhc", dims_text = "2,3,4,5", levels_text = "2,3,4,5", out_path;
  std::string alpha_text = "1.01", beta_text = "0";
  int n = 31, n1 = 0, d1 = 0, n2 = 1, level = 3, quad_order = -1;
  double gamma = 0.5, dt = 1e-5, tfinal = 0.1;
  bool dump = false, no_timing = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "output CSV path (default: stdout)");
    cmd->set_config("--config");
  };

  CLI::App* counts = app.add_subcommand("counts", "index-set cardinalities");
  counts->add_option("--kind", kind, "full|rhc|ohc|adaptive|smolyak");
  counts->add_option("--dim", dims_text, "dimensions, e.g. 2,3 or 2-5");
  counts->add_option("--n", n, "N for full/rhc/ohc");
  counts->add_option("--gamma", gamma, "gamma for ohc/adaptive");
  counts->add_option("--n1", n1, "full-box bound (adaptive)");
  counts->add_option("--d1", d1, "full-box dimensions (adaptive)");
  counts->add_option("--n2", n2, "ohc bound (adaptive)");
  counts->add_option("--level", level, "level (smolyak)");
  add_common(counts);

  CLI::App* abscissas = app.add_subcommand("abscissas", "quadrature point-union counts");
  abscissas->add_option("--kind", kind, "full|rhc|ohc");
  abscissas->add_option("--dim", dims_text, "dimensions");
  abscissas->add_option("--n", n, "N (rhc/ohc) or rule order (full)");
  abscissas->add_option("--gamma", gamma, "gamma for ohc");
  abscissas->add_option("--alpha", alpha_text, "scaling factor(s), one value or one per dim");
  abscissas->add_option("--beta", beta_text, "translation(s)");
  add_common(abscissas);

  CLI::App* convergence = app.add_subcommand("convergence", "parabolic convergence experiment");
  convergence->add_option("--dim", dims_text, "dimensions");
  convergence->add_option("--level", levels_text, "levels");
  convergence->add_option("--alpha", alpha_text, "scaling factor(s), one value or one per dim");
  convergence->add_option("--beta", beta_text, "translation(s)");
  convergence->add_option("--dt", dt, "time step");
  convergence->add_option("--tfinal", tfinal, "final time");
  convergence->add_option("--quad-order", quad_order, "projection quadrature order (default auto)");
  convergence->add_flag("--dump-operator", dump, "write operator and solution dumps next to --out");
  convergence->add_flag("--no-timing", no_timing, "write zeros to the wall_time column");
  add_common(convergence);

  CLI::App* rates = app.add_subcommand("rates", "projection-rate suites");
  add_common(rates);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitConfig;
  }

  try {
    if (counts->parsed())
      return run_counts(kind, parse_int_list(dims_text), n, gamma, n1, d1, n2, level, out_path);
    if (abscissas->parsed())
      return run_abscissas(kind, parse_int_list(dims_text), n, gamma, alpha_text, beta_text,
                           out_path);
    if (convergence->parsed()) {
      for (int d : parse_int_list(dims_text))
        if (d < 1 || d > 8)
          throw CLI::ValidationError("dim must be in [1, 8]");
      return run_convergence(parse_int_list(dims_text), parse_int_list(levels_text), alpha_text,
                             beta_text, dt, tfinal, quad_order, dump, no_timing, out_path);
    }
    if (rates->parsed())
      return run_rates(out_path);
  } catch (const IntegrationBlowup& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
