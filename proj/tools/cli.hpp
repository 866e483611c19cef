#pragma once

// Command-line driver. run() is separate from main() so tests can call it
// with captured streams.
//
// Exit codes: 0 success / all verdicts pass, 1 a verdict fails or is
// marginal (or a scan finds a violation), 2 usage or input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "halfdirac/halfdirac.hpp"

namespace halfdirac::cli {

inline constexpr const char* kSchemaVersion = "1";

namespace detail {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// %.17g, round-trip safe.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json cjson(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

struct ParamFlags {
  double m = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double cot = std::numeric_limits<double>::quiet_NaN();
  CLI::Option* m_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* cot_opt = nullptr;

  void add(CLI::App* sub, bool m_required = true) {
    m_opt = sub->add_option("--m", m, "mass m >= 0");
    if (m_required) m_opt->required();
    alpha_opt = sub->add_option("--alpha", alpha, "boundary angle in radians, (0, pi/2)");
    cot_opt = sub->add_option("--cot-alpha", cot, "cot(alpha) > 0 instead of --alpha");
    alpha_opt->excludes(cot_opt);
    cot_opt->excludes(alpha_opt);
  }

  bool has_angle() const { return alpha_opt->count() + cot_opt->count() > 0; }

  SpectralParams params() const {
    if (alpha_opt->count()) return SpectralParams(m, alpha);
    if (cot_opt->count()) return SpectralParams::from_cot(m, cot);
    throw UsageError("one of --alpha or --cot-alpha is required");
  }
};

inline json params_json(const SpectralParams& p) {
  return json{{"m", p.m()}, {"alpha", p.alpha()}, {"cot_alpha", p.cot_alpha()}, {"q", p.q()}};
}

/// --potential FILE or --family gaussian|exp with its parameters.
struct PotentialFlags {
  std::string path;
  std::string family;
  double t = std::numeric_limits<double>::quiet_NaN();
  double a = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double rate = std::numeric_limits<double>::quiet_NaN();
  CLI::Option* path_opt = nullptr;
  CLI::Option* family_opt = nullptr;

  void add(CLI::App* sub) {
    path_opt = sub->add_option("--potential", path, "potential CSV file");
    family_opt = sub->add_option("--family", family, "built-in family: gaussian or exp")
                     ->check(CLI::IsMember({"gaussian", "exp"}));
    path_opt->excludes(family_opt);
    family_opt->excludes(path_opt);
    sub->add_option("--t", t, "coupling (gaussian) or amplitude (exp)");
    sub->add_option("--a", a, "gaussian centre");
    sub->add_option("--sigma", sigma, "gaussian width");
    sub->add_option("--rate", rate, "exp decay rate");
  }

  bool given() const { return path_opt->count() + family_opt->count() > 0; }

  PotentialSpec spec() const {
    if (path_opt->count()) return PotentialSpec(load_csv(path));
    auto need = [](double v, const char* flag) {
      if (std::isnan(v)) throw UsageError(std::string("missing ") + flag + " for --family");
    };
    if (family == "gaussian") {
      need(t, "--t");
      need(a, "--a");
      need(sigma, "--sigma");
      return PotentialSpec(GaussianBump11{t, a, sigma});
    }
    if (family == "exp") {
      need(t, "--t");
      need(rate, "--rate");
      return PotentialSpec(ExpDecay{cplx(t) * Mat2::identity(), rate});
    }
    throw UsageError("one of --potential or --family is required");
  }
};

struct OutputFlags {
  std::string format;
  std::string path;

  void add(CLI::App* sub, const char* default_format) {
    format = default_format;
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output,-o", path, "output file (default stdout)");
  }
  bool json_out() const { return format == "json"; }
};

class Sink {
 public:
  Sink(const OutputFlags& f, std::ostream& fallback) : out_(&fallback) {
    if (!f.path.empty()) {
      file_ = std::make_unique<std::ofstream>(f.path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open output file '" + f.path + "'");
      out_ = file_.get();
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

inline void emit_json(std::ostream& os, json j) {
  j["schema_version"] = kSchemaVersion;
  os << j.dump(2) << '\n';
}

struct GridFlags {
  int panels = 32;
  int order = 8;
  unsigned threads = 1;
  void add(CLI::App* sub) {
    sub->add_option("--panels", panels, "quadrature panels")->check(CLI::PositiveNumber);
    sub->add_option("--order", order, "Gauss-Legendre order per panel")->check(CLI::Range(2, 64));
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }
};

// ---- certify ----------------------------------------------------------

struct CertifyCmd {
  ParamFlags pf;
  PotentialFlags pot;
  GridFlags gf;
  OutputFlags of;
  bool nonrel = false;
  double beta = std::numeric_limits<double>::quiet_NaN();
  CLI::Option* beta_opt = nullptr;

  void add(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("certify", "stability certificates for a potential");
    pf.add(sub);
    pot.add(sub);
    gf.add(sub);
    of.add(sub, "json");
    sub->add_flag("--nonrel", nonrel, "also evaluate the Schroedinger (Robin) condition");
    beta_opt = sub->add_option("--beta", beta, "Robin parameter (default 2 cot(alpha))");
    beta_opt->needs(sub->get_option("--nonrel"));
  }

  int run(std::ostream& out) const {
    if (!pot.given()) throw UsageError("one of --potential or --family is required");
    const PotentialSpec V = pot.spec();
    const QuadGrid grid = adapted_grid(V, gf.panels, gf.order);
    const WeightedL1 l1 = weighted_l1(V, grid);

    std::vector<Certificate> certs;
    std::optional<SpectralParams> p;
    if (pf.has_angle()) {
      p = pf.params();
      certs.push_back(certificate_sufcon(V, *p, grid, gf.threads));
      if (V.only_entry11()) certs.push_back(certificate_alt(V, *p, grid, gf.threads));
    } else if (!nonrel || !beta_opt->count()) {
      throw UsageError("one of --alpha or --cot-alpha is required (or --nonrel --beta)");
    }
    if (nonrel) {
      const double b = beta_opt->count() ? beta : beta_of(*p);
      certs.push_back(certificate_nonrel(V, pf.m, b, grid, gf.threads));
    }
    std::optional<double> nys;
    if (p) nys = nystrom_norm(birman_schwinger_kernels(V, *p).L, grid, gf.threads);

    bool pass = true;
    for (const auto& c : certs) pass = pass && c.verdict && !c.marginal;

    if (of.json_out()) {
      json j;
      j["command"] = "certify";
      j["m"] = pf.m;
      if (p) j["params"] = params_json(*p);
      j["potential"] = {{"l1", l1.l1}, {"l1_weighted", l1.l1_weighted}, {"warning", l1.warning}};
      j["grid"] = {{"panels", grid.panels()}, {"order", grid.order}, {"X", grid.upper()}};
      json arr = json::array();
      for (const auto& c : certs) {
        json e{{"condition", to_string(c.condition_id)},
               {"value", c.value},
               {"verdict", c.verdict},
               {"marginal", c.marginal},
               {"quad_error_estimate", c.quad_error_estimate},
               {"warning", c.warning}};
        if (c.condition_id == ConditionId::SufconNon) e["beta"] = c.beta;
        arr.push_back(e);
      }
      j["certificates"] = arr;
      if (nys) j["nystrom_norm_L"] = *nys;
      j["all_pass"] = pass;
      emit_json(out, j);
    } else {
      out << "condition,value,verdict,marginal,quad_error_estimate,warning,beta\n";
      for (const auto& c : certs) {
        out << to_string(c.condition_id) << ',' << num(c.value) << ',' << (c.verdict ? "pass" : "fail")
            << ',' << (c.marginal ? 1 : 0) << ',' << num(c.quad_error_estimate) << ','
            << (c.warning ? 1 : 0) << ','
            << (c.condition_id == ConditionId::SufconNon ? num(c.beta) : std::string()) << '\n';
      }
    }
    return pass ? 0 : 1;
  }
};

// ---- supscan ----------------------------------------------------------

struct SupscanCmd {
  ParamFlags pf;
  OutputFlags of;
  double x = 0.0, y = 0.0;
  ScanGrid grid;
  int n = 200;
  bool entry11 = false;
  unsigned threads = 1;

  void add(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("supscan", "scan |R_alpha(x,y;z)| against its uniform bound");
    sub->add_option("--x", x, "x >= 0")->required();
    sub->add_option("--y", y, "y >= 0")->required();
    pf.add(sub);
    sub->add_option("--re-max", grid.re_max, "half-width of the Re z range");
    sub->add_option("--im-max", grid.im_max, "half-width of the Im z range");
    sub->add_option("--n", n, "samples per axis")->check(CLI::PositiveNumber);
    sub->add_option("--n-spectrum", grid.n_spectrum, "spectrum probes per branch");
    sub->add_option("--spectrum-eps", grid.spectrum_eps, "imaginary offset of spectrum probes");
    sub->add_flag("--entry11", entry11, "scan the (1,1) entry instead of the full norm");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    of.add(sub, "json");
  }

  int run(std::ostream& out) {
    const SpectralParams p = pf.params();
    grid.n_re = grid.n_im = n;
    const ScanReport r = scan_verify(x, y, p, grid, entry11 ? ScanTarget::Entry11 : ScanTarget::Full,
                                     1e-6, threads);
    if (of.json_out()) {
      emit_json(out, json{{"command", "supscan"},
                          {"target", entry11 ? "entry11" : "full"},
                          {"x", x},
                          {"y", y},
                          {"params", params_json(p)},
                          {"bound", r.bound},
                          {"bound_sq", r.bound * r.bound},
                          {"max_found", r.max_found},
                          {"max_found_sq", r.max_found * r.max_found},
                          {"witness", cjson(r.witness_z)},
                          {"margin", r.margin},
                          {"n_samples", r.n_samples},
                          {"violation", r.violation}});
    } else {
      out << "bound,max_found,witness_re,witness_im,margin,n_samples,violation\n"
          << num(r.bound) << ',' << num(r.max_found) << ',' << num(r.witness_z.real()) << ','
          << num(r.witness_z.imag()) << ',' << num(r.margin) << ',' << r.n_samples << ','
          << (r.violation ? 1 : 0) << '\n';
    }
    return r.violation ? 1 : 0;
  }
};

// ---- delta ------------------------------------------------------------

struct DeltaCmd {
  ParamFlags pf;
  OutputFlags of;
  double a = std::numeric_limits<double>::quiet_NaN();
  double t = 0.0;
  std::vector<std::string> scan;
  CLI::Option* t_opt = nullptr;
  CLI::Option* scan_opt = nullptr;
  CLI::App* sub = nullptr;
  unsigned threads = 1;

  void add(CLI::App& app) {
    sub = app.add_subcommand("delta", "bound state of t delta(x - a) in entry (1,1)");
    pf.add(sub);
    sub->add_option("--a", a, "position a > 0")->required();
    t_opt = sub->add_option("--t", t, "coupling");
    scan_opt = sub->add_option("--scan", scan, "TMIN TMAX N: eigenvalue curve")->expected(3);
    t_opt->excludes(scan_opt);
    scan_opt->excludes(t_opt);
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--output,-o", of.path, "output file (default stdout)");
    sub->add_option("--format", of.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  static double to_double(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty() || !std::isfinite(v)) {
      throw UsageError(std::string("--scan: malformed ") + what + " '" + s + "'");
    }
    return v;
  }

  int run(std::ostream& out) {
    const SpectralParams p = pf.params();
    if (scan_opt->count()) {
      const double tmin = to_double(scan[0], "TMIN"), tmax = to_double(scan[1], "TMAX");
      const double nd = to_double(scan[2], "N");
      if (nd != std::floor(nd) || nd < 2 || nd > 1e7) throw UsageError("--scan: N must be an integer >= 2");
      const auto rows = eigen_curve(tmin, tmax, static_cast<int>(nd), a, p, threads);
      if (of.format == "json") {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back({{"t", r.t}, {"lambda", r.lambda}});
        emit_json(out, json{{"command", "delta"}, {"a", a}, {"params", params_json(p)},
                            {"t_zero", t_zero(a, p)}, {"t_star", t_star(a, p)}, {"curve", arr}});
      } else {
        out << "t,lambda\n";
        for (const auto& r : rows) out << num(r.t) << ',' << num(r.lambda) << '\n';
      }
      return 0;
    }
    if (!t_opt->count()) throw UsageError("one of --t or --scan is required");
    const auto ev = solve_eigenvalue(t, a, p);
    if (of.format == "csv") {
      out << "t,lambda,residual,interface_residual,t_zero,t_star\n" << num(t) << ',';
      if (ev) {
        out << num(ev->lambda) << ',' << num(ev->residual) << ','
            << num(interface_residual(ev->lambda, t, a, p));
      } else {
        out << ",,";
      }
      out << ',' << num(t_zero(a, p)) << ',' << num(t_star(a, p)) << '\n';
      return 0;
    }
    json j{{"command", "delta"}, {"t", t}, {"a", a}, {"params", params_json(p)},
           {"t_zero", t_zero(a, p)}, {"t_star", t_star(a, p)}, {"bound_state", ev.has_value()}};
    if (ev) {
      j["lambda"] = ev->lambda;
      j["residual"] = ev->residual;
      j["interface_residual"] = interface_residual(ev->lambda, t, a, p);
      j["bracket"] = {ev->bracket.first, ev->bracket.second};
    } else {
      j["status"] = "no bound state";
    }
    emit_json(out, j);
    return 0;
  }
};

// ---- nonrel -----------------------------------------------------------

struct NonrelCmd {
  ParamFlags pf;
  PotentialFlags pot;
  OutputFlags of;
  double z_re = 0.0, z_im = 0.0;
  std::vector<double> c_list;
  double X = 20.0;
  int panels = 0;
  int order = 8;
  unsigned threads = 1;

  void add(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("nonrel", "non-relativistic limit tables");
    pf.add(sub);
    sub->add_option("--z-re", z_re, "Re z")->required();
    sub->add_option("--z-im", z_im, "Im z")->required();
    sub->add_option("--c-list", c_list, "comma-separated speeds of light")->delimiter(',')->required()
        ->check(CLI::PositiveNumber);
    sub->add_option("--X", X, "truncation of the HS distance")->check(CLI::PositiveNumber);
    sub->add_option("--panels", panels, "panels on [0, X] (default ceil(X))")->check(CLI::NonNegativeNumber);
    sub->add_option("--order", order, "Gauss-Legendre order")->check(CLI::Range(2, 64));
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    pot.add(sub);
    of.add(sub, "csv");
  }

  int run(std::ostream& out) const {
    const SpectralParams p = pf.params();
    const cplx z(z_re, z_im);
    if (!(p.m() > 0.0)) throw UsageError("nonrel requires m > 0");
    if (z_im == 0.0 && z_re >= 0.0) throw UsageError("z must lie outside [0, inf)");
    const int np = panels > 0 ? panels : std::max(1, static_cast<int>(std::ceil(X)));
    const QuadGrid grid = make_grid(X, np, order);
    const auto conv = convergence_table(z, p, c_list, grid);
    std::vector<CertificateLimitRow> lim;
    if (pot.given()) {
      const PotentialSpec V = pot.spec();
      lim = certificate_limit_table(V, p, c_list, adapted_grid(V), threads);
    }
    if (of.json_out()) {
      json rows = json::array();
      for (std::size_t i = 0; i < conv.size(); ++i) {
        json r{{"c", conv[i].c}, {"eta_gap", conv[i].eta_gap}, {"boundary_hs", conv[i].boundary_hs},
               {"full_hs", conv[i].full_hs}, {"warning", conv[i].warning}};
        if (!lim.empty()) {
          r["cert_c"] = lim[i].cert_c;
          r["cert_nonrel"] = lim[i].cert_nonrel;
          r["rel_gap"] = lim[i].rel_gap;
        }
        rows.push_back(r);
      }
      emit_json(out, json{{"command", "nonrel"}, {"params", params_json(p)}, {"beta", beta_of(p)},
                          {"z", cjson(z)}, {"X", X}, {"rows", rows}});
    } else {
      out << "c,eta_gap,boundary_hs,full_hs" << (lim.empty() ? "" : ",cert_c,cert_nonrel,rel_gap") << '\n';
      for (std::size_t i = 0; i < conv.size(); ++i) {
        out << num(conv[i].c) << ',' << num(conv[i].eta_gap) << ',' << num(conv[i].boundary_hs) << ','
            << num(conv[i].full_hs);
        if (!lim.empty()) {
          out << ',' << num(lim[i].cert_c) << ',' << num(lim[i].cert_nonrel) << ',' << num(lim[i].rel_gap);
        }
        out << '\n';
      }
    }
    return 0;
  }
};

// ---- kernel -----------------------------------------------------------

struct KernelCmd {
  ParamFlags pf;
  OutputFlags of;
  double x = 0.0, y = 0.0, z_re = 0.0, z_im = 0.0;
  double c = 0.0;
  CLI::Option* c_opt = nullptr;
  bool robin = false;

  void add(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("kernel", "evaluate a resolvent kernel at (x, y; z)");
    sub->add_option("--x", x, "x >= 0")->required();
    sub->add_option("--y", y, "y >= 0")->required();
    sub->add_option("--z-re", z_re, "Re z")->required();
    sub->add_option("--z-im", z_im, "Im z")->required();
    pf.add(sub);
    c_opt = sub->add_option("--c", c, "speed of light; z is then the absolute energy");
    auto* r = sub->add_flag("--robin", robin, "Schroedinger kernels G, G_alpha instead");
    c_opt->excludes(r);
    of.add(sub, "json");
  }

  int run(std::ostream& out) const {
    const SpectralParams p = pf.params();
    const cplx z(z_re, z_im);
    json j{{"command", "kernel"}, {"x", x}, {"y", y}, {"z", cjson(z)}, {"params", params_json(p)}};
    if (robin) {
      const RobinKernels rk = robin_kernels(x, y, z, p);
      j["kernel"] = "robin";
      j["beta"] = beta_of(p);
      j["G"] = cjson(rk.G);
      j["G_alpha"] = cjson(rk.G_alpha);
      j["xi"] = cjson(rk.xi);
      j["abs_G_alpha"] = std::abs(rk.G_alpha);
      if (of.json_out()) {
        emit_json(out, j);
      } else {
        out << "G_re,G_im,G_alpha_re,G_alpha_im,xi_re,xi_im\n"
            << num(rk.G.real()) << ',' << num(rk.G.imag()) << ',' << num(rk.G_alpha.real()) << ','
            << num(rk.G_alpha.imag()) << ',' << num(rk.xi.real()) << ',' << num(rk.xi.imag()) << '\n';
      }
      return 0;
    }
    KernelEval<Mat2> ev{};
    if (c_opt->count()) {
      ev = halfline_kernel_c_eval(x, y, z, CParams(c, p));
      j["kernel"] = "halfline_c";
      j["c"] = c;
    } else {
      ev = halfline_kernel_eval(x, y, z, p);
      j["kernel"] = "halfline";
    }
    const double nrm = op_norm(ev.value);
    j["entries"] = {{"r11", cjson(ev.value.a11)}, {"r12", cjson(ev.value.a12)},
                    {"r21", cjson(ev.value.a21)}, {"r22", cjson(ev.value.a22)}};
    j["op_norm"] = nrm;
    j["branch"] = to_string(ev.branch);
    j["region"] = to_string(classify(c_opt->count() ? z / (c * c) : z, p.m()));
    if (of.json_out()) {
      emit_json(out, j);
    } else {
      out << "entry,re,im\n";
      const char* names[] = {"r11", "r12", "r21", "r22"};
      const cplx vals[] = {ev.value.a11, ev.value.a12, ev.value.a21, ev.value.a22};
      for (int i = 0; i < 4; ++i) out << names[i] << ',' << num(vals[i].real()) << ',' << num(vals[i].imag()) << '\n';
      out << "op_norm," << num(nrm) << ",\n";
    }
    return 0;
  }
};

}  // namespace detail

/// Runs the CLI on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral stability tools for half-line Dirac operators", "halfdirac"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("halfdirac schema ") + kSchemaVersion);
  detail::CertifyCmd certify;
  detail::SupscanCmd supscan;
  detail::DeltaCmd delta;
  detail::NonrelCmd nonrel;
  detail::KernelCmd kernel;
  certify.add(app);
  supscan.add(app);
  delta.add(app);
  nonrel.add(app);
  kernel.add(app);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    std::ostringstream buf;
    int code = 0;
    detail::OutputFlags* flags = nullptr;
    if (app.got_subcommand("certify")) {
      code = certify.run(buf);
      flags = &certify.of;
    } else if (app.got_subcommand("supscan")) {
      code = supscan.run(buf);
      flags = &supscan.of;
    } else if (app.got_subcommand("delta")) {
      if (delta.of.format.empty()) delta.of.format = delta.scan_opt->count() ? "csv" : "json";
      code = delta.run(buf);
      flags = &delta.of;
    } else if (app.got_subcommand("nonrel")) {
      code = nonrel.run(buf);
      flags = &nonrel.of;
    } else {
      code = kernel.run(buf);
      flags = &kernel.of;
    }
    detail::Sink sink(*flags, out);
    *sink << buf.str();
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace halfdirac::cli
