#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "susycs/error.hpp"
#include "susycs/fock.hpp"
#include "susycs/observables.hpp"
#include "susycs/states.hpp"

namespace susycs::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// parsing and formatting

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

double parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw UsageError("malformed number '" + std::string(text) + "'");
  return v;
}

cplx parse_complex(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2)
    throw UsageError("malformed complex literal '" + std::string(text) + "' (expected re,im)");
  try {
    return {parse_real(parts[0]), parse_real(parts[1])};
  } catch (const UsageError&) {
    throw UsageError("malformed complex literal '" + std::string(text) + "' (expected re,im)");
  }
}

KMatrix parse_k(std::string_view text, double omega) {
  const auto parts = split(text, ',');
  std::vector<double> v;
  for (auto p : parts) v.push_back(parse_real(p));
  KMatrix k;
  k.omega = omega;
  if (v.size() == 4) {
    k.k1 = v[0];
    k.k2 = v[1];
    k.k3 = v[2];
    k.k4 = v[3];
  } else if (v.size() == 8) {
    k.k1 = {v[0], v[1]};
    k.k2 = {v[2], v[3]};
    k.k3 = {v[4], v[5]};
    k.k4 = {v[6], v[7]};
  } else {
    throw UsageError("--k expects 4 real or 8 (re,im) numbers, got " + std::to_string(v.size()));
  }
  return k;
}

Range parse_range(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("malformed range '" + std::string(text) + "' (expected a:b:n)");
  Range r;
  r.start = parse_real(parts[0]);
  r.stop = parse_real(parts[1]);
  const std::string_view n = trim(parts[2]);
  const auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), r.count);
  if (n.empty() || ec != std::errc{} || ptr != n.data() + n.size() || r.count < 1)
    throw UsageError("malformed range count in '" + std::string(text) + "'");
  return r;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

int default_max_fock() {
  if (const char* env = std::getenv(kMaxFockEnv)) {
    int v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && v >= 2 && v <= kMaxFockLimit) return v;
  }
  return kDefaultMaxFock;
}

// ---------------------------------------------------------------------------
// output

namespace {

json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

json to_json(const std::vector<CoherentTerm>& terms) {
  json arr = json::array();
  for (const auto& t : terms)
    arr.push_back({{"weight", to_json(t.weight)}, {"beta", to_json(t.beta)}, {"derivative", t.derivative}});
  return arr;
}

json to_json(const FockExpansion& f) {
  json a = json::array();
  json c = json::array();
  for (const auto& v : f.a) a.push_back(to_json(v));
  for (const auto& v : f.c) c.push_back(to_json(v));  // same indexing as FockExpansion: c[0] = 0
  return {{"N", f.N}, {"a", a}, {"c", c}, {"trunc_err", f.trunc_err}, {"reduced", f.reduced}, {"a1_free", f.a1_free}};
}

json to_json(const SuperState& s) {
  return {{"label", std::string(to_string(s.label))},
          {"z0", to_json(s.z0)},
          {"t", s.t},
          {"z", to_json(s.z())},
          {"upper", to_json(s.upper)},
          {"lower", to_json(s.lower)}};
}

// Writes `content` to `path` through a temporary file in the same directory
// followed by a rename, so readers never see a partial file.
void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    f << content;
    if (!f.flush()) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename output to '" + path + "': " + ec.message());
  }
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.out_path)
    write_atomic(*cfg.out_path, content);
  else
    out << content;
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string line;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) line += ',';
    line += c;
    first = false;
  }
  line += '\n';
  return line;
}

Format resolve_format(const RunConfig& cfg, Format fallback) { return cfg.format.value_or(fallback); }

std::string scalar_report(const RunConfig& cfg, const json& report,
                          const std::vector<std::pair<std::string, std::string>>& csv_cells) {
  if (resolve_format(cfg, Format::Json) == Format::Json) return report.dump(2) + "\n";
  std::string header, row;
  for (std::size_t i = 0; i < csv_cells.size(); ++i) {
    if (i) {
      header += ',';
      row += ',';
    }
    header += csv_cells[i].first;
    row += csv_cells[i].second;
  }
  return header + "\n" + row + "\n";
}

// ---------------------------------------------------------------------------
// subcommands

struct StateArgs {
  std::string k;
  std::string z0 = "0,0";
  double t = 0.0;
  double omega = 1.0;
  std::string basis;
  int fock_n = -1;
  std::string a0 = "1,0";
  std::string c1 = "0,0";
  double eta = std::numbers::pi / 4;
  double lambda = std::numbers::pi / 4;
};

SuperState build_state(const StateArgs& a, const RunConfig& cfg, const KMatrix& k, cplx z0) {
  const std::string& b = a.basis;
  if (b == "A" || b == "C") {
    const RegionClass rc = classify(k, cfg.tol);
    const auto pair = rc.tag == RegionTag::Degenerate ? degenerate_basis(k, z0, a.t, cfg.tol)
                                                      : generic_basis(k, z0, a.t, cfg.tol);
    return b == "A" ? pair.first : pair.second;
  }
  if (b == "plus") return generic_mus_basis(k, z0, a.t, cfg.tol).first;
  if (b == "minus") return generic_mus_basis(k, z0, a.t, cfg.tol).second;
  if (b == "mus") return degenerate_mus(k, z0, a.t, cfg.tol);
  if (b == "singular") return singular_state(k, z0, a.t, cfg.tol);
  if (b == "mixed") return mixed_state(k, z0, a.t, a.eta, a.lambda, cfg.tol);
  if (b == "auto") {
    const RegionClass rc = classify(k, cfg.tol);
    if (rc.is_generic()) return mixed_state(k, z0, a.t, a.eta, a.lambda, cfg.tol);
    if (rc.tag == RegionTag::Degenerate) return degenerate_mus(k, z0, a.t, cfg.tol);
    return singular_state(k, z0, a.t, cfg.tol);
  }
  throw UsageError("unknown basis '" + b + "'");
}

void check_fock_n(int n, const RunConfig& cfg) {
  if (n < 2 || n > cfg.max_fock)
    throw UsageError("out-of-range truncation --fock-n " + std::to_string(n) + " (allowed 2.." +
                     std::to_string(cfg.max_fock) + ")");
}

std::string cmd_classify(const RunConfig& cfg, const std::string& ktext, double omega) {
  const KMatrix k = parse_k(ktext, omega);
  const Spectrum sp = eigen_decompose(k, cfg.tol);
  const std::string region(to_string(sp.region.tag));
  const json report{{"region", region},
                    {"chi_plus", to_json(sp.chi_plus)},
                    {"chi_minus", to_json(sp.chi_minus)},
                    {"discriminant", to_json(sp.region.discriminant)},
                    {"det", to_json(sp.det)},
                    {"trace", to_json(sp.trace)},
                    {"nilpotent", sp.region.is_nilpotent()}};
  return scalar_report(cfg, report,
                       {{"region", region},
                        {"chi_plus_re", format_real(sp.chi_plus.real())},
                        {"chi_plus_im", format_real(sp.chi_plus.imag())},
                        {"chi_minus_re", format_real(sp.chi_minus.real())},
                        {"chi_minus_im", format_real(sp.chi_minus.imag())},
                        {"discriminant_re", format_real(sp.region.discriminant.real())},
                        {"discriminant_im", format_real(sp.region.discriminant.imag())}});
}

std::string cmd_state(const RunConfig& cfg, const StateArgs& a) {
  if (cfg.format == Format::Csv) throw UsageError("state output is JSON only");
  const KMatrix k = parse_k(a.k, a.omega);
  const cplx z0 = parse_complex(a.z0);
  json report{{"region", std::string(to_string(classify(k, cfg.tol).tag))}, {"basis", a.basis}};
  if (a.basis == "fock") {
    const int n = a.fock_n < 0 ? 20 : a.fock_n;
    check_fock_n(n, cfg);
    const FockExpansion f = fock_solve(k, z0, parse_complex(a.a0), parse_complex(a.c1), a.t, n,
                                       std::nullopt, cfg.tol);
    report["fock"] = to_json(f);
    return report.dump(2) + "\n";
  }
  const SuperState s = build_state(a, cfg, k, z0);
  report["state"] = to_json(s);
  if (a.fock_n >= 0) {
    check_fock_n(a.fock_n, cfg);
    report["fock"] = to_json(expand_fock(s, a.fock_n));
  }
  return report.dump(2) + "\n";
}

std::string cmd_uncertainty(const RunConfig& cfg, const StateArgs& a) {
  const KMatrix k = parse_k(a.k, a.omega);
  const SuperState s = build_state(a, cfg, k, parse_complex(a.z0));
  const UncertaintyReport r = uncertainty(s);
  const json report{{"state", std::string(to_string(s.label))},
                    {"region", std::string(to_string(classify(k, cfg.tol).tag))},
                    {"mean_xi", r.mean_xi},
                    {"mean_xi2", r.mean_xi2},
                    {"mean_mu", r.mean_mu},
                    {"mean_mu2", r.mean_mu2},
                    {"var_xi", r.var_xi},
                    {"var_mu", r.var_mu},
                    {"product", r.product},
                    {"norm", r.norm},
                    {"log_norm", r.log_norm}};
  return scalar_report(cfg, report,
                       {{"mean_xi", format_real(r.mean_xi)},
                        {"mean_xi2", format_real(r.mean_xi2)},
                        {"mean_mu", format_real(r.mean_mu)},
                        {"mean_mu2", format_real(r.mean_mu2)},
                        {"var_xi", format_real(r.var_xi)},
                        {"var_mu", format_real(r.var_mu)},
                        {"product", format_real(r.product)},
                        {"norm", format_real(r.norm)}});
}

std::string cmd_sweep(const RunConfig& cfg, const SweepSpec& spec, std::ostream& err) {
  const auto rows = sweep(spec);
  std::size_t flagged = 0;
  for (const auto& r : rows) flagged += r.ok() ? 0 : 1;
  if (flagged) err << "warning: " << flagged << " of " << rows.size() << " sweep rows flagged\n";

  if (resolve_format(cfg, Format::Csv) == Format::Json) {
    json arr = json::array();
    for (const auto& r : rows) {
      json row{{"theta", r.theta}, {"zmag", r.zmag}, {"zarg", r.zarg}};
      if (r.ok()) {
        row["var_xi"] = r.var_xi;
        row["var_mu"] = r.var_mu;
        row["product"] = r.product;
      } else {
        row["flag"] = r.flag;
      }
      arr.push_back(row);
    }
    return arr.dump(2) + "\n";
  }
  std::string csv = "theta,zmag,zarg,var_xi,var_mu,product\n";
  for (const auto& r : rows)
    csv += csv_line({format_real(r.theta), format_real(r.zmag), format_real(r.zarg), format_real(r.var_xi),
                     format_real(r.var_mu), format_real(r.product)});
  return csv;
}

std::string cmd_fit(const RunConfig& cfg, double theta, double zarg, double zmin, double zmax, int points,
                    double eta, double lambda) {
  const DivergenceFit fit = fit_divergence(theta, zarg, {zmin, zmax}, points, eta, lambda);
  const json report{{"theta", fit.theta},
                    {"zarg", fit.zarg},
                    {"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"r_squared", fit.r_squared},
                    {"zmag_window", json::array({fit.zmag_window.first, fit.zmag_window.second})},
                    {"points", fit.points}};
  return scalar_report(cfg, report,
                       {{"theta", format_real(fit.theta)},
                        {"zarg", format_real(fit.zarg)},
                        {"slope", format_real(fit.slope)},
                        {"intercept", format_real(fit.intercept)},
                        {"r_squared", format_real(fit.r_squared)},
                        {"zmin", format_real(fit.zmag_window.first)},
                        {"zmax", format_real(fit.zmag_window.second)},
                        {"points", std::to_string(fit.points)}});
}

std::string cmd_paramgrid(const RunConfig& cfg, const Range& k2, const Range& k3, const Range& k4,
                          const std::string& surfaces_path) {
  const auto cells = param_grid_classify(k2, k3, k4, cfg.tol);
  if (!surfaces_path.empty()) {
    std::string csv = "surface,k2,k3,k4\n";
    for (const auto& p : surface_samples(k2, k4))
      csv += csv_line({p.surface == Surface::Degenerate ? "degenerate" : "singular", format_real(p.k2),
                       format_real(p.k3), format_real(p.k4)});
    write_atomic(surfaces_path, csv);
  }
  if (resolve_format(cfg, Format::Csv) == Format::Json) {
    json arr = json::array();
    for (const auto& c : cells)
      arr.push_back({{"k2", c.k2}, {"k3", c.k3}, {"k4", c.k4}, {"region", std::string(to_string(c.region))}});
    return arr.dump(2) + "\n";
  }
  std::string csv = "k2,k3,k4,region\n";
  for (const auto& c : cells)
    csv += csv_line({format_real(c.k2), format_real(c.k3), format_real(c.k4), std::string(to_string(c.region))});
  return csv;
}

}  // namespace

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Supersymmetric coherent states: classification, states, uncertainties, sweeps"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  RunConfig cfg;
  cfg.max_fock = default_max_fock();
  std::string out_path;
  std::string format;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Write output to this file (atomically) instead of stdout");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", cfg.tol, "Relative classification tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-fock", cfg.max_fock, "Fock truncation cap (env " + std::string(kMaxFockEnv) + ")");
  };

  StateArgs sa;
  auto add_state_opts = [&](CLI::App* sub, bool with_basis_default_auto) {
    sub->add_option("--k", sa.k, "k1,k2,k3,k4 (real) or 8 numbers re,im per entry")->required();
    sub->add_option("--z0", sa.z0, "SAO eigenvalue as re,im");
    sub->add_option("--t", sa.t, "Time");
    sub->add_option("--omega", sa.omega, "Angular frequency")->check(CLI::PositiveNumber);
    sub->add_option("--eta", sa.eta, "Mixing angle eta (default pi/4)");
    sub->add_option("--lambda", sa.lambda, "Mixing phase lambda (default pi/4)");
    if (with_basis_default_auto) sa.basis = "auto";
  };

  std::string classify_k;
  double classify_omega = 1.0;
  auto* c_classify = app.add_subcommand("classify", "Classify K and report its eigenvalues");
  c_classify->add_option("--k", classify_k, "k1,k2,k3,k4")->required();
  c_classify->add_option("--omega", classify_omega, "Angular frequency")->check(CLI::PositiveNumber);
  add_common(c_classify);

  auto* c_state = app.add_subcommand("state", "Construct a supercoherent state");
  add_state_opts(c_state, false);
  c_state->add_option("--basis", sa.basis, "A|C|plus|minus|mus|singular|mixed|auto|fock")->required();
  c_state->add_option("--fock-n", sa.fock_n, "Fock truncation order for coefficient output");
  c_state->add_option("--a0", sa.a0, "Free parameter a0 for --basis fock (re,im)");
  c_state->add_option("--c1", sa.c1, "Free parameter c1 for --basis fock (re,im)");
  add_common(c_state);

  auto* c_unc = app.add_subcommand("uncertainty", "Position/momentum variances of a state");
  add_state_opts(c_unc, true);
  c_unc->add_option("--basis", sa.basis, "auto|A|C|plus|minus|mus|singular|mixed (default auto)");
  add_common(c_unc);

  SweepSpec spec;
  spec.eta = std::numbers::pi / 4;
  spec.lambda = std::numbers::pi / 4;
  std::string theta_range, zmag_range;
  auto* c_sweep = app.add_subcommand("sweep", "Uncertainty sweep over the theta family");
  c_sweep->add_option("--theta", theta_range, "a:b:n")->required();
  c_sweep->add_option("--zmag", zmag_range, "a:b:n")->required();
  c_sweep->add_option("--zarg", spec.zarg, "arg(z0)");
  c_sweep->add_option("--eta", spec.eta, "Mixing angle eta (default pi/4)");
  c_sweep->add_option("--lambda", spec.lambda, "Mixing phase lambda (default pi/4)");
  c_sweep->add_option("--t", spec.t, "Time");
  c_sweep->add_option("--threads", spec.threads, "Worker threads (0 = hardware)");
  add_common(c_sweep);

  double fit_theta = 0.0, fit_zarg = 0.0, fit_zmin = 10.0, fit_zmax = 100.0;
  double fit_eta = std::numbers::pi / 4, fit_lambda = std::numbers::pi / 4;
  int fit_points = 20;
  auto* c_fit = app.add_subcommand("fit", "Power-law fit of the uncertainty divergence");
  c_fit->add_option("--theta", fit_theta, "theta")->required();
  c_fit->add_option("--zarg", fit_zarg, "arg(z0)");
  c_fit->add_option("--zmin", fit_zmin, "Smallest |z0| (default 10)");
  c_fit->add_option("--zmax", fit_zmax, "Largest |z0| (default 100)");
  c_fit->add_option("--points", fit_points, "Log-spaced points (default 20)");
  c_fit->add_option("--eta", fit_eta, "Mixing angle eta (default pi/4)");
  c_fit->add_option("--lambda", fit_lambda, "Mixing phase lambda (default pi/4)");
  add_common(c_fit);

  std::string g_k2, g_k3, g_k4, g_surfaces;
  auto* c_grid = app.add_subcommand("paramgrid", "Region classification of the (k2,k3,k4) box, k1 = 1");
  c_grid->add_option("--k2", g_k2, "a:b:n")->required();
  c_grid->add_option("--k3", g_k3, "a:b:n")->required();
  c_grid->add_option("--k4", g_k4, "a:b:n")->required();
  c_grid->add_option("--surfaces", g_surfaces, "Also write degenerate/singular surface samples here");
  add_common(c_grid);

  std::vector<const char*> cargv;
  cargv.reserve(argv.size());
  for (const auto& s : argv) cargv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return static_cast<int>(ExitCode::Ok);
    }
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  }

  try {
    if (cfg.max_fock < 2 || cfg.max_fock > kMaxFockLimit)
      throw UsageError("out-of-range truncation --max-fock " + std::to_string(cfg.max_fock) + " (allowed 2.." +
                       std::to_string(kMaxFockLimit) + ")");
    if (!out_path.empty()) cfg.out_path = out_path;
    if (!format.empty()) cfg.format = format == "csv" ? Format::Csv : Format::Json;

    std::string content;
    if (c_classify->parsed()) {
      cfg.command = "classify";
      content = cmd_classify(cfg, classify_k, classify_omega);
    } else if (c_state->parsed()) {
      cfg.command = "state";
      content = cmd_state(cfg, sa);
    } else if (c_unc->parsed()) {
      cfg.command = "uncertainty";
      content = cmd_uncertainty(cfg, sa);
    } else if (c_sweep->parsed()) {
      cfg.command = "sweep";
      spec.theta = parse_range(theta_range);
      spec.zmag = parse_range(zmag_range);
      content = cmd_sweep(cfg, spec, err);
    } else if (c_fit->parsed()) {
      cfg.command = "fit";
      content = cmd_fit(cfg, fit_theta, fit_zarg, fit_zmin, fit_zmax, fit_points, fit_eta, fit_lambda);
    } else if (c_grid->parsed()) {
      cfg.command = "paramgrid";
      content = cmd_paramgrid(cfg, parse_range(g_k2), parse_range(g_k3), parse_range(g_k4), g_surfaces);
    }
    emit(cfg, content, out);
    return static_cast<int>(ExitCode::Ok);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind() == ErrorKind::InvalidArgument ? ExitCode::Usage : ExitCode::Numerical);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  }
}

}  // namespace susycs::cli
