#include "wickfield_cli/commands.hpp"

#include "wickfield/error.hpp"
#include "wickfield/green.hpp"
#include "wickfield/scattering.hpp"
#include "wickfield/spectrum.hpp"
#include "wickfield_cli/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace wickfield::cli {

using nlohmann::json;

namespace {

struct Output {
  json data;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}}; }

json spectrum_json(const MassSpectrum& s) {
  json j = json::array();
  for (const auto& p : s.poles()) j.push_back({{"mass", p.mass}, {"multiplicity", p.multiplicity}});
  return j;
}

// Time-ordered points: successive x0 gaps in [0.3, 1], spatial parts in [-1, 1].
std::vector<EuclideanPoint> random_points(int n, int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> gap(0.3, 1.0), space(-1.0, 1.0);
  std::vector<EuclideanPoint> pts;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    EuclideanPoint p(static_cast<std::size_t>(d));
    if (i > 0) t += gap(rng);
    p[0] = t;
    for (int a = 1; a < d; ++a) p[static_cast<std::size_t>(a)] = space(rng);
    pts.push_back(std::move(p));
  }
  return pts;
}

Output cmd_pf(const Model& m) {
  const auto pf = partial_fractions(m.spectrum);
  Output o;
  o.data = {{"spectrum", spectrum_json(m.spectrum)}, {"b", pf.rows()}};
  o.header = {"mass_index", "mass", "power", "b"};
  for (std::size_t l = 0; l < pf.size(); ++l)
    for (std::size_t j = 0; j < pf.rows()[l].size(); ++j)
      o.rows.push_back({std::to_string(l), num(m.spectrum.mass(l)), std::to_string(j + 1), num(pf.rows()[l][j])});
  return o;
}

Output cmd_covariance(const Model& m) {
  const auto r = check_covariance(m.qe, m.representation, m.config.covariance_samples, m.config.seed);
  Output o;
  o.data = {{"representation", m.representation.kind == RepresentationKind::Trivial ? "trivial" : "vector"},
            {"samples", m.config.covariance_samples},
            {"pass", r.pass},
            {"max_residual", r.max_residual},
            {"scale", r.scale}};
  o.header = {"pass", "max_residual", "scale"};
  o.rows.push_back({r.pass ? "true" : "false", num(r.max_residual), num(r.scale)});
  return o;
}

Output cmd_prime(const Model& m) {
  const auto prime = is_prime_wrt_factors(m.qe, m.spectrum);
  Output o;
  o.data = {{"degree", m.qe.degree()}, {"kappa", kappa(m.spectrum)}, {"prime", prime},
            {"all_prime", std::all_of(prime.begin(), prime.end(), [](bool b) { return b; })}};
  o.header = {"mass_index", "mass", "prime"};
  for (std::size_t l = 0; l < prime.size(); ++l)
    o.rows.push_back({std::to_string(l), num(m.spectrum.mass(l)), prime[l] ? "true" : "false"});
  return o;
}

std::string factors_text(const WightmanTerm& t) {
  std::string s;
  for (const auto& f : t.factors) {
    if (!s.empty()) s += ';';
    s += std::string(to_string(f.kind)) + ':' + std::to_string(f.order) + ':' + std::to_string(f.mass_index) + ':' +
         std::to_string(f.slot);
  }
  return s;
}

Output cmd_build(const Model& m) {
  BuildOptions opts;
  opts.dimension = m.config.dimension;
  opts.prefactor = m.prefactor(m.config.n);
  const auto terms = build_wightman_terms(m.spectrum, partial_fractions(m.spectrum), m.config.n, opts);
  Output o;
  json arr = json::array();
  for (const auto& t : terms) arr.push_back(term_to_json(t));
  o.data = {{"n", m.config.n}, {"count", terms.size()}, {"terms", arr}};
  o.header = {"term", "coefficient_re", "coefficient_im", "propagator_slot", "factors"};
  for (std::size_t i = 0; i < terms.size(); ++i)
    o.rows.push_back({std::to_string(i), num(terms[i].coefficient.real()), num(terms[i].coefficient.imag()),
                      std::to_string(terms[i].propagator_slot), factors_text(terms[i])});
  return o;
}

// Sum over all slot assignments (l_r, j_r) of prod b_{l_r j_r} times the convolution integral.
double euclidean_side(const Model& m, const PartialFractionTable& pf, const std::vector<EuclideanPoint>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<SlotAssignment> choices;
  for (std::size_t l = 0; l < m.spectrum.size(); ++l)
    for (int j = 1; j <= m.spectrum.multiplicity(l); ++j) choices.push_back({l, j});
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  SchwingerOptions so;
  so.max_level = m.config.quad_budget + 1;
  double total = 0.0;
  while (true) {
    SchwingerAssignment a;
    double b = 1.0;
    for (auto i : idx) {
      a.push_back(choices[i]);
      b *= pf(choices[i].mass_index, choices[i].power);
    }
    total += b * schwinger_truncated(m.spectrum, a, pts, m.config.dimension, so).value;
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == choices.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return total;
}

Output cmd_verify_laplace(const Model& m) {
  if (m.prefactor(m.config.n))
    throw Error(ErrorKind::Unsupported, "verify-laplace needs a scalar model with Q_E = 1 and unit cumulant");
  const int n = m.config.n;
  std::vector<std::vector<EuclideanPoint>> sets;
  if (!m.config.points.empty()) {
    if (static_cast<int>(m.config.points.size()) != n)
      throw Error(ErrorKind::ConfigError, "field /evaluation/points: expected " + std::to_string(n) + " points");
    sets.push_back(m.config.points);
  } else {
    std::mt19937_64 rng(m.config.seed);
    for (int c = 0; c < m.config.configurations; ++c) sets.push_back(random_points(n, m.config.dimension, rng));
  }
  const auto pf = partial_fractions(m.spectrum);
  BuildOptions bo;
  bo.dimension = m.config.dimension;
  const auto terms = build_wightman_terms(m.spectrum, pf, n, bo);
  LaplaceOptions lo;
  lo.normalization = m.config.laplace_normalization;
  lo.max_level = m.config.quad_budget;
  lo.relative_tolerance = m.config.relative_tolerance;
  constexpr double tolerance = 5e-3;

  Output o;
  o.header = {"configuration", "laplace_re", "laplace_im", "schwinger", "rel_err"};
  json cases = json::array();
  double worst = 0.0;
  for (std::size_t c = 0; c < sets.size(); ++c) {
    const auto l = laplace_eval(terms, m.spectrum, sets[c], m.config.dimension, lo);
    const double s = euclidean_side(m, pf, sets[c]);
    const double rel = std::abs(l.value - s) / std::abs(s);
    worst = std::max(worst, rel);
    cases.push_back({{"points", sets[c]}, {"laplace", complex_json(l.value)}, {"schwinger", s}, {"rel_err", rel}});
    o.rows.push_back({std::to_string(c), num(l.value.real()), num(l.value.imag()), num(s), num(rel)});
  }
  o.data = {{"n", n},
            {"terms", terms.size()},
            {"normalization", lo.normalization},
            {"cases", cases},
            {"rel_err", worst},
            {"tolerance", tolerance},
            {"pass", worst < tolerance}};
  return o;
}

ScatteringModel scattering_model(const Model& m, std::size_t n) {
  if (m.config.dimension != 2) throw Error(ErrorKind::Unsupported, "scattering is implemented for d = 2");
  return ScatteringModel(m.spectrum, m.config.lambdas, m.prefactor(static_cast<int>(n)));
}

Output cmd_amplitude(const Model& m) {
  const auto packets = m.packets();
  const auto model = scattering_model(m, packets.size());
  const auto amp = scattering_amplitude(model, packets, m.config.channel);
  const auto terms = scattering_terms(model, static_cast<int>(packets.size()));
  const auto finite = finite_time_overlap(model, terms, packets, m.config.channel, m.config.t);
  const double scale = std::abs(amp);
  Output o;
  o.data = {{"channel", {{"r", m.config.channel.r}, {"kind", to_string(m.config.channel.kind)}}},
            {"amplitude", complex_json(amp)},
            {"finite_time", {{"t", m.config.t}, {"value", complex_json(finite)},
                             {"rel_diff", scale > 0.0 ? std::abs(finite - amp) / scale : std::abs(finite)}}}};
  o.header = {"kind", "t", "re", "im", "abs"};
  o.rows.push_back({"limit", "inf", num(amp.real()), num(amp.imag()), num(std::abs(amp))});
  o.rows.push_back({"finite", num(m.config.t), num(finite.real()), num(finite.imag()), num(std::abs(finite))});
  return o;
}

Output cmd_divergence_scan(const Model& m) {
  const auto packets = m.packets();
  const auto model = scattering_model(m, packets.size());
  const auto grid = m.config.t_grid.empty() ? default_t_grid() : m.config.t_grid;
  const auto r = divergence_scan(model, packets, m.config.channel, grid, m.config.seed);
  Output o;
  json rows = json::array();
  o.header = {"t", "re", "im", "abs"};
  for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
    rows.push_back({{"t", r.t_grid[i]}, {"re", r.overlaps[i].real()}, {"im", r.overlaps[i].imag()},
                    {"abs", std::abs(r.overlaps[i])}});
    o.rows.push_back({num(r.t_grid[i]), num(r.overlaps[i].real()), num(r.overlaps[i].imag()),
                      num(std::abs(r.overlaps[i]))});
  }
  o.data = {{"fitted_r", r.fitted_r},   {"residual", r.residual}, {"converged", r.converged},
            {"recentered", r.recentered}, {"value", complex_json(r.value)}, {"overlaps", rows}};
  return o;
}

Output cmd_schwinger(const Model& m) {
  auto pts = m.config.points;
  if (pts.empty()) {
    std::mt19937_64 rng(m.config.seed);
    pts = random_points(m.config.n, m.config.dimension, rng);
  }
  auto assign = m.config.assignment;
  if (assign.empty()) assign.assign(pts.size(), SlotAssignment{0, 1});
  SchwingerOptions so;
  so.max_level = m.config.quad_budget + 1;
  const auto r = schwinger_truncated(m.spectrum, assign, pts, m.config.dimension, so);
  json a = json::array();
  for (const auto& s : assign) a.push_back({{"mass_index", s.mass_index}, {"power", s.power}});
  Output o;
  o.data = {{"points", pts}, {"assignment", a}, {"value", r.value}, {"error_estimate", r.error_estimate},
            {"evaluations", r.evaluations}, {"level", r.level}};
  o.header = {"value", "error_estimate", "evaluations", "level"};
  o.rows.push_back({num(r.value), num(r.error_estimate), std::to_string(r.evaluations), std::to_string(r.level)});
  return o;
}

std::string render(const std::string& command, const Output& o, const std::string& format) {
  if (format == "csv") {
    std::ostringstream s;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i];
      s << '\n';
    };
    line(o.header);
    for (const auto& r : o.rows) line(r);
    return s.str();
  }
  json j = {{"schema", 1}, {"command", command}};
  j.update(o.data);
  return j.dump(2) + "\n";
}

std::string usage() {
  std::string s = "usage: wickfield <command> [--config PATH] [--out PATH] [--format json|csv] [--seed N]\n"
                  "                 [--quad-budget N] [--t-grid a,b,...] [--dump-config]\ncommands:";
  for (const auto& c : command_names()) s += " " + c;
  return s + "\n";
}

}  // namespace

json term_to_json(const WightmanTerm& t) {
  json factors = json::array();
  for (const auto& f : t.factors)
    factors.push_back({{"kind", to_string(f.kind)}, {"order", f.order}, {"mass_index", f.mass_index}, {"slot", f.slot}});
  json j = {{"n", t.n},
            {"factors", factors},
            {"propagator_slot", t.propagator_slot},
            {"coefficient", {{"re", t.coefficient.real()}, {"im", t.coefficient.imag()}}},
            {"weight_power", t.weight_power},
            {"conservation", t.conservation}};
  j["prefactor"] = t.prefactor ? json("Q_" + std::to_string(t.prefactor->order())) : json(nullptr);
  return j;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"pf", "check-covariance", "check-prime", "build-wightman",
                                                 "verify-laplace", "amplitude", "divergence-scan", "schwinger"};
  return names;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated Wightman functions and scattering amplitudes from a mass spectrum", "wickfield"};
  std::string config_path, out_path, format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<int> budget;
  std::vector<double> t_grid;
  bool dump = false;
  app.add_option("--config", config_path, "model configuration (JSON)");
  app.add_option("--out", out_path, "write output to this file instead of stdout");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "seed for every random choice");
  app.add_option("--quad-budget", budget, "quadrature refinement levels")->check(CLI::Range(1, 8));
  app.add_option("--t-grid", t_grid, "times for divergence-scan")->delimiter(',');
  app.add_flag("--dump-config", dump, "print the normalized configuration and exit");
  app.require_subcommand(0, 1);
  for (const auto& name : command_names()) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ExtrasError& e) {
    err << "unknown command or argument: " << e.what() << "\n" << usage();
    return 64;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << usage();
    return 2;
  }

  std::string command;
  for (const auto* sub : app.get_subcommands()) command = sub->get_name();
  if (command.empty() && !dump) {
    err << usage();
    return 64;
  }

  try {
    ModelConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (budget) cfg.quad_budget = *budget;
    if (!t_grid.empty()) cfg.t_grid = t_grid;

    std::string text;
    if (dump) {
      text = config_to_json(cfg).dump(2) + "\n";
    } else {
      const Model m(cfg);
      Output o;
      if (command == "pf") o = cmd_pf(m);
      else if (command == "check-covariance") o = cmd_covariance(m);
      else if (command == "check-prime") o = cmd_prime(m);
      else if (command == "build-wightman") o = cmd_build(m);
      else if (command == "verify-laplace") o = cmd_verify_laplace(m);
      else if (command == "amplitude") o = cmd_amplitude(m);
      else if (command == "divergence-scan") o = cmd_divergence_scan(m);
      else o = cmd_schwinger(m);
      text = render(command, o, format);
    }
    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw Error(ErrorKind::ConfigError, out_path + ": cannot open for writing");
      f << text;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numerical(e.kind()) ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace wickfield::cli
