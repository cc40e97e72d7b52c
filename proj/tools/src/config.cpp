#include "wickfield_cli/config.hpp"

#include "wickfield/error.hpp"
#include "wickfield/polynomial.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace wickfield::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ConfigError, "field " + path + ": " + what);
}

void known_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(path + "/" + k, "unknown key");
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

// number or [re, im]
std::complex<double> complex_value(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(path, "expected a number or [re, im]");
}

json complex_json(std::complex<double> z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

std::vector<double> numbers(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(number(j[i], path + "/" + std::to_string(i)));
  return out;
}

template <class F>
void optional_field(const json& j, const char* key, const std::string& path, F&& f) {
  if (auto it = j.find(key); it != j.end()) f(*it, path + "/" + key);
}

ChannelKind channel_kind(const std::string& s, const std::string& path) {
  for (auto k : {ChannelKind::InOut, ChannelKind::InIn, ChannelKind::OutOut})
    if (s == to_string(k)) return k;
  fail(path, "expected one of in-out, in-in, out-out");
}

}  // namespace

ModelConfig default_config() { return {}; }

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  known_keys(j, "", {"schema", "dimension", "representation", "spectrum", "qe", "cumulants", "lambdas", "n", "seed",
                     "quadrature", "evaluation", "scattering"});
  optional_field(j, "schema", "", [](const json& v, const std::string& p) {
    if (integer(v, p) != 1) fail(p, "unsupported schema version");
  });
  optional_field(j, "dimension", "", [&](const json& v, const std::string& p) {
    c.dimension = static_cast<int>(integer(v, p));
    if (c.dimension != 2 && c.dimension != 3) fail(p, "dimension must be 2 or 3");
  });
  optional_field(j, "representation", "", [&](const json& v, const std::string& p) {
    const auto s = text(v, p);
    if (s == "trivial") c.representation = RepresentationKind::Trivial;
    else if (s == "vector") c.representation = RepresentationKind::Vector;
    else fail(p, "expected trivial or vector");
  });
  optional_field(j, "spectrum", "", [&](const json& v, const std::string& p) {
    c.spectrum.clear();
    for (std::size_t i = 0; i < array(v, p).size(); ++i) {
      const std::string q = p + "/" + std::to_string(i);
      known_keys(v[i], q, {"mass", "multiplicity"});
      if (!v[i].contains("mass")) fail(q + "/mass", "missing");
      Pole pole;
      pole.mass = number(v[i]["mass"], q + "/mass");
      if (v[i].contains("multiplicity")) pole.multiplicity = static_cast<int>(integer(v[i]["multiplicity"], q + "/multiplicity"));
      c.spectrum.push_back(pole);
    }
  });
  optional_field(j, "qe", "", [&](const json& v, const std::string& p) {
    c.qe.clear();
    for (std::size_t i = 0; i < array(v, p).size(); ++i) c.qe.push_back(text(v[i], p + "/" + std::to_string(i)));
  });
  optional_field(j, "cumulants", "", [&](const json& v, const std::string& p) {
    for (std::size_t i = 0; i < array(v, p).size(); ++i) {
      const std::string q = p + "/" + std::to_string(i);
      known_keys(v[i], q, {"order", "entries"});
      if (!v[i].contains("order")) fail(q + "/order", "missing");
      const int order = static_cast<int>(integer(v[i]["order"], q + "/order"));
      auto& entries = c.cumulants[order];
      if (!v[i].contains("entries")) continue;
      const auto& e = array(v[i]["entries"], q + "/entries");
      for (std::size_t k = 0; k < e.size(); ++k) {
        const std::string r = q + "/entries/" + std::to_string(k);
        known_keys(e[k], r, {"index", "value"});
        if (!e[k].contains("index") || !e[k].contains("value")) fail(r, "needs index and value");
        CumulantEntry entry;
        for (const auto& x : array(e[k]["index"], r + "/index")) entry.index.push_back(static_cast<int>(integer(x, r + "/index")));
        if (static_cast<int>(entry.index.size()) != order) fail(r + "/index", "length differs from order");
        entry.value = complex_value(e[k]["value"], r + "/value");
        entries.push_back(entry);
      }
    }
  });
  optional_field(j, "lambdas", "", [&](const json& v, const std::string& p) { c.lambdas = numbers(v, p); });
  optional_field(j, "n", "", [&](const json& v, const std::string& p) {
    c.n = static_cast<int>(integer(v, p));
    if (c.n < 2 || c.n > 6) fail(p, "n must lie in 2..6");
  });
  optional_field(j, "seed", "", [&](const json& v, const std::string& p) {
    if (!v.is_number_unsigned()) fail(p, "expected a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  });
  optional_field(j, "quadrature", "", [&](const json& v, const std::string& p) {
    known_keys(v, p, {"budget", "relative_tolerance", "laplace_normalization", "covariance_samples"});
    optional_field(v, "budget", p, [&](const json& x, const std::string& q) {
      c.quad_budget = static_cast<int>(integer(x, q));
      if (c.quad_budget < 1 || c.quad_budget > 8) fail(q, "budget must lie in 1..8");
    });
    optional_field(v, "relative_tolerance", p, [&](const json& x, const std::string& q) {
      c.relative_tolerance = number(x, q);
      if (!(c.relative_tolerance > 0.0)) fail(q, "must be positive");
    });
    optional_field(v, "laplace_normalization", p,
                   [&](const json& x, const std::string& q) { c.laplace_normalization = number(x, q); });
    optional_field(v, "covariance_samples", p, [&](const json& x, const std::string& q) {
      c.covariance_samples = static_cast<int>(integer(x, q));
      if (c.covariance_samples < 1) fail(q, "must be positive");
    });
  });
  optional_field(j, "evaluation", "", [&](const json& v, const std::string& p) {
    known_keys(v, p, {"configurations", "points", "assignment"});
    optional_field(v, "configurations", p, [&](const json& x, const std::string& q) {
      c.configurations = static_cast<int>(integer(x, q));
      if (c.configurations < 1) fail(q, "must be positive");
    });
    optional_field(v, "points", p, [&](const json& x, const std::string& q) {
      for (std::size_t i = 0; i < array(x, q).size(); ++i) c.points.push_back(numbers(x[i], q + "/" + std::to_string(i)));
    });
    optional_field(v, "assignment", p, [&](const json& x, const std::string& q) {
      for (std::size_t i = 0; i < array(x, q).size(); ++i) {
        const std::string r = q + "/" + std::to_string(i);
        known_keys(x[i], r, {"mass_index", "power"});
        SlotAssignment a;
        if (x[i].contains("mass_index")) a.mass_index = static_cast<std::size_t>(integer(x[i]["mass_index"], r + "/mass_index"));
        if (x[i].contains("power")) a.power = static_cast<int>(integer(x[i]["power"], r + "/power"));
        c.assignment.push_back(a);
      }
    });
  });
  optional_field(j, "scattering", "", [&](const json& v, const std::string& p) {
    known_keys(v, p, {"channel", "packets", "t", "t_grid"});
    optional_field(v, "channel", p, [&](const json& x, const std::string& q) {
      known_keys(x, q, {"r", "kind"});
      if (x.contains("r")) c.channel.r = static_cast<int>(integer(x["r"], q + "/r"));
      if (x.contains("kind")) c.channel.kind = channel_kind(text(x["kind"], q + "/kind"), q + "/kind");
    });
    optional_field(v, "packets", p, [&](const json& x, const std::string& q) {
      for (std::size_t i = 0; i < array(x, q).size(); ++i) {
        const std::string r = q + "/" + std::to_string(i);
        const json& e = x[i];
        known_keys(e, r, {"species", "center", "width", "epsilon", "position", "polarization"});
        PacketConfig pk;
        if (e.contains("species")) pk.species = static_cast<std::size_t>(integer(e["species"], r + "/species"));
        if (e.contains("center")) pk.center = number(e["center"], r + "/center");
        if (e.contains("width")) pk.width = number(e["width"], r + "/width");
        if (e.contains("epsilon")) pk.epsilon = number(e["epsilon"], r + "/epsilon");
        if (e.contains("position")) pk.position = number(e["position"], r + "/position");
        if (e.contains("polarization")) {
          pk.polarization.clear();
          const auto& pol = array(e["polarization"], r + "/polarization");
          for (std::size_t k = 0; k < pol.size(); ++k)
            pk.polarization.push_back(complex_value(pol[k], r + "/polarization/" + std::to_string(k)));
        }
        c.packets.push_back(pk);
      }
    });
    optional_field(v, "t", p, [&](const json& x, const std::string& q) { c.t = number(x, q); });
    optional_field(v, "t_grid", p, [&](const json& x, const std::string& q) { c.t_grid = numbers(x, q); });
  });
  return c;
}

json config_to_json(const ModelConfig& c) {
  json j;
  j["schema"] = 1;
  j["dimension"] = c.dimension;
  j["representation"] = c.representation == RepresentationKind::Trivial ? "trivial" : "vector";
  j["spectrum"] = json::array();
  for (const auto& p : c.spectrum) j["spectrum"].push_back({{"mass", p.mass}, {"multiplicity", p.multiplicity}});
  j["qe"] = c.qe;
  j["cumulants"] = json::array();
  for (const auto& [order, entries] : c.cumulants) {
    json e = json::array();
    for (const auto& x : entries) e.push_back({{"index", x.index}, {"value", complex_json(x.value)}});
    j["cumulants"].push_back({{"order", order}, {"entries", e}});
  }
  j["lambdas"] = c.lambdas;
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["quadrature"] = {{"budget", c.quad_budget},
                     {"relative_tolerance", c.relative_tolerance},
                     {"laplace_normalization", c.laplace_normalization},
                     {"covariance_samples", c.covariance_samples}};
  json assignment = json::array();
  for (const auto& a : c.assignment) assignment.push_back({{"mass_index", a.mass_index}, {"power", a.power}});
  j["evaluation"] = {{"configurations", c.configurations}, {"points", c.points}, {"assignment", assignment}};
  json packets = json::array();
  for (const auto& p : c.packets) {
    json pol = json::array();
    for (auto z : p.polarization) pol.push_back(complex_json(z));
    packets.push_back({{"species", p.species},
                       {"center", p.center},
                       {"width", p.width},
                       {"epsilon", p.epsilon},
                       {"position", p.position},
                       {"polarization", pol}});
  }
  j["scattering"] = {{"channel", {{"r", c.channel.r}, {"kind", to_string(c.channel.kind)}}},
                     {"packets", packets},
                     {"t", c.t},
                     {"t_grid", c.t_grid}};
  return j;
}

ModelConfig parse_config(const std::string& content, const std::string& source) {
  json j;
  try {
    j = json::parse(content);
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, content.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (content[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorKind::ConfigError,
                source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
  }
  try {
    return config_from_json(j);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, source + ": " + e.message());
  }
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

namespace {

PolyMatrix build_qe(const ModelConfig& c, int size) {
  if (static_cast<int>(c.qe.size()) != size * size)
    fail("/qe", "expected " + std::to_string(size * size) + " entries for this representation");
  std::vector<Polynomial> entries;
  for (std::size_t i = 0; i < c.qe.size(); ++i) {
    try {
      entries.push_back(parse_poly(c.qe[i], c.dimension));
    } catch (const Error& e) {
      fail("/qe/" + std::to_string(i), e.message());
    }
  }
  return PolyMatrix(size, c.dimension, std::move(entries));
}

MassSpectrum build_spectrum(const ModelConfig& c) {
  try {
    return MassSpectrum(c.spectrum);
  } catch (const Error& e) {
    fail("/spectrum", e.message());
  }
}

}  // namespace

Model::Model(ModelConfig c)
    : config(std::move(c)),
      spectrum(build_spectrum(config)),
      representation{config.representation, config.dimension},
      qe(build_qe(config, representation.size())) {
  if (qe.degree() > kappa(spectrum))
    fail("/qe", "degree " + std::to_string(qe.degree()) + " exceeds the bound " + std::to_string(kappa(spectrum)));
  if (!config.lambdas.empty() && config.lambdas.size() != spectrum.size())
    fail("/lambdas", "expected one value per mass");
  for (const auto& [order, entries] : config.cumulants)
    for (const auto& e : entries)
      for (int b : e.index)
        if (b < 0 || b >= representation.size()) fail("/cumulants", "index out of range for order " + std::to_string(order));
  for (const auto& p : config.points)
    if (static_cast<int>(p.size()) != config.dimension) fail("/evaluation/points", "point dimension differs from d");
}

NoiseCumulantTensor Model::cumulant(int order) const {
  auto it = config.cumulants.find(order);
  if (it == config.cumulants.end()) return NoiseCumulantTensor::diagonal(order, representation.size(), 1.0);
  NoiseCumulantTensor t(order, representation.size());
  for (const auto& e : it->second) t.set_symmetric(e.index, e.value);
  return t;
}

std::shared_ptr<const TensorPolynomial> Model::prefactor(int order) const {
  const auto c = cumulant(order);
  const bool scalar = representation.size() == 1 && qe(0, 0) == Polynomial::constant(config.dimension, 1.0) &&
                      c.values().front() == Complex(1.0);
  if (scalar) return nullptr;
  return std::make_shared<const TensorPolynomial>(tensor_assemble(qe, c, order));
}

std::vector<WavePacket> Model::packets() const {
  if (config.packets.empty()) fail("/scattering/packets", "no packets given");
  std::vector<WavePacket> out;
  for (std::size_t i = 0; i < config.packets.size(); ++i) {
    const auto& p = config.packets[i];
    try {
      auto w = make_packet(spectrum, p.species, p.center, p.width, p.epsilon, p.polarization);
      w.position = p.position;
      out.push_back(std::move(w));
    } catch (const Error& e) {
      throw Error(e.kind(), "field /scattering/packets/" + std::to_string(i) + ": " + e.message());
    }
  }
  return out;
}

}  // namespace wickfield::cli
