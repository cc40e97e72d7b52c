#pragma once

#include "wickfield/green.hpp"
#include "wickfield/poly_matrix.hpp"
#include "wickfield/scattering.hpp"
#include "wickfield/spectrum.hpp"

#include <json.hpp>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wickfield::cli {

struct CumulantEntry {
  std::vector<int> index;
  std::complex<double> value;
};

struct PacketConfig {
  std::size_t species = 0;
  double center = 0.0;
  double width = 0.5;
  double epsilon = 0.3;
  double position = 0.0;
  std::vector<std::complex<double>> polarization{1.0};
};

/// Everything one run needs. Unset optional sections fall back to generated defaults.
struct ModelConfig {
  int dimension = 2;
  RepresentationKind representation = RepresentationKind::Trivial;
  std::vector<Pole> spectrum{{1.0, 1}};
  std::vector<std::string> qe{"1"};
  /// order -> sparse entries; orders without entries use the diagonal tensor with value 1
  std::map<int, std::vector<CumulantEntry>> cumulants;
  std::vector<double> lambdas;  ///< empty: all 1
  int n = 2;
  std::uint64_t seed = 1;

  int quad_budget = 2;
  double relative_tolerance = 1e-4;
  double laplace_normalization = 1.0;
  int covariance_samples = 50;

  int configurations = 1;               ///< random point sets when `points` is empty
  std::vector<EuclideanPoint> points;   ///< verify-laplace / schwinger evaluation points
  SchwingerAssignment assignment;       ///< schwinger; empty: (0, 1) in every slot

  Channel channel;
  std::vector<PacketConfig> packets;
  double t = 80.0;
  std::vector<double> t_grid;           ///< empty: default grid
};

ModelConfig default_config();

/// Throws Error(ConfigError) naming the offending field.
ModelConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ModelConfig& c);

/// Parses text; syntax errors report `source:line:column`.
ModelConfig parse_config(const std::string& text, const std::string& source);
ModelConfig load_config(const std::string& path);

/// Derived objects, validated against each other.
struct Model {
  ModelConfig config;
  MassSpectrum spectrum;
  Representation representation;
  PolyMatrix qe;

  explicit Model(ModelConfig c);
  NoiseCumulantTensor cumulant(int order) const;
  /// Null for the plain scalar model (Q_E = 1, unit cumulant).
  std::shared_ptr<const TensorPolynomial> prefactor(int order) const;
  std::vector<WavePacket> packets() const;
};

}  // namespace wickfield::cli
