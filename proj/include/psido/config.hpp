#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "psido/spectral.hpp"
#include "psido/symbol.hpp"

namespace psido {

// One run of the command-line tool. Every field is echoed into the outputs.
struct RunConfig {
  GroupDescriptor group = GroupDescriptor::torus(1);
  std::string symbol;                 // e.g. "bessel{-2}", "coeff{1,0@1}:bessel{-1}"
  std::vector<double> ladder;         // strictly increasing window cutoffs
  std::vector<double> rs{1.0};        // Schatten exponents for spectrum
  std::optional<double> lambda;       // single window for quantize / russo
  std::optional<int> grid_resolution; // quadrature override
  std::string function;               // band-limited input of quantize
  nlohmann::json criteria = nlohmann::json::array();
  nlohmann::json extra = nlohmann::json::object();  // command-specific keys
  std::filesystem::path output = ".";
  std::uint64_t seed = 0;
  VerdictThresholds thresholds;

  nlohmann::json provenance() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// "torus(2)", "su2", or {"kind": "torus", "n": 2}.
GroupDescriptor parse_group(const nlohmann::json& j);

// Symbol grammar:
//   bessel{m} | dyadic{n,kappa} | multiplier:identity|zero|laplace|linear
//   coeff{TERMS}:BASE with TERMS = re,im@k1,...,kn (torus) or re,im@2l,i,j (su2)
//   separated by '|'.
MatrixSymbol parse_symbol(const std::string& spec, const GroupDescriptor& g);
BandLimitedFunction parse_band_limited(const std::string& terms, const GroupDescriptor& g);

std::vector<double> parse_ladder(const std::string& comma_list);

}  // namespace psido
