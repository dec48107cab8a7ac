#include "psido/config.hpp"

#include <fstream>
#include <sstream>

#include "psido/errors.hpp"

namespace psido {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a number in " + context + ", got '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer in " + context + ", got '" + s + "'");
  }
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

// Inside of "name{...}" when the whole spec has that shape.
std::optional<std::string> braced(const std::string& spec, const std::string& name) {
  if (!starts_with(spec, name + "{") || spec.back() != '}') return std::nullopt;
  return spec.substr(name.size() + 1, spec.size() - name.size() - 2);
}

std::vector<double> ladder_from_json(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object()) return dyadic_ladder(j.at("start").get<double>(), j.at("last").get<double>());
  if (j.is_string()) return parse_ladder(j.get<std::string>());
  throw ConfigError("ladder must be a list, a {start, last} object or a comma list");
}

void check_ladder(const std::vector<double>& ladder) {
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (!(ladder[k] >= 1.0)) throw ConfigError("ladder cutoffs must be >= 1");
    if (k && !(ladder[k] > ladder[k - 1])) throw ConfigError("ladder must be strictly increasing");
  }
}

}  // namespace

GroupDescriptor parse_group(const json& j) {
  if (j.is_string()) {
    const auto s = trim(j.get<std::string>());
    if (s == "su2" || s == "SU2" || s == "SU(2)") return GroupDescriptor::su2();
    if (s == "torus") return GroupDescriptor::torus(1);
    if (auto inner = starts_with(s, "torus(") && s.back() == ')' ? std::optional(s.substr(6, s.size() - 7))
                                                                  : std::nullopt) {
      const int n = to_int(*inner, "group");
      if (n < 1) throw ConfigError("torus dimension must be positive");
      return GroupDescriptor::torus(n);
    }
    throw ConfigError("unknown group '" + s + "'");
  }
  if (j.is_object()) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "su2") return GroupDescriptor::su2();
    if (kind == "torus") {
      const int n = j.value("n", 1);
      if (n < 1) throw ConfigError("torus dimension must be positive");
      return GroupDescriptor::torus(n);
    }
    throw ConfigError("unknown group kind '" + kind + "'");
  }
  throw ConfigError("group must be a string or an object");
}

BandLimitedFunction parse_band_limited(const std::string& text, const GroupDescriptor& g) {
  std::vector<BandLimitedTerm> terms;
  for (const auto& item : split(text, '|')) {
    if (item.empty()) throw ConfigError("empty term in '" + text + "'");
    const auto at = item.find('@');
    if (at == std::string::npos) throw ConfigError("term '" + item + "' needs re,im@index");
    const auto value = split(item.substr(0, at), ',');
    const auto index = split(item.substr(at + 1), ',');
    if (value.size() != 2) throw ConfigError("term '" + item + "' needs a value re,im");
    BandLimitedTerm t;
    t.coefficient = cplx(to_double(value[0], item), to_double(value[1], item));
    if (g.is_torus()) {
      if (static_cast<int>(index.size()) != g.dimension())
        throw ConfigError("term '" + item + "' needs " + std::to_string(g.dimension()) + " torus indices");
      std::vector<int> k;
      for (const auto& s : index) k.push_back(to_int(s, item));
      t.rep = torus_dual(std::move(k));
    } else {
      if (index.size() != 3) throw ConfigError("SU(2) term '" + item + "' needs 2l,i,j");
      const int two_l = to_int(index[0], item);
      if (two_l < 0) throw ConfigError("spin index must be >= 0");
      t.rep = su2_dual(two_l);
      t.row = to_int(index[1], item);
      t.col = to_int(index[2], item);
      if (t.row < 0 || t.col < 0 || t.row > two_l || t.col > two_l)
        throw ConfigError("matrix index outside representation in '" + item + "'");
    }
    terms.push_back(std::move(t));
  }
  return BandLimitedFunction(g, std::move(terms));
}

MatrixSymbol parse_symbol(const std::string& raw, const GroupDescriptor& g) {
  const std::string spec = trim(raw);
  if (spec.empty()) throw ConfigError("no symbol given");

  if (auto inner = braced(spec, "bessel")) return builtin_bessel(g, to_double(trim(*inner), spec));

  if (auto inner = braced(spec, "dyadic")) {
    const auto parts = split(*inner, ',');
    if (parts.size() != 2) throw ConfigError("dyadic symbol needs {n,kappa}");
    const int n = to_int(parts[0], spec);
    if (!(g == GroupDescriptor::torus(n)))
      throw ConfigError("dyadic{" + parts[0] + ",...} needs group torus(" + parts[0] + "), got " + g.name());
    return builtin_dyadic_atypical(n, to_double(parts[1], spec));
  }

  if (starts_with(spec, "multiplier:")) {
    const auto name = spec.substr(11);
    if (name == "identity") return builtin_identity(g);
    if (name == "zero") return builtin_zero(g);
    if (name == "laplace")
      return builtin_scalar_multiplier(g, [](const DualPoint& xi) { return cplx(xi.eigenvalue); }, "laplace")
          .with_order(2.0, std::make_pair(1.0, 0.0));
    if (name == "linear") {
      if (!g.is_torus()) throw UnsupportedGroupError("multiplier:linear is defined on the torus only");
      return builtin_scalar_multiplier(g, [](const DualPoint& xi) { return cplx(xi.index[0]); }, "linear")
          .with_order(1.0, std::make_pair(1.0, 0.0));
    }
    throw ConfigError("unknown multiplier '" + name + "'");
  }

  if (starts_with(spec, "coeff{")) {
    const auto close = spec.find("}:");
    if (close == std::string::npos) throw ConfigError("coeff symbol needs coeff{terms}:base");
    const auto c = parse_band_limited(spec.substr(6, close - 6), g);
    const auto base = parse_symbol(spec.substr(close + 2), g);
    return builtin_coefficient(c, base).with_label(spec);
  }

  throw ConfigError("unknown symbol '" + spec + "'");
}

std::vector<double> parse_ladder(const std::string& comma_list) {
  std::vector<double> out;
  for (const auto& s : split(comma_list, ',')) out.push_back(to_double(s, "ladder"));
  check_ladder(out);
  return out;
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    if (j.contains("group")) c.group = parse_group(j.at("group"));
    c.symbol = j.value("symbol", "");
    if (j.contains("ladder")) c.ladder = ladder_from_json(j.at("ladder"));
    if (j.contains("r")) {
      const auto& r = j.at("r");
      c.rs = r.is_array() ? r.get<std::vector<double>>() : std::vector<double>{r.get<double>()};
    }
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
    if (j.contains("grid_resolution")) c.grid_resolution = j.at("grid_resolution").get<int>();
    c.function = j.value("function", "");
    if (j.contains("criteria")) {
      c.criteria = j.at("criteria");
      if (!c.criteria.is_array()) throw ConfigError("criteria must be a list");
    }
    c.extra = j.value("options", json::object());
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("thresholds")) c.thresholds = VerdictThresholds::from_json(j.at("thresholds"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  check_ladder(c.ladder);
  for (double r : c.rs)
    if (!(r > 0.0)) throw ConfigError("Schatten exponents must be > 0");
  if (c.lambda && !(*c.lambda >= 1.0)) throw ConfigError("lambda must be >= 1");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json RunConfig::provenance() const {
  json j = {{"group", group.name()},
            {"symbol", symbol},
            {"ladder", ladder},
            {"r", rs},
            {"seed", seed},
            {"thresholds", thresholds.to_json()}};
  if (lambda) j["lambda"] = *lambda;
  if (grid_resolution) j["grid_resolution"] = *grid_resolution;
  if (!function.empty()) j["function"] = function;
  if (!extra.empty()) j["options"] = extra;
  return j;
}

}  // namespace psido
