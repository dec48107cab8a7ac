#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "psido/errors.hpp"
#include "psido/quantizer.hpp"

namespace psido {

namespace {

using nlohmann::json;

GroupDescriptor group_from_name(const std::string& name) {
  if (name == "su2") return GroupDescriptor::su2();
  int n = 0;
  if (std::sscanf(name.c_str(), "torus(%d)", &n) == 1 && n >= 1) return GroupDescriptor::torus(n);
  throw ConfigError("unknown group '" + name + "' in matrix header");
}

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}

}  // namespace

void write_operator_matrix(const OperatorMatrix& a, const std::filesystem::path& stem) {
  const auto& w = a.window;
  json basis = json::array();
  for (std::size_t c = 0; c < w.total_dim(); ++c) {
    const auto b = w.locate(c);
    basis.push_back({{"index", w.duals()[b.dual].index}, {"i", b.row}, {"j", b.col}});
  }
  const json header = {{"format", "psido-operator-matrix"},
                       {"version", 1},
                       {"group", w.group().name()},
                       {"lambda", w.lambda()},
                       {"total_dim", w.total_dim()},
                       {"label", a.label},
                       {"basis", basis}};
  std::ofstream hj(with_ext(stem, ".json"));
  if (!hj) throw ConfigError("cannot write " + with_ext(stem, ".json").string());
  hj << header.dump(2) << '\n';

  std::ofstream csv(with_ext(stem, ".csv"));
  if (!csv) throw ConfigError("cannot write " + with_ext(stem, ".csv").string());
  csv << "row,col,re,im\n";
  char buf[96];
  for (Eigen::Index r = 0; r < a.entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.entries.cols(); ++c) {
      const cplx v = a.entries(r, c);
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", static_cast<long>(r), static_cast<long>(c), v.real(),
                    v.imag());
      csv << buf;
    }
  }
}

OperatorMatrix read_operator_matrix(const std::filesystem::path& stem) {
  std::ifstream hj(with_ext(stem, ".json"));
  if (!hj) throw ConfigError("cannot read " + with_ext(stem, ".json").string());
  json header;
  try {
    hj >> header;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed matrix header: ") + e.what());
  }
  if (header.value("format", "") != "psido-operator-matrix") throw ConfigError("not an operator matrix header");

  TruncationWindow window(group_from_name(header.at("group").get<std::string>()), header.at("lambda").get<double>());
  if (window.total_dim() != header.at("total_dim").get<std::size_t>())
    throw ShapeError("matrix header dimension does not match its window");
  const auto n = static_cast<Eigen::Index>(window.total_dim());
  OperatorMatrix out{window, CMatrix::Zero(n, n), header.value("label", "")};

  std::ifstream csv(with_ext(stem, ".csv"));
  if (!csv) throw ConfigError("cannot read " + with_ext(stem, ".csv").string());
  std::string line;
  std::getline(csv, line);
  if (line != "row,col,re,im") throw ConfigError("unexpected matrix CSV header");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    long r = 0;
    long c = 0;
    char* end = nullptr;
    const char* s = line.c_str();
    r = std::strtol(s, &end, 10);
    if (*end != ',') throw ConfigError("malformed matrix CSV line: " + line);
    c = std::strtol(end + 1, &end, 10);
    if (*end != ',') throw ConfigError("malformed matrix CSV line: " + line);
    const double re = std::strtod(end + 1, &end);
    if (*end != ',') throw ConfigError("malformed matrix CSV line: " + line);
    const double im = std::strtod(end + 1, &end);
    if (r < 0 || c < 0 || r >= n || c >= n) throw RangeError("matrix CSV entry outside the window");
    out.entries(r, c) = cplx(re, im);
  }
  return out;
}

}  // namespace psido
