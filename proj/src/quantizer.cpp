#include "psido/quantizer.hpp"

#include <cmath>

#include "psido/errors.hpp"

namespace psido {

// Flat layout used throughout: for a function f, the vector
//   v[col(xi, a, b)] = f^(xi)(b, a) = sum_n w_n f(x_n) conj(xi_ab(x_n))
// is reps^H (w .* f). The quantisation sum then reads
//   Af(x_n) = sum_{col(xi,a,b)} d_xi (xi(x_n) sigma(x_n, xi))_ab v[col],
// a plain matrix-vector product with the "symbol table" below.

namespace {

void require_resolved(const QuadratureGrid& grid, double degree, const char* what) {
  if (grid.band_limit() + 1e-9 < degree)
    throw AliasingError(std::string(what) + ": grid resolution " + std::to_string(grid.resolution) +
                        " resolves band degree " + std::to_string(grid.band_limit()) + " < required " +
                        std::to_string(degree));
}

using RowBlock = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>,
                            Eigen::Unaligned>;

// Row of a column-major matrix viewed as the d x d row-major block of one dual.
CMatrix rep_block(const CMatrix& table, Eigen::Index node, std::size_t offset, int d) {
  CMatrix out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = table(node, static_cast<Eigen::Index>(offset) + i * d + j);
  return out;
}

// nodes x total_dim table with entries d_xi (xi(x_n) sigma(x_n, xi))_ab.
CMatrix symbol_table(const FourierEngine& engine, const MatrixSymbol& s) {
  const auto& window = engine.window();
  const auto& grid = engine.grid();
  const auto& reps = engine.rep_table();
  const auto nodes = static_cast<Eigen::Index>(grid.size());
  CMatrix table(nodes, static_cast<Eigen::Index>(window.total_dim()));
  const GroupPoint origin = identity_point(window.group());

  for (std::size_t k = 0; k < window.size(); ++k) {
    const auto& xi = window.duals()[k];
    const int d = xi.dim;
    const auto off = static_cast<Eigen::Index>(window.offset(k));
    const auto dd = static_cast<Eigen::Index>(d) * d;
    if (s.scalar()) {
      if (s.invariant()) {
        const cplx v = static_cast<double>(d) * s.scalar_value(origin, xi);
        table.middleCols(off, dd) = v * reps.middleCols(off, dd);
      } else {
        for (Eigen::Index n = 0; n < nodes; ++n) {
          const cplx v = static_cast<double>(d) * s.scalar_value(grid.nodes[static_cast<std::size_t>(n)], xi);
          table.row(n).segment(off, dd) = v * reps.row(n).segment(off, dd);
        }
      }
      continue;
    }
    CMatrix sigma = s.invariant() ? s(origin, xi) : CMatrix();
    for (Eigen::Index n = 0; n < nodes; ++n) {
      if (!s.invariant()) sigma = s(grid.nodes[static_cast<std::size_t>(n)], xi);
      const CMatrix prod = rep_block(reps, n, window.offset(k), d) * sigma;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) table(n, off + a * d + b) = static_cast<double>(d) * prod(a, b);
    }
  }
  return table;
}

Eigen::VectorXcd to_vector(const FunctionSamples& f) {
  return Eigen::Map<const Eigen::VectorXcd>(f.data(), static_cast<Eigen::Index>(f.size()));
}

FunctionSamples to_samples(const Eigen::VectorXcd& v) { return FunctionSamples(v.data(), v.data() + v.size()); }

Eigen::VectorXd weight_vector(const QuadratureGrid& grid) {
  return Eigen::Map<const Eigen::VectorXd>(grid.weights.data(), static_cast<Eigen::Index>(grid.weights.size()));
}

// Flat vector v[col(xi,a,b)] = f^(xi)(b,a) -> blocks.
FourierCoefficients unflatten(const TruncationWindow& window, const Eigen::VectorXcd& v) {
  FourierCoefficients out{window, {}};
  out.blocks.reserve(window.size());
  for (std::size_t k = 0; k < window.size(); ++k) {
    const int d = window.duals()[k].dim;
    CMatrix block(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) block(b, a) = v(static_cast<Eigen::Index>(window.offset(k)) + a * d + b);
    out.blocks.push_back(std::move(block));
  }
  return out;
}

Eigen::VectorXcd flatten(const FourierCoefficients& coeffs) {
  const auto& window = coeffs.window;
  if (coeffs.blocks.size() != window.size()) throw ShapeError("coefficient count does not match window");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(window.total_dim()));
  for (std::size_t k = 0; k < window.size(); ++k) {
    const int d = window.duals()[k].dim;
    const auto& block = coeffs.blocks[k];
    if (block.rows() != d || block.cols() != d) throw ShapeError("coefficient block has wrong size");
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) v(static_cast<Eigen::Index>(window.offset(k)) + a * d + b) = block(b, a);
  }
  return v;
}

void check_same_window(const TruncationWindow& a, const TruncationWindow& b) {
  if (!(a.group() == b.group()) || a.total_dim() != b.total_dim() || a.lambda() != b.lambda())
    throw RangeError("window mismatch");
}

Eigen::VectorXd sqrt_dims(const TruncationWindow& window) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(window.total_dim()));
  for (std::size_t k = 0; k < window.size(); ++k) {
    const int d = window.duals()[k].dim;
    out.segment(static_cast<Eigen::Index>(window.offset(k)), static_cast<Eigen::Index>(d) * d)
        .setConstant(std::sqrt(static_cast<double>(d)));
  }
  return out;
}

// phi_col(x) = sqrt(d) xi_ij(x) for every basis column.
Eigen::VectorXcd basis_at(const TruncationWindow& window, const GroupPoint& x) {
  Eigen::VectorXcd phi(static_cast<Eigen::Index>(window.total_dim()));
  for (std::size_t k = 0; k < window.size(); ++k) {
    const auto& xi = window.duals()[k];
    const CMatrix r = rep_matrix(window.group(), xi, x);
    const double sd = std::sqrt(static_cast<double>(xi.dim));
    for (int i = 0; i < xi.dim; ++i)
      for (int j = 0; j < xi.dim; ++j)
        phi(static_cast<Eigen::Index>(window.offset(k)) + i * xi.dim + j) = sd * r(i, j);
  }
  return phi;
}

}  // namespace

// ---------------------------------------------------------------------------
// FourierEngine

FourierEngine::FourierEngine(TruncationWindow window, QuadratureGrid grid)
    : window_(std::move(window)), grid_(std::move(grid)) {
  if (!(window_.group() == grid_.group)) throw TypeMismatchError("window and grid live on different groups");
  reps_.resize(static_cast<Eigen::Index>(grid_.size()), static_cast<Eigen::Index>(window_.total_dim()));
  for (std::size_t n = 0; n < grid_.size(); ++n) {
    for (std::size_t k = 0; k < window_.size(); ++k) {
      const auto& xi = window_.duals()[k];
      const CMatrix r = rep_matrix(window_.group(), xi, grid_.nodes[n]);
      for (int i = 0; i < xi.dim; ++i)
        for (int j = 0; j < xi.dim; ++j)
          reps_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(window_.offset(k)) + i * xi.dim + j) = r(i, j);
    }
  }
}

FourierCoefficients FourierEngine::forward(const FunctionSamples& f) const {
  require_resolved(grid_, 2.0 * window_.degree(), "fourier_forward");
  if (f.size() != grid_.size()) throw ShapeError("sample count does not match grid");
  const Eigen::VectorXcd wf = weight_vector(grid_).cast<cplx>().cwiseProduct(to_vector(f));
  return unflatten(window_, reps_.adjoint() * wf);
}

FunctionSamples FourierEngine::inverse(const FourierCoefficients& coeffs) const {
  check_same_window(window_, coeffs.window);
  Eigen::VectorXcd v = flatten(coeffs);
  for (std::size_t k = 0; k < window_.size(); ++k) {
    const int d = window_.duals()[k].dim;
    v.segment(static_cast<Eigen::Index>(window_.offset(k)), static_cast<Eigen::Index>(d) * d) *= static_cast<double>(d);
  }
  return to_samples(reps_ * v);
}

FunctionSamples FourierEngine::apply(const MatrixSymbol& s, const FourierCoefficients& coeffs) const {
  check_same_window(window_, coeffs.window);
  if (!(s.group() == window_.group())) throw TypeMismatchError("symbol and window live on different groups");
  return to_samples(symbol_table(*this, s) * flatten(coeffs));
}

FunctionSamples FourierEngine::basis_function(std::size_t column) const {
  const auto b = window_.locate(column);
  const double sd = std::sqrt(static_cast<double>(window_.duals()[b.dual].dim));
  return to_samples(sd * reps_.col(static_cast<Eigen::Index>(column)));
}

cplx FourierEngine::inner(const FunctionSamples& f, const FunctionSamples& g) const {
  if (f.size() != grid_.size() || g.size() != grid_.size()) throw ShapeError("sample count does not match grid");
  cplx sum = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) sum += grid_.weights[n] * f[n] * std::conj(g[n]);
  return sum;
}

// ---------------------------------------------------------------------------
// Free functions

double assembly_degree(const MatrixSymbol& s, const TruncationWindow& window) {
  if (!s.x_degree())
    throw ContractError("x-dependent symbol '" + s.label() + "' has no declared band limit");
  return 2.0 * window.degree() + *s.x_degree();
}

QuadratureGrid assembly_grid(const MatrixSymbol& s, const TruncationWindow& window) {
  return haar_quadrature(window.group(), resolution_for_degree(assembly_degree(s, window)));
}

FourierCoefficients fourier_forward(const FunctionSamples& f, const TruncationWindow& window,
                                    const QuadratureGrid& grid) {
  require_resolved(grid, 2.0 * window.degree(), "fourier_forward");
  return FourierEngine(window, grid).forward(f);
}

FunctionSamples fourier_inverse(const FourierCoefficients& coeffs, const QuadratureGrid& grid) {
  return FourierEngine(coeffs.window, grid).inverse(coeffs);
}

FunctionSamples apply_op(const MatrixSymbol& s, const FunctionSamples& f, const TruncationWindow& window,
                         const QuadratureGrid& grid) {
  require_resolved(grid, 2.0 * window.degree(), "apply_op");
  const FourierEngine engine(window, grid);
  return engine.apply(s, engine.forward(f));
}

OperatorMatrix assemble_matrix(const MatrixSymbol& s, const TruncationWindow& window,
                               const QuadratureGrid& grid, AssemblyRoute route) {
  if (!(s.group() == window.group())) throw TypeMismatchError("symbol and window live on different groups");
  if (route == AssemblyRoute::automatic)
    route = s.invariant() ? AssemblyRoute::invariant_blocks : AssemblyRoute::quadrature;

  OperatorMatrix out{window, CMatrix::Zero(static_cast<Eigen::Index>(window.total_dim()),
                                           static_cast<Eigen::Index>(window.total_dim())),
                     s.label()};
  if (route == AssemblyRoute::invariant_blocks) {
    if (!s.invariant()) throw ContractError("invariant-block assembly needs an invariant symbol");
    const GroupPoint origin = identity_point(window.group());
    for (std::size_t k = 0; k < window.size(); ++k) {
      const auto& xi = window.duals()[k];
      const CMatrix sigma = s(origin, xi);
      const auto off = static_cast<Eigen::Index>(window.offset(k));
      const int d = xi.dim;
      // Op(sigma) xi_ij = sum_a sigma_aj xi_ia
      for (int i = 0; i < d; ++i)
        out.entries.block(off + i * d, off + i * d, d, d) = sigma;
    }
    return out;
  }

  require_resolved(grid, assembly_degree(s, window), "assemble_matrix");
  const FourierEngine engine(window, grid);
  const auto& reps = engine.rep_table();
  const Eigen::VectorXd w = weight_vector(grid);
  // Columns of phi are the basis functions sqrt(d) xi_ij on the grid.
  const CMatrix phi = reps * sqrt_dims(window).cast<cplx>().asDiagonal();
  const CMatrix weighted_phi = w.cast<cplx>().asDiagonal() * phi;
  // Fourier data of every basis function, then the quantisation sum at every
  // node, then inner products against the basis.
  const CMatrix coeffs = reps.adjoint() * weighted_phi;
  const CMatrix applied = symbol_table(engine, s) * coeffs;
  out.entries = weighted_phi.adjoint() * applied;
  return out;
}

OperatorMatrix assemble_matrix(const MatrixSymbol& s, const TruncationWindow& window, AssemblyRoute route) {
  if (route == AssemblyRoute::invariant_blocks ||
      (route == AssemblyRoute::automatic && s.invariant()))
    return assemble_matrix(s, window, haar_quadrature(window.group(), 2), route);
  return assemble_matrix(s, window, assembly_grid(s, window), route);
}

std::vector<CMatrix> extract_symbols(const OperatorMatrix& a, const GroupPoint& x) {
  const auto& window = a.window;
  const Eigen::VectorXcd phi = basis_at(window, x);
  // g[col] = sum_row A(row, col) phi_row(x) = sqrt(d) (A xi_ij)(x)
  const Eigen::VectorXcd g = a.entries.transpose() * phi;
  std::vector<CMatrix> out;
  out.reserve(window.size());
  for (std::size_t k = 0; k < window.size(); ++k) {
    const auto& xi = window.duals()[k];
    const int d = xi.dim;
    const double sd = std::sqrt(static_cast<double>(d));
    CMatrix axi(d, d);
    CMatrix rep(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const auto col = static_cast<Eigen::Index>(window.offset(k)) + i * d + j;
        axi(i, j) = g(col) / sd;
        rep(i, j) = phi(col) / sd;
      }
    }
    out.push_back(rep.adjoint() * axi);
  }
  return out;
}

CMatrix extract_symbol(const OperatorMatrix& a, const GroupPoint& x, const DualPoint& xi) {
  const auto pos = a.window.find(xi);
  if (!pos) throw RangeError("dual point outside the operator window");
  return extract_symbols(a, x)[*pos];
}

double extracted_symbol_hs_mass(const OperatorMatrix& a, const QuadratureGrid& grid) {
  if (!(grid.group == a.window.group())) throw TypeMismatchError("grid and operator live on different groups");
  require_resolved(grid, 2.0 * a.window.degree(), "extracted_symbol_hs_mass");
  double total = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto blocks = extract_symbols(a, grid.nodes[n]);
    double at_node = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k) at_node += a.window.duals()[k].dim * blocks[k].squaredNorm();
    total += grid.weights[n] * at_node;
  }
  return total;
}

cplx schwartz_kernel(const MatrixSymbol& s, const GroupPoint& x, const GroupPoint& y,
                     const TruncationWindow& window) {
  if (window.size() == 0) throw EmptyWindowError("empty window");
  const auto& g = window.group();
  const GroupPoint z = multiply(g, inverse(g, y), x);
  cplx sum = 0.0;
  for (const auto& xi : window.duals()) {
    if (s.scalar()) {
      sum += static_cast<double>(xi.dim) * rep_matrix(g, xi, z).trace() * s.scalar_value(x, xi);
    } else {
      sum += static_cast<double>(xi.dim) * (rep_matrix(g, xi, z) * s(x, xi)).trace();
    }
  }
  return sum;
}

cplx schwartz_kernel(const OperatorMatrix& a, const GroupPoint& x, const GroupPoint& y) {
  const Eigen::VectorXcd px = basis_at(a.window, x);
  const Eigen::VectorXcd py = basis_at(a.window, y);
  return px.transpose() * a.entries * py.conjugate();
}

double lp_norm(const FunctionSamples& f, const QuadratureGrid& grid, double p) {
  if (!(p > 0.0)) throw ParameterError("L^p exponent must be > 0");
  if (f.size() != grid.size()) throw ShapeError("sample count does not match grid");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) sum += grid.weights[n] * std::pow(std::abs(f[n]), p);
  return std::pow(sum, 1.0 / p);
}

double dual_lp_norm(const FourierCoefficients& coeffs, double p) {
  if (!(p > 0.0)) throw ParameterError("l^p exponent must be > 0");
  const auto& duals = coeffs.window.duals();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t k = 0; k < duals.size(); ++k)
      m = std::max(m, coeffs.blocks[k].norm() / std::sqrt(static_cast<double>(duals[k].dim)));
    return m;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < duals.size(); ++k)
    sum += std::pow(static_cast<double>(duals[k].dim), p * (2.0 / p - 0.5)) * std::pow(coeffs.blocks[k].norm(), p);
  return std::pow(sum, 1.0 / p);
}

FunctionSamples sample(const BandLimitedFunction& f, const QuadratureGrid& grid) {
  if (!(f.group() == grid.group)) throw TypeMismatchError("function and grid live on different groups");
  FunctionSamples out;
  out.reserve(grid.size());
  for (const auto& x : grid.nodes) out.push_back(f(x));
  return out;
}

}  // namespace psido
