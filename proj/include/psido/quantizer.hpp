#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "psido/group.hpp"
#include "psido/symbol.hpp"
#include "psido/window.hpp"

namespace psido {

using FunctionSamples = std::vector<cplx>;  // values at the grid nodes

struct FourierCoefficients {
  TruncationWindow window;
  std::vector<CMatrix> blocks;  // f^(xi), one per window dual
};

// The finite section of an operator in the Peter-Weyl basis sqrt(d) xi_ij.
// entries(row, col) = (A phi_col, phi_row)_{L^2}.
struct OperatorMatrix {
  TruncationWindow window;
  CMatrix entries;
  std::string label;
};

// Cached representation values xi_ij(x_n) for every node of a grid and every
// basis element of a window; serves all transforms between the two.
class FourierEngine {
 public:
  FourierEngine(TruncationWindow window, QuadratureGrid grid);

  const TruncationWindow& window() const noexcept { return window_; }
  const QuadratureGrid& grid() const noexcept { return grid_; }

  // xi_ij(x_n) for basis column (xi, i, j).
  cplx rep_entry(std::size_t node, std::size_t column) const {
    return reps_(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(column));
  }
  // nodes x total_dim matrix of xi_ij(x_n).
  const CMatrix& rep_table() const noexcept { return reps_; }

  // f^(xi) = int f(x) xi(x)^* dx by quadrature. Requires the grid to resolve
  // products of two window-band functions.
  FourierCoefficients forward(const FunctionSamples& f) const;
  // f(x) = sum_xi d_xi Tr[xi(x) f^(xi)] at every node.
  FunctionSamples inverse(const FourierCoefficients& coeffs) const;
  // Af(x) = sum_xi d_xi Tr[xi(x) sigma(x, xi) f^(xi)] at every node.
  FunctionSamples apply(const MatrixSymbol& s, const FourierCoefficients& coeffs) const;

  // sqrt(d) xi_ij sampled on the grid.
  FunctionSamples basis_function(std::size_t column) const;

  // sum_n w_n f(x_n) conj(g(x_n))
  cplx inner(const FunctionSamples& f, const FunctionSamples& g) const;

 private:
  TruncationWindow window_;
  QuadratureGrid grid_;
  CMatrix reps_;
};

// Band degree the grid must resolve exactly to assemble s on the window.
double assembly_degree(const MatrixSymbol& s, const TruncationWindow& window);
// Smallest Haar grid that assembles s on the window without aliasing.
QuadratureGrid assembly_grid(const MatrixSymbol& s, const TruncationWindow& window);

FourierCoefficients fourier_forward(const FunctionSamples& f, const TruncationWindow& window,
                                    const QuadratureGrid& grid);
FunctionSamples fourier_inverse(const FourierCoefficients& coeffs, const QuadratureGrid& grid);

FunctionSamples apply_op(const MatrixSymbol& s, const FunctionSamples& f,
                         const TruncationWindow& window, const QuadratureGrid& grid);

enum class AssemblyRoute {
  automatic,         // invariant blocks for invariant symbols, quadrature otherwise
  quadrature,        // quantisation sum on basis functions + quadrature inner products
  invariant_blocks,  // I (x) sigma(xi) blocks written directly
};

OperatorMatrix assemble_matrix(const MatrixSymbol& s, const TruncationWindow& window,
                               const QuadratureGrid& grid,
                               AssemblyRoute route = AssemblyRoute::automatic);
OperatorMatrix assemble_matrix(const MatrixSymbol& s, const TruncationWindow& window,
                               AssemblyRoute route = AssemblyRoute::automatic);

// sigma_A(x, xi) = xi(x)^* (A xi)(x) for the truncated operator.
CMatrix extract_symbol(const OperatorMatrix& a, const GroupPoint& x, const DualPoint& xi);
// Same for every dual of the window at once.
std::vector<CMatrix> extract_symbols(const OperatorMatrix& a, const GroupPoint& x);

// sum_xi d_xi int ||sigma_A(x, xi)||_HS^2 dx over the grid.
double extracted_symbol_hs_mass(const OperatorMatrix& a, const QuadratureGrid& grid);

// Truncated kernel K(x, y) = sum_xi d_xi Tr[xi(y^{-1} x) sigma(x, xi)].
cplx schwartz_kernel(const MatrixSymbol& s, const GroupPoint& x, const GroupPoint& y,
                     const TruncationWindow& window);
// K(x, y) = sum_{row,col} A(row,col) phi_row(x) conj(phi_col(y)).
cplx schwartz_kernel(const OperatorMatrix& a, const GroupPoint& x, const GroupPoint& y);

// ||f||_{L^p(G)} by quadrature; p = infinity gives the max over nodes.
double lp_norm(const FunctionSamples& f, const QuadratureGrid& grid, double p);
// ||f^||_{l^p(G^)} = (sum d^{p(2/p - 1/2)} ||f^(xi)||_HS^p)^{1/p}; p = infinity
// gives sup d^{-1/2} ||f^(xi)||_HS.
double dual_lp_norm(const FourierCoefficients& coeffs, double p);

// Samples of a band-limited function on a grid.
FunctionSamples sample(const BandLimitedFunction& f, const QuadratureGrid& grid);

// Portable export: <stem>.json (window metadata and basis order) and
// <stem>.csv (row, col, re, im with 17 significant digits).
void write_operator_matrix(const OperatorMatrix& a, const std::filesystem::path& stem);
OperatorMatrix read_operator_matrix(const std::filesystem::path& stem);

}  // namespace psido
