#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "psido/group.hpp"

namespace psido {

// Position of one Peter-Weyl basis element sqrt(d) xi_ij inside a window.
struct BasisIndex {
  std::size_t dual = 0;  // position in TruncationWindow::duals()
  int row = 0;           // i
  int col = 0;           // j
};

// The finite dual set {<xi> <= lambda} and the Peter-Weyl basis ordering it
// induces: duals in canonical order, then (i, j) row-major inside a dual.
class TruncationWindow {
 public:
  TruncationWindow(GroupDescriptor group, double lambda);

  const GroupDescriptor& group() const noexcept { return group_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<DualPoint>& duals() const noexcept { return duals_; }
  std::size_t size() const noexcept { return duals_.size(); }
  std::size_t total_dim() const noexcept { return total_dim_; }
  std::size_t offset(std::size_t dual) const { return offsets_[dual]; }

  std::size_t column(std::size_t dual, int i, int j) const;
  BasisIndex locate(std::size_t column) const;
  std::optional<std::size_t> find(const DualPoint& xi) const;

  // Largest band degree of any dual in the window.
  double degree() const noexcept { return degree_; }

 private:
  GroupDescriptor group_;
  double lambda_;
  std::vector<DualPoint> duals_;
  std::vector<std::size_t> offsets_;
  std::size_t total_dim_ = 0;
  double degree_ = 0.0;
};

}  // namespace psido
