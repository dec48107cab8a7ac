#include "psido/window.hpp"

#include <algorithm>

#include "psido/errors.hpp"

namespace psido {

TruncationWindow::TruncationWindow(GroupDescriptor group, double lambda)
    : group_(group), lambda_(lambda), duals_(enumerate_dual(group, lambda)) {
  offsets_.reserve(duals_.size());
  for (const auto& xi : duals_) {
    offsets_.push_back(total_dim_);
    total_dim_ += static_cast<std::size_t>(xi.dim) * xi.dim;
    degree_ = std::max(degree_, band_degree(group_, xi));
  }
}

std::size_t TruncationWindow::column(std::size_t dual, int i, int j) const {
  const int d = duals_.at(dual).dim;
  if (i < 0 || j < 0 || i >= d || j >= d) throw RangeError("matrix index outside representation");
  return offsets_[dual] + static_cast<std::size_t>(i) * d + j;
}

BasisIndex TruncationWindow::locate(std::size_t column) const {
  if (column >= total_dim_) throw RangeError("basis column outside window");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), column);
  const auto dual = static_cast<std::size_t>(std::distance(offsets_.begin(), it) - 1);
  const int d = duals_[dual].dim;
  const auto local = column - offsets_[dual];
  return {dual, static_cast<int>(local / d), static_cast<int>(local % d)};
}

std::optional<std::size_t> TruncationWindow::find(const DualPoint& xi) const {
  const auto it = std::lower_bound(duals_.begin(), duals_.end(), xi);
  if (it == duals_.end() || !(*it == xi)) return std::nullopt;
  return static_cast<std::size_t>(std::distance(duals_.begin(), it));
}

}  // namespace psido
