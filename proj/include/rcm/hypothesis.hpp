#pragma once

#include <compare>
#include <cstddef>
#include <string>

#include "rcm/errors.hpp"

namespace rcm {

/// Migration indices of H_{l,h}: pulses 1..l carry the target in cell 1,
/// pulses l+1..l+h carry it in cell 2.
struct HypothesisIndex {
  int l = 1;
  int h = 0;

  int signal_pulses() const { return l + h; }
  friend auto operator<=>(const HypothesisIndex&, const HypothesisIndex&) = default;
};

inline bool on_grid(HypothesisIndex idx, int n_pulses) {
  return idx.l >= 1 && idx.l <= n_pulses && idx.h >= 0 && idx.h <= n_pulses - idx.l;
}

inline void require_on_grid(HypothesisIndex idx, int n_pulses) {
  if (!on_grid(idx, n_pulses)) {
    throw IndexOffGrid("hypothesis (l=" + std::to_string(idx.l) + ", h=" + std::to_string(idx.h) +
                       ") is off the grid for N_p=" + std::to_string(n_pulses));
  }
}

/// The admissible (l,h) pairs in lexicographic order, l ascending then h.
class HypothesisGrid {
 public:
  explicit HypothesisGrid(int n_pulses) : n_pulses_(n_pulses) {}

  int n_pulses() const { return n_pulses_; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_pulses_) * static_cast<std::size_t>(n_pulses_ + 1) / 2;
  }

  /// Position of idx in lexicographic order.
  std::size_t offset(HypothesisIndex idx) const {
    require_on_grid(idx, n_pulses_);
    // Rows l' < l contribute N_p - l' + 1 entries each.
    const auto l = static_cast<std::size_t>(idx.l);
    const auto n = static_cast<std::size_t>(n_pulses_);
    return (l - 1) * (n + 1) - (l - 1) * l / 2 + static_cast<std::size_t>(idx.h);
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (int l = 1; l <= n_pulses_; ++l) {
      for (int h = 0; h <= n_pulses_ - l; ++h) fn(HypothesisIndex{l, h});
    }
  }

 private:
  int n_pulses_;
};

}  // namespace rcm
