#pragma once

#include <cstddef>
#include <vector>

namespace metamob {

/// Fenwick (binary indexed) tree over double weights with O(log n) point
/// update, prefix sum and cumulative-weight search.
class FenwickTree {
public:
    FenwickTree() = default;

    explicit FenwickTree(std::size_t n) : n_(n), tree_(n + 1, 0.0) {
        mask_ = 1;
        while ((mask_ << 1) <= n_) mask_ <<= 1;
    }

    std::size_t size() const { return n_; }

    void add(std::size_t i, double delta) {
        for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1)) tree_[j] += delta;
    }

    /// Sum of weights at indices [0, i).
    double prefix_sum(std::size_t i) const {
        double s = 0.0;
        for (std::size_t j = i; j > 0; j -= j & (~j + 1)) s += tree_[j];
        return s;
    }

    double total() const { return prefix_sum(n_); }

    double value(std::size_t i) const {
        return prefix_sum(i + 1) - prefix_sum(i);
    }

    /// Smallest index i such that prefix_sum(i+1) > target, i.e. the element
    /// a cumulative draw `target` in [0, total) lands on.
    std::size_t find(double target) const {
        std::size_t idx = 0;
        double remaining = target;
        for (std::size_t bit = mask_; bit != 0; bit >>= 1) {
            const std::size_t next = idx + bit;
            if (next <= n_ && tree_[next] <= remaining) {
                idx = next;
                remaining -= tree_[next];
            }
        }
        return idx;  // idx elements have cumulative weight <= target
    }

private:
    std::size_t n_ = 0;
    std::size_t mask_ = 0;
    std::vector<double> tree_;
};

}  // namespace metamob
