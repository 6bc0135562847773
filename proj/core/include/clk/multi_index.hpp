#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace clk {

/// Strictly increasing multi-index over {1..n}, stored as a bitmask (bit j-1 <-> index j).
/// All enumeration is in lexicographic order of the index tuple, which for fixed
/// cardinality coincides with increasing bitmask order.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(std::uint32_t mask) : mask_(mask) {}
    MultiIndex(std::initializer_list<int> indices) {
        for (int i : indices) {
            if (i < 1) throw std::invalid_argument("MultiIndex: indices are 1-based");
            std::uint32_t bit = 1u << (i - 1);
            if (mask_ & bit) throw std::invalid_argument("MultiIndex: repeated index");
            mask_ |= bit;
        }
    }

    std::uint32_t mask() const { return mask_; }
    int size() const { return __builtin_popcount(mask_); }
    bool contains(int i) const { return (mask_ >> (i - 1)) & 1u; }

    std::vector<int> indices() const {
        std::vector<int> out;
        for (std::uint32_t m = mask_; m; m &= m - 1) out.push_back(__builtin_ctz(m) + 1);
        return out;
    }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  private:
    std::uint32_t mask_ = 0;
};

/// Number of inversions between two disjoint ascending runs, i.e. the sign of
/// sorting the concatenation (A ascending, B ascending) into one ascending run.
inline int merge_sign(std::uint32_t a, std::uint32_t b) {
    if (a & b) return 0;
    int inv = 0;
    for (std::uint32_t m = b; m; m &= m - 1) {
        std::uint32_t bit = m & ~(m - 1);
        inv += __builtin_popcount(a & ~(bit | (bit - 1)));
    }
    return (inv & 1) ? -1 : 1;
}

struct WedgeResult {
    int sign = 0;        // 0 when the index repeats
    MultiIndex merged;   // valid only when sign != 0
};

/// Sign and result of dzbar_j ^ dzbar_J with J strictly increasing (j prepended).
inline WedgeResult wedge_sign(const MultiIndex& J, int j) {
    std::uint32_t bit = 1u << (j - 1);
    if (J.mask() & bit) return {0, MultiIndex()};
    int below = __builtin_popcount(J.mask() & (bit - 1));
    return {(below & 1) ? -1 : 1, MultiIndex(J.mask() | bit)};
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i) r = r * static_cast<std::uint64_t>(n - i) / (i + 1);
    return r;
}

/// All cardinality-q multi-indices over {1..n}, in increasing bitmask order.
inline std::vector<MultiIndex> all_multi_indices(int n, int q) {
    std::vector<MultiIndex> out;
    if (q < 0 || q > n) return out;
    out.reserve(binomial(n, q));
    for (std::uint32_t m = 0; m < (1u << n); ++m)
        if (__builtin_popcount(m) == q) out.emplace_back(m);
    return out;
}

/// Ordinal of a mask within all_multi_indices(n, popcount(mask)).
inline int multi_index_ordinal(int n, std::uint32_t mask) {
    int q = __builtin_popcount(mask);
    int ord = 0;
    for (std::uint32_t m = 0; m < mask; ++m)
        if (__builtin_popcount(m) == q) ++ord;
    (void)n;
    return ord;
}

/// Precomputed mask -> ordinal lookup for one (n, q).
class MultiIndexSet {
  public:
    MultiIndexSet() = default;
    MultiIndexSet(int n, int q) : n_(n), q_(q), ordinal_(std::size_t(1) << n, -1) {
        list_ = all_multi_indices(n, q);
        for (std::size_t i = 0; i < list_.size(); ++i) ordinal_[list_[i].mask()] = static_cast<int>(i);
    }

    int n() const { return n_; }
    int degree() const { return q_; }
    int count() const { return static_cast<int>(list_.size()); }
    const std::vector<MultiIndex>& list() const { return list_; }
    int ordinal(std::uint32_t mask) const { return ordinal_[mask]; }

  private:
    int n_ = 0, q_ = 0;
    std::vector<MultiIndex> list_;
    std::vector<int> ordinal_;
};

}  // namespace clk
