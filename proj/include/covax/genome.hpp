#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace covax {

using PeptideIndex = std::uint32_t;

/// Fixed-length bit vector over the peptide universe. Bit i set means peptide
/// i is selected. The set-bit count is cached and kept exact by every mutator.
class Genome {
 public:
  Genome() = default;
  explicit Genome(std::size_t length)
      : length_(length), words_((length + 63) / 64, 0) {}

  static Genome from_indices(std::size_t length,
                             const std::vector<PeptideIndex>& indices) {
    Genome g(length);
    for (auto i : indices) g.set(i);
    return g;
  }

  /// Parses "0110"-style strings (index 0 first).
  static Genome from_string(const std::string& bits) {
    Genome g(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        g.set(i);
      } else if (bits[i] != '0') {
        throw std::invalid_argument("genome string must contain only 0/1");
      }
    }
    return g;
  }

  std::size_t size() const noexcept { return length_; }
  std::size_t count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  bool test(std::size_t i) const noexcept {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  void set(std::size_t i) noexcept {
    auto& w = words_[i >> 6];
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (!(w & mask)) {
      w |= mask;
      ++count_;
    }
  }

  void reset(std::size_t i) noexcept {
    auto& w = words_[i >> 6];
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (w & mask) {
      w &= ~mask;
      --count_;
    }
  }

  void assign(std::size_t i, bool value) noexcept {
    if (value) {
      set(i);
    } else {
      reset(i);
    }
  }

  void flip(std::size_t i) noexcept { assign(i, !test(i)); }

  /// Selected indices in ascending order.
  std::vector<PeptideIndex> indices() const {
    std::vector<PeptideIndex> out;
    out.reserve(count_);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        out.push_back(static_cast<PeptideIndex>(w * 64 + b));
        bits &= bits - 1;
      }
    }
    return out;
  }

  std::string to_string() const {
    std::string s(length_, '0');
    for (std::size_t i = 0; i < length_; ++i) {
      if (test(i)) s[i] = '1';
    }
    return s;
  }

  friend std::size_t hamming_distance(const Genome& a, const Genome& b) {
    if (a.length_ != b.length_) {
      throw std::invalid_argument("hamming_distance: length mismatch");
    }
    std::size_t d = 0;
    for (std::size_t w = 0; w < a.words_.size(); ++w) {
      d += static_cast<std::size_t>(std::popcount(a.words_[w] ^ b.words_[w]));
    }
    return d;
  }

  /// Bit-string order: at the first differing position the genome holding 0
  /// is smaller ("0110" < "1000").
  friend bool lexicographically_less(const Genome& a, const Genome& b) {
    for (std::size_t w = 0; w < a.words_.size() && w < b.words_.size(); ++w) {
      const std::uint64_t diff = a.words_[w] ^ b.words_[w];
      if (diff) {
        const int b0 = std::countr_zero(diff);
        return !((a.words_[w] >> b0) & 1u);
      }
    }
    return a.length_ < b.length_;
  }

  friend bool operator==(const Genome&, const Genome&) = default;

 private:
  std::size_t length_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace covax
