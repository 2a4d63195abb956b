#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "graphon/error.hpp"
#include "graphon/lower_bounds.hpp"
#include "graphon/rng.hpp"

namespace graphon {

namespace {

using Bits = PackingSet::Bits;

// Largest code stored as an explicit word list.
constexpr std::uint64_t kExplicitLimit = 4096;
// Candidate draws per accepted word (explicit) or per generator (linear).
constexpr std::uint64_t kRetryBudget = 1000;

std::size_t limbs(int d) { return (static_cast<std::size_t>(d) + 63) / 64; }

int weight(const Bits& w) {
  int total = 0;
  for (auto limb : w) total += std::popcount(limb);
  return total;
}

int distance(const Bits& a, const Bits& b) {
  int total = 0;
  for (std::size_t t = 0; t < a.size(); ++t) total += std::popcount(a[t] ^ b[t]);
  return total;
}

void xor_into(Bits& a, const Bits& b) {
  for (std::size_t t = 0; t < a.size(); ++t) a[t] ^= b[t];
}

Bits pack(int d, const Codeword& word) {
  if (word.size() != static_cast<std::size_t>(d)) throw DomainError("PackingSet: word has wrong length");
  Bits bits(limbs(d), 0);
  for (int i = 0; i < d; ++i) {
    const int v = word[static_cast<std::size_t>(i)];
    if (v != 0 && v != 1) throw DomainError("PackingSet: entries must be 0 or 1");
    if (v == 1) bits[static_cast<std::size_t>(i) / 64] |= std::uint64_t{1} << (i % 64);
  }
  return bits;
}

Codeword unpack(int d, const Bits& bits) {
  Codeword word(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    word[static_cast<std::size_t>(i)] = static_cast<int>((bits[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1U);
  }
  return word;
}

Bits random_word(int d, Rng& rng) {
  Bits bits(limbs(d), 0);
  for (auto& limb : bits) limb = rng.next();
  const int tail = d % 64;
  if (tail != 0) bits.back() &= (std::uint64_t{1} << tail) - 1;
  return bits;
}

Bits word_from_index(int d, std::uint64_t index) {
  Bits bits(limbs(d), 0);
  bits[0] = index;
  return bits;
}

bool independent(std::vector<Bits> rows) {
  // Gaussian elimination over GF(2).
  std::size_t rank = 0;
  const std::size_t width = rows.empty() ? 0 : rows.front().size() * 64;
  for (std::size_t col = 0; col < width && rank < rows.size(); ++col) {
    const std::size_t limb = col / 64;
    const std::uint64_t mask = std::uint64_t{1} << (col % 64);
    auto pivot = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                              [&](const Bits& r) { return (r[limb] & mask) != 0; });
    if (pivot == rows.end()) continue;
    std::iter_swap(rows.begin() + static_cast<std::ptrdiff_t>(rank), pivot);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && (rows[r][limb] & mask) != 0) xor_into(rows[r], rows[rank]);
    }
    ++rank;
  }
  return rank == rows.size();
}

// Minimum weight of c ^ g over all c in span(gens), visited in Gray-code order.
int min_coset_weight(const std::vector<Bits>& gens, const Bits& g, int stop_below) {
  Bits word = g;
  int best = weight(word);
  const std::uint64_t total = std::uint64_t{1} << gens.size();
  for (std::uint64_t t = 1; t < total && best >= stop_below; ++t) {
    xor_into(word, gens[static_cast<std::size_t>(std::countr_zero(t))]);
    best = std::min(best, weight(word));
  }
  return best;
}

// Minimum weight over the nonzero words of span(gens).
int min_span_weight(const std::vector<Bits>& gens, int d) {
  Bits word(limbs(d), 0);
  int best = d + 1;
  const std::uint64_t total = std::uint64_t{1} << gens.size();
  for (std::uint64_t t = 1; t < total; ++t) {
    xor_into(word, gens[static_cast<std::size_t>(std::countr_zero(t))]);
    best = std::min(best, weight(word));
  }
  return best;
}

PackingSet greedy_explicit(int d, std::uint64_t target, int required, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Bits> kept;
  std::uint64_t misses = 0;
  while (kept.size() < target && misses < kRetryBudget) {
    Bits candidate = random_word(d, rng);
    const bool ok = std::all_of(kept.begin(), kept.end(),
                                [&](const Bits& w) { return distance(w, candidate) >= required; });
    if (ok) {
      kept.push_back(std::move(candidate));
      misses = 0;
    } else {
      ++misses;
    }
  }
  if (kept.size() < target && d <= 16) {
    // Lexicographic greedy over all 2^d words.
    kept.clear();
    const std::uint64_t total = std::uint64_t{1} << d;
    for (std::uint64_t v = 0; v < total && kept.size() < target; ++v) {
      Bits candidate = word_from_index(d, v);
      const bool ok = std::all_of(kept.begin(), kept.end(),
                                  [&](const Bits& w) { return distance(w, candidate) >= required; });
      if (ok) kept.push_back(std::move(candidate));
    }
  }
  if (kept.size() < target) {
    throw RefusalError("vg_packing: retry budget exhausted at d = " + std::to_string(d));
  }
  std::vector<Codeword> words;
  words.reserve(kept.size());
  for (const auto& w : kept) words.push_back(unpack(d, w));
  return PackingSet::from_words(d, words);
}

PackingSet greedy_linear(int d, std::uint64_t target, int required, std::uint64_t seed) {
  const int dimension = static_cast<int>(std::bit_width(target - 1));
  if (dimension > d) throw RefusalError("vg_packing: target exceeds 2^d");
  Rng rng(seed);
  std::vector<Bits> gens;
  while (static_cast<int>(gens.size()) < dimension) {
    bool added = false;
    for (std::uint64_t attempt = 0; attempt < kRetryBudget && !added; ++attempt) {
      Bits g = random_word(d, rng);
      // A coset of weight >= required also rules out g in the current span.
      if (min_coset_weight(gens, g, required) >= required) {
        gens.push_back(std::move(g));
        added = true;
      }
    }
    if (!added) throw RefusalError("vg_packing: retry budget exhausted at d = " + std::to_string(d));
  }
  std::vector<Codeword> words;
  words.reserve(gens.size());
  for (const auto& g : gens) words.push_back(unpack(d, g));
  return PackingSet::from_generators(d, words);
}

}  // namespace

PackingSet PackingSet::from_words(int d, const std::vector<Codeword>& words) {
  if (d < 1) throw DomainError("PackingSet: d must be positive");
  PackingSet set;
  set.d_ = d;
  for (const auto& w : words) set.rows_.push_back(pack(d, w));
  return set;
}

PackingSet PackingSet::from_generators(int d, const std::vector<Codeword>& generators) {
  if (d < 1) throw DomainError("PackingSet: d must be positive");
  if (generators.size() >= 64) throw DomainError("PackingSet: at most 63 generators");
  PackingSet set;
  set.d_ = d;
  set.linear_ = true;
  for (const auto& g : generators) set.rows_.push_back(pack(d, g));
  if (!independent(set.rows_)) throw DomainError("PackingSet: generators are linearly dependent");
  return set;
}

std::uint64_t PackingSet::size() const noexcept {
  return linear_ ? std::uint64_t{1} << rows_.size() : rows_.size();
}

Codeword PackingSet::codeword(std::uint64_t index) const {
  if (index >= size()) throw DomainError("PackingSet: codeword index out of range");
  if (!linear_) return unpack(d_, rows_[static_cast<std::size_t>(index)]);
  Bits word(limbs(d_), 0);
  for (std::size_t g = 0; g < rows_.size(); ++g) {
    if ((index >> g) & 1U) xor_into(word, rows_[g]);
  }
  return unpack(d_, word);
}

int PackingSet::min_distance() const {
  if (size() < 2) return d_ + 1;
  if (linear_) return min_span_weight(rows_, d_);
  int best = d_ + 1;
  for (std::size_t a = 0; a < rows_.size(); ++a) {
    for (std::size_t b = a + 1; b < rows_.size(); ++b) best = std::min(best, distance(rows_[a], rows_[b]));
  }
  return best;
}

bool PackingSet::verify() const {
  return 4 * min_distance() >= d_ && size() >= packing_target(d_);
}

std::uint64_t packing_target(int d) {
  const double v = std::ceil(std::exp(static_cast<double>(d) / 8.0));
  if (v >= 18446744073709551615.0) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(v);
}

PackingSet vg_packing(int d, std::uint64_t seed, std::uint64_t min_count) {
  if (d < 1) throw DomainError("vg_packing: d must be positive");
  if (d > kMaxPackingLength) {
    throw RefusalError("vg_packing: d = " + std::to_string(d) + " exceeds the supported maximum " +
                       std::to_string(kMaxPackingLength));
  }
  const std::uint64_t target = std::max(packing_target(d), min_count);
  if (d < 64 && target > (std::uint64_t{1} << d)) {
    throw RefusalError("vg_packing: more than 2^d codewords requested");
  }
  const int required = (d + 3) / 4;  // smallest integer with 4 * required >= d
  PackingSet set = target <= kExplicitLimit ? greedy_explicit(d, target, required, seed)
                                            : greedy_linear(d, target, required, seed);
  if (!set.verify() || set.size() < min_count) {
    throw NumericalError("vg_packing: post-check failed", static_cast<double>(set.min_distance()));
  }
  return set;
}

}  // namespace graphon
