#include "graphon/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "graphon/error.hpp"
#include "graphon/model.hpp"
#include "graphon/rng.hpp"

namespace graphon {

namespace {

constexpr double kHalf = 0.5;
constexpr double kMaxShift = 0.25;

ProbMatrix theta_from_q(const Matrix& q, const Assignment& z) {
  const auto n = static_cast<Index>(z.size());
  Matrix theta = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i != j) theta(i, j) = q(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]);
    }
  }
  return ProbMatrix(std::move(theta));
}

void check_binary(const Codeword& w, std::size_t length, const char* who) {
  if (w.size() != length) throw DomainError(std::string(who) + ": codeword has wrong length");
  for (int v : w) {
    if (v != 0 && v != 1) throw DomainError(std::string(who) + ": codeword entries must be 0 or 1");
  }
}

double rho_sq(const ProbMatrix& a, const ProbMatrix& b) {
  const auto n = static_cast<double>(a.size());
  return (a.matrix() - b.matrix()).squaredNorm() / (n * n);
}

// Shared entry loop of the two divergences; f returns the log-contribution.
template <typename F>
double sum_off_diagonal(const ProbMatrix& theta, const ProbMatrix& theta_prime, const char* who, F f) {
  if (theta.size() != theta_prime.size()) throw DomainError(std::string(who) + ": dimension mismatch");
  const Index n = theta.size();
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      total += f(theta(i, j), theta_prime(i, j));
      if (std::isinf(total)) return total;
    }
  }
  return total;
}

}  // namespace

std::string to_string(HardFamily family) {
  switch (family) {
    case HardFamily::T1:
      return "T1";
    case HardFamily::T2:
      return "T2";
    case HardFamily::FiniteK:
      return "finite-k";
  }
  return "unknown";
}

int hamming(const Codeword& a, const Codeword& b) {
  if (a.size() != b.size()) throw DomainError("hamming: length mismatch");
  int total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] != b[i] ? 1 : 0;
  return total;
}

HardInstance t1_instance(Index n, int k, double c1, const Codeword& omega, const Assignment& z) {
  if (k < 2 || n < k || n % k != 0) throw DomainError("t1_instance: need k >= 2 dividing n");
  if (!(c1 >= 0.0) || c1 * k / static_cast<double>(n) > kMaxShift) {
    throw DomainError("t1_instance: need 0 <= c1 k / n <= 1/4");
  }
  const auto d = static_cast<std::size_t>(k) * static_cast<std::size_t>(k - 1) / 2;
  check_binary(omega, d, "t1_instance");
  if (!(z == contiguous_assignment(static_cast<std::size_t>(n), k))) {
    throw DomainError("t1_instance: z must be contiguous equal blocks");
  }
  const double shift = c1 * k / static_cast<double>(n);
  Matrix q = Matrix::Constant(k, k, kHalf);
  std::size_t t = 0;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b, ++t) {
      q(a, b) = kHalf + shift * omega[t];
      q(b, a) = q(a, b);
    }
  }
  return {theta_from_q(q, z), HardFamily::T1, n, k, c1, z, {omega}, {}};
}

HardInstance t2_instance(Index n, int k, double c2, const std::vector<Codeword>& columns,
                         const Assignment& z) {
  if (k < 2 || k % 2 != 0 || n % k != 0) throw DomainError("t2_instance: need even k dividing n");
  const double shift = std::sqrt(c2 * std::log(static_cast<double>(k)) / static_cast<double>(n));
  if (!(c2 >= 0.0) || shift > kMaxShift) throw DomainError("t2_instance: need 0 <= sqrt(c2 log k / n) <= 1/4");
  const int half = k / 2;
  if (columns.size() != static_cast<std::size_t>(half)) throw DomainError("t2_instance: need k/2 columns");
  for (const auto& c : columns) check_binary(c, static_cast<std::size_t>(half), "t2_instance");
  if (z.size() != static_cast<std::size_t>(n) || z.k() != k) throw DomainError("t2_instance: z has wrong shape");
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i < un; ++i) {
    const int expected = static_cast<int>(i * static_cast<std::size_t>(k) / un);
    if ((i < un / 2 && z[i] != expected) || (i >= un / 2 && z[i] < half)) {
      throw DomainError("t2_instance: z is outside the Z family");
    }
  }
  Matrix q = Matrix::Zero(k, k);
  for (int a = 0; a < half; ++a) {
    for (int r = 0; r < half; ++r) {
      const double v = kHalf + shift * columns[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)];
      q(r, half + a) = v;
      q(half + a, r) = v;
    }
  }
  return {theta_from_q(q, z), HardFamily::T2, n, k, c2, z, columns, {}};
}

HardInstance finite_k_instance(Index n, double c, const std::vector<bool>& in_s) {
  if (n < 2 || in_s.size() != static_cast<std::size_t>(n)) throw DomainError("finite_k_instance: bad S");
  const double shift = c / std::sqrt(static_cast<double>(n));
  if (!(c >= 0.0) || shift > kMaxShift) throw DomainError("finite_k_instance: need 0 <= c / sqrt(n) <= 1/4");
  std::vector<int> labels(in_s.size());
  Codeword indicator(in_s.size());
  for (std::size_t i = 0; i < in_s.size(); ++i) {
    labels[i] = in_s[i] ? 0 : 1;
    indicator[i] = in_s[i] ? 1 : 0;
  }
  Matrix q{{kHalf, kHalf + shift}, {kHalf + shift, kHalf}};
  Assignment z(std::move(labels), 2);
  ProbMatrix theta = theta_from_q(q, z);
  return {std::move(theta), HardFamily::FiniteK, n, 2, c, std::move(z), {std::move(indicator)}, {}};
}

std::vector<HardInstance> t1_family(Index n, int k, double c1, std::uint64_t seed, std::size_t count) {
  if (k < 2) throw DomainError("t1_family: need k >= 2");
  const PackingSet packing = vg_packing(k * (k - 1) / 2, seed);
  const auto z = contiguous_assignment(static_cast<std::size_t>(n), k);
  const auto total = static_cast<std::size_t>(std::min<std::uint64_t>(packing.size(), count));
  std::vector<HardInstance> family;
  family.reserve(total);
  for (std::size_t t = 0; t < total; ++t) {
    family.push_back(t1_instance(n, k, c1, packing.codeword(t), z));
    family.back().codeword_indices = {t};
  }
  return family;
}

std::vector<HardInstance> t2_family(Index n, int k, double c2, std::uint64_t seed, std::size_t count) {
  if (k < 2 || k % 2 != 0 || n % k != 0) throw DomainError("t2_family: need even k dividing n");
  const int half = k / 2;
  const PackingSet packing = vg_packing(half, derive_seed(seed, 0), static_cast<std::uint64_t>(half));
  std::vector<Codeword> columns;
  for (int a = 0; a < half; ++a) columns.push_back(packing.codeword(static_cast<std::uint64_t>(a)));

  const auto un = static_cast<std::size_t>(n);
  std::vector<HardInstance> family;
  Rng rng(derive_seed(seed, 1));
  for (std::size_t t = 0; t < count; ++t) {
    std::vector<int> labels(un);
    for (std::size_t i = 0; i < un; ++i) {
      const int block = static_cast<int>(i * static_cast<std::size_t>(k) / un);
      labels[i] = (i < un / 2 || t == 0) ? block
                                         : half + static_cast<int>(rng.below(static_cast<std::uint64_t>(half)));
    }
    family.push_back(t2_instance(n, k, c2, columns, Assignment(std::move(labels), k)));
    for (int a = 0; a < half; ++a) family.back().codeword_indices.push_back(static_cast<std::uint64_t>(a));
  }
  return family;
}

T1Audit audit_t1(const std::vector<HardInstance>& family) {
  T1Audit audit;
  audit.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = a + 1; b < family.size(); ++b) {
      const auto& x = family[a];
      const auto& y = family[b];
      if (x.family != HardFamily::T1 || y.family != HardFamily::T1 || x.n != y.n || x.constant != y.constant) {
        throw DomainError("audit_t1: members are not from one T1 family");
      }
      const int dh = hamming(x.codewords.front(), y.codewords.front());
      const double scale = x.constant / static_cast<double>(x.n);
      const double required = scale * scale * dh;
      const double actual = rho_sq(x.theta, y.theta);
      ++audit.pairs;
      if (actual < required) ++audit.violations;
      if (required > 0.0) audit.min_ratio = std::min(audit.min_ratio, actual / required);
    }
  }
  return audit;
}

T2Audit audit_t2(const std::vector<HardInstance>& family) {
  T2Audit audit;
  audit.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& inst : family) {
    if (inst.family != HardFamily::T2) throw DomainError("audit_t2: member is not a T2 instance");
    const int k = inst.k;
    const int half = k / 2;
    const auto n = static_cast<double>(inst.n);
    const double required = inst.constant * k * std::log(static_cast<double>(k)) / (8.0 * n);
    // Read B back from theta: a node in block r (first half) and one in block half + a.
    const auto& z = inst.assignment;
    std::vector<Index> first(static_cast<std::size_t>(k), -1);
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (first[static_cast<std::size_t>(z[i])] < 0) first[static_cast<std::size_t>(z[i])] = static_cast<Index>(i);
    }
    Matrix b = Matrix::Zero(half, half);
    for (int a = 0; a < half; ++a) {
      const Index col_node = first[static_cast<std::size_t>(half + a)];
      for (int r = 0; r < half; ++r) {
        // An empty second-half block: take B from the codeword directly.
        b(r, a) = col_node >= 0 ? inst.theta(first[static_cast<std::size_t>(r)], col_node)
                                : kHalf + std::sqrt(inst.constant * std::log(static_cast<double>(k)) / n) *
                                              inst.codewords[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)];
      }
    }
    for (int a = 0; a < half; ++a) {
      for (int c = a + 1; c < half; ++c) {
        const double actual = (b.col(a) - b.col(c)).squaredNorm();
        ++audit.pairs;
        // Relative slack absorbs rounding in sqrt(c2 log k / n)^2.
        if (actual < required * (1.0 - 1e-12)) ++audit.violations;
        if (required > 0.0) audit.min_ratio = std::min(audit.min_ratio, actual / required);
      }
    }
  }
  return audit;
}

double kl_product_bernoulli(const ProbMatrix& theta, const ProbMatrix& theta_prime) {
  return sum_off_diagonal(theta, theta_prime, "kl_product_bernoulli", [](double p, double q) {
    double total = 0.0;
    if (p > 0.0) total += q > 0.0 ? p * std::log(p / q) : std::numeric_limits<double>::infinity();
    if (p < 1.0) {
      total += q < 1.0 ? (1.0 - p) * std::log((1.0 - p) / (1.0 - q)) : std::numeric_limits<double>::infinity();
    }
    return total;
  });
}

double chi2_product_bernoulli(const ProbMatrix& theta, const ProbMatrix& theta_prime) {
  const double log_sum = sum_off_diagonal(theta, theta_prime, "chi2_product_bernoulli", [](double p, double q) {
    if (p == q) return 0.0;
    if (q <= 0.0 || q >= 1.0) return std::numeric_limits<double>::infinity();
    return std::log1p((p - q) * (p - q) / (q * (1.0 - q)));
  });
  return std::expm1(log_sum);
}

double fano_bound(double kl_diameter, double log_packing) {
  if (!(log_packing > 0.0)) throw DomainError("fano_bound: log_packing must be positive");
  return std::clamp(1.0 - (kl_diameter + std::numbers::ln2) / log_packing, 0.0, 1.0);
}

double chi2_fano_bound(double chi2_diameter, double packing) {
  if (!(packing >= 1.0)) throw DomainError("chi2_fano_bound: packing must be >= 1");
  if (!(chi2_diameter >= 0.0)) throw DomainError("chi2_fano_bound: chi2_diameter must be >= 0");
  return std::clamp(1.0 - 1.0 / packing - std::sqrt(chi2_diameter / packing), 0.0, 1.0);
}

std::string hard_instance_metadata_json(const HardInstance& instance) {
  nlohmann::json labels = nlohmann::json::array();
  for (int v : instance.assignment.labels()) labels.push_back(v + 1);
  const nlohmann::ordered_json doc = {
      {"family", to_string(instance.family)},
      {"n", instance.n},
      {"k", instance.k},
      {"constant", instance.constant},
      {"codewords", instance.codewords},
      {"codeword_indices", instance.codeword_indices},
      {"labels", std::move(labels)},
  };
  return doc.dump(2) + "\n";
}

}  // namespace graphon
