#include "coldcc/angmom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace coldcc::angmom {

namespace {

// Racah sums for j <= kMaxAngularMomentum need factorials up to 4j + 1.
constexpr int kMaxFactorial = 4 * kMaxAngularMomentum + 2;

constexpr auto make_primes() {
  std::array<int, 64> out{};
  int count = 0;
  for (int n = 2; n <= kMaxFactorial && count < 64; ++n) {
    bool prime = true;
    for (int d = 2; d * d <= n; ++d) {
      if (n % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out[count++] = n;
  }
  return std::pair{out, count};
}

constexpr auto kPrimeTable = make_primes();
constexpr int kNumPrimes = kPrimeTable.second;
constexpr const std::array<int, 64>& kPrimes = kPrimeTable.first;

using Exponents = std::array<int, kNumPrimes>;

// Exponent of each prime in n!, by Legendre's formula.
const std::vector<Exponents>& factorial_exponents() {
  static const std::vector<Exponents> table = [] {
    std::vector<Exponents> t(kMaxFactorial + 1);
    for (int n = 0; n <= kMaxFactorial; ++n) {
      for (int i = 0; i < kNumPrimes; ++i) {
        int e = 0;
        for (long long q = kPrimes[i]; q <= n; q *= kPrimes[i]) e += static_cast<int>(n / q);
        t[n][i] = e;
      }
    }
    return t;
  }();
  return table;
}

void add_factorial(Exponents& e, int n, int sign) {
  if (n < 0 || n > kMaxFactorial) throw std::out_of_range("angmom: factorial argument out of range");
  const auto& f = factorial_exponents()[n];
  for (int i = 0; i < kNumPrimes; ++i) e[i] += sign * f[i];
}

struct Term {
  int sign;
  Exponents exps;
};

// sqrt(prod p^prefactor) * sum_k sign_k prod p^{e_k}, evaluated by pulling the
// common factor out of the sum so the remaining terms are exact integers.
double evaluate_racah(const Exponents& prefactor, const std::vector<Term>& terms) {
  if (terms.empty()) return 0.0;
  Exponents common = terms.front().exps;
  for (const auto& t : terms)
    for (int i = 0; i < kNumPrimes; ++i) common[i] = std::min(common[i], t.exps[i]);

  using boost::multiprecision::cpp_int;
  cpp_int sum = 0;
  for (const auto& t : terms) {
    cpp_int value = 1;
    for (int i = 0; i < kNumPrimes; ++i) {
      const int e = t.exps[i] - common[i];
      if (e > 0) value *= boost::multiprecision::pow(cpp_int(kPrimes[i]), static_cast<unsigned>(e));
    }
    if (t.sign > 0)
      sum += value;
    else
      sum -= value;
  }
  if (sum == 0) return 0.0;

  long double result = sum.convert_to<long double>();
  for (int i = 0; i < kNumPrimes; ++i) {
    const int twice = prefactor[i] + 2 * common[i];
    if (twice == 0) continue;
    const long double p = kPrimes[i];
    result *= std::pow(p, static_cast<long double>(twice / 2));
    if (twice % 2 != 0) result *= (twice > 0 ? std::sqrt(p) : 1.0L / std::sqrt(p));
  }
  return static_cast<double>(result);
}

bool valid_3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (j1 < 0 || j2 < 0 || j3 < 0) return false;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return false;
  if (m1 + m2 + m3 != 0) return false;
  return triangle(j1, j2, j3);
}

void check_range(std::initializer_list<int> js) {
  for (int j : js)
    if (j > kMaxAngularMomentum) throw std::out_of_range("angmom: angular momentum exceeds supported maximum");
}

// Symmetry-canonical keys. Each argument is shifted into one byte.
std::uint64_t pack(const std::array<int, 6>& a) {
  std::uint64_t key = 0;
  for (int v : a) key = (key << 8) | static_cast<std::uint64_t>(v + 128);
  return key;
}

class SymbolCache {
 public:
  bool find(std::uint64_t key, double& value) const {
    std::shared_lock lock(mutex_);
    auto it = table_.find(key);
    if (it == table_.end()) return false;
    value = it->second;
    return true;
  }
  void insert(std::uint64_t key, double value) {
    std::unique_lock lock(mutex_);
    table_.emplace(key, value);
  }
  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return table_.size();
  }
  void clear() {
    std::unique_lock lock(mutex_);
    table_.clear();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, double> table_;
};

SymbolCache& cache_3j() {
  static SymbolCache c;
  return c;
}
SymbolCache& cache_6j() {
  static SymbolCache c;
  return c;
}

}  // namespace

bool triangle(int a, int b, int c) {
  return a >= 0 && b >= 0 && c >= 0 && c >= std::abs(a - b) && c <= a + b;
}

double wigner3j_uncached(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (!valid_3j(j1, j2, j3, m1, m2, m3)) return 0.0;
  check_range({j1, j2, j3});

  Exponents pre{};
  add_factorial(pre, j1 + j2 - j3, +1);
  add_factorial(pre, j1 - j2 + j3, +1);
  add_factorial(pre, -j1 + j2 + j3, +1);
  add_factorial(pre, j1 + j2 + j3 + 1, -1);
  add_factorial(pre, j1 + m1, +1);
  add_factorial(pre, j1 - m1, +1);
  add_factorial(pre, j2 + m2, +1);
  add_factorial(pre, j2 - m2, +1);
  add_factorial(pre, j3 + m3, +1);
  add_factorial(pre, j3 - m3, +1);

  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  std::vector<Term> terms;
  for (int k = kmin; k <= kmax; ++k) {
    Term t{(k % 2 == 0) ? 1 : -1, {}};
    add_factorial(t.exps, k, -1);
    add_factorial(t.exps, j3 - j2 + k + m1, -1);
    add_factorial(t.exps, j3 - j1 + k - m2, -1);
    add_factorial(t.exps, j1 + j2 - j3 - k, -1);
    add_factorial(t.exps, j1 - k - m1, -1);
    add_factorial(t.exps, j2 - k + m2, -1);
    terms.push_back(t);
  }
  const double value = evaluate_racah(pre, terms);
  const int phase = j1 - j2 - m3;
  return (phase % 2 == 0) ? value : -value;
}

double wigner6j_uncached(int j1, int j2, int j3, int j4, int j5, int j6) {
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) || !triangle(j4, j5, j3))
    return 0.0;
  check_range({j1, j2, j3, j4, j5, j6});

  Exponents pre{};
  auto add_delta = [&pre](int a, int b, int c) {
    add_factorial(pre, a + b - c, +1);
    add_factorial(pre, a - b + c, +1);
    add_factorial(pre, -a + b + c, +1);
    add_factorial(pre, a + b + c + 1, -1);
  };
  add_delta(j1, j2, j3);
  add_delta(j1, j5, j6);
  add_delta(j4, j2, j6);
  add_delta(j4, j5, j3);

  const int a1 = j1 + j2 + j3, a2 = j1 + j5 + j6, a3 = j4 + j2 + j6, a4 = j4 + j5 + j3;
  const int b1 = j1 + j2 + j4 + j5, b2 = j2 + j3 + j5 + j6, b3 = j3 + j1 + j6 + j4;
  const int tmin = std::max({a1, a2, a3, a4});
  const int tmax = std::min({b1, b2, b3});
  std::vector<Term> terms;
  for (int t = tmin; t <= tmax; ++t) {
    Term term{(t % 2 == 0) ? 1 : -1, {}};
    add_factorial(term.exps, t + 1, +1);
    add_factorial(term.exps, t - a1, -1);
    add_factorial(term.exps, t - a2, -1);
    add_factorial(term.exps, t - a3, -1);
    add_factorial(term.exps, t - a4, -1);
    add_factorial(term.exps, b1 - t, -1);
    add_factorial(term.exps, b2 - t, -1);
    add_factorial(term.exps, b3 - t, -1);
    terms.push_back(term);
  }
  return evaluate_racah(pre, terms);
}

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (!valid_3j(j1, j2, j3, m1, m2, m3)) return 0.0;

  // Column permutations (odd ones pick up (-1)^J) and m -> -m (also (-1)^J).
  const int J = j1 + j2 + j3;
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};
  const std::array<int, 3> j{j1, j2, j3};
  const std::array<int, 3> m{m1, m2, m3};
  std::uint64_t best = 0;
  int best_phase = 1;
  std::array<int, 6> best_args{};
  for (int p = 0; p < 6; ++p) {
    for (int flip = 0; flip < 2; ++flip) {
      std::array<int, 6> args{};
      for (int c = 0; c < 3; ++c) {
        args[c] = j[perms[p][c]];
        args[3 + c] = flip ? -m[perms[p][c]] : m[perms[p][c]];
      }
      const int odd = (p >= 3 ? 1 : 0) + flip;
      const int phase = (odd % 2 == 1 && J % 2 == 1) ? -1 : 1;
      const std::uint64_t key = pack(args);
      if (key > best) {
        best = key;
        best_phase = phase;
        best_args = args;
      }
    }
  }
  double value = 0.0;
  if (!cache_3j().find(best, value)) {
    value = wigner3j_uncached(best_args[0], best_args[1], best_args[2], best_args[3], best_args[4], best_args[5]);
    cache_3j().insert(best, value);
  }
  return best_phase * value;
}

double wigner6j(int j1, int j2, int j3, int j4, int j5, int j6) {
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) || !triangle(j4, j5, j3))
    return 0.0;

  // Tetrahedral symmetry: any column permutation, and exchanging upper and
  // lower entries in any two columns.
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};
  const std::array<std::array<bool, 3>, 4> swaps{{{false, false, false}, {true, true, false}, {true, false, true}, {false, true, true}}};
  const std::array<int, 3> upper{j1, j2, j3};
  const std::array<int, 3> lower{j4, j5, j6};
  std::uint64_t best = 0;
  std::array<int, 6> best_args{};
  for (const auto& p : perms) {
    for (const auto& s : swaps) {
      std::array<int, 6> args{};
      for (int c = 0; c < 3; ++c) {
        args[c] = s[c] ? lower[p[c]] : upper[p[c]];
        args[3 + c] = s[c] ? upper[p[c]] : lower[p[c]];
      }
      const std::uint64_t key = pack(args);
      if (key > best) {
        best = key;
        best_args = args;
      }
    }
  }
  double value = 0.0;
  if (!cache_6j().find(best, value)) {
    value = wigner6j_uncached(best_args[0], best_args[1], best_args[2], best_args[3], best_args[4], best_args[5]);
    cache_6j().insert(best, value);
  }
  return value;
}

double clebsch(int j1, int m1, int j2, int m2, int J, int M) {
  const double w = wigner3j(j1, j2, J, m1, m2, -M);
  if (w == 0.0) return 0.0;
  const int phase = j1 - j2 + M;
  return ((phase % 2 == 0) ? 1.0 : -1.0) * std::sqrt(2.0 * J + 1.0) * w;
}

double reduced_spherical_harmonic(int l, int k, int lp) {
  const double w = wigner3j(l, k, lp, 0, 0, 0);
  if (w == 0.0) return 0.0;
  return ((l % 2 == 0) ? 1.0 : -1.0) * std::sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0)) * w;
}

std::size_t cache_size() { return cache_3j().size() + cache_6j().size(); }

void clear_cache() {
  cache_3j().clear();
  cache_6j().clear();
}

}  // namespace coldcc::angmom
