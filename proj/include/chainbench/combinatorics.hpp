#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace chainbench {

using BigInt = boost::multiprecision::cpp_int;

// Number of ordered selections of l problems from n: n!/(n-l)!.
inline BigInt count_orderings(unsigned n, unsigned l) {
  if (l > n) {
    throw std::invalid_argument("count_orderings: l=" + std::to_string(l) +
                                " exceeds n=" + std::to_string(n));
  }
  BigInt result = 1;
  for (unsigned i = 0; i < l; ++i) result *= n - i;
  return result;
}

struct GenerationCount {
  // Distinct chain specs per length for a single technique:
  // 2^(l-1) branch layouts times n!/(n-l)! orderings.
  std::map<unsigned, BigInt> per_length_per_technique;
  BigInt total;  // 2 * sum over lengths 2..n (both techniques)
};

inline GenerationCount count_total(unsigned n) {
  if (n < 2) {
    throw std::invalid_argument("count_total: need a corpus of at least 2 problems");
  }
  GenerationCount count;
  BigInt sum = 0;
  for (unsigned l = 2; l <= n; ++l) {
    BigInt per = (BigInt(1) << (l - 1)) * count_orderings(n, l);
    sum += per;
    count.per_length_per_technique[l] = std::move(per);
  }
  count.total = 2 * sum;
  return count;
}

// Decimal scientific rendering, round-half-up: 56447... -> "5.64e79".
inline std::string to_scientific(const BigInt& value, int significant_digits = 3) {
  if (significant_digits < 1) {
    throw std::invalid_argument("to_scientific: need at least 1 significant digit");
  }
  if (value == 0) return "0";
  const bool negative = value < 0;
  std::string digits = (negative ? BigInt(-value) : value).str();
  int exponent = static_cast<int>(digits.size()) - 1;

  if (static_cast<int>(digits.size()) > significant_digits) {
    const char next = digits[significant_digits];
    digits.resize(significant_digits);
    if (next >= '5') {
      int i = significant_digits - 1;
      while (i >= 0) {
        if (digits[i] != '9') {
          ++digits[i];
          break;
        }
        digits[i] = '0';
        --i;
      }
      if (i < 0) {  // 999 -> 100 with one more power of ten
        digits.insert(digits.begin(), '1');
        digits.resize(significant_digits);
        ++exponent;
      }
    }
  } else {
    digits.append(significant_digits - digits.size(), '0');
  }

  std::string out = negative ? "-" : "";
  out += digits.substr(0, 1);
  if (significant_digits > 1) out += "." + digits.substr(1);
  out += "e" + std::to_string(exponent);
  return out;
}

}  // namespace chainbench
