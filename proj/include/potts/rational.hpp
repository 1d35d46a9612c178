#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "potts/common.hpp"

namespace potts {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline Rat rat_from_string(const std::string& s) {
  Rat q;
  if (q.set_str(s, 10) != 0) throw invalid_input_error("bad rational literal: " + s);
  q.canonicalize();
  return q;
}

inline std::string rat_to_string(const Rat& q) { return q.get_str(); }

inline bool rat_is_integer(const Rat& q) { return q.get_den() == 1; }

inline Int int_pow(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Rat rat_pow(const Rat& base, unsigned long e) {
  Rat r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den().get_mpz_t(), e);
  return r;
}

inline Int factorial(unsigned long n) {
  Int r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

inline Int binomial(unsigned long n, unsigned long k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// lcm of denominators; 1 for an all-integer vector.
inline Int common_denominator(const std::vector<Rat>& v) {
  Int d = 1;
  for (const auto& q : v) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), q.get_den().get_mpz_t());
  return d;
}

}  // namespace potts
