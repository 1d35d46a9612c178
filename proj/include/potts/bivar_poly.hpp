#pragma once

#include <complex>
#include <map>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "potts/dense_poly.hpp"
#include "potts/rational.hpp"

namespace potts {

/// Exact sparse bivariate polynomial in (Q, v) with rational coefficients.
/// Terms are kept in a map ordered by (deg_Q, deg_v); zero coefficients are
/// never stored, so equality is representational.
class BivarPoly {
 public:
  using Key = std::pair<int, int>;  // (deg_Q, deg_v)

  BivarPoly() = default;
  BivarPoly(int c) {  // NOLINT: implicit from int mirrors scalar ring use
    if (c != 0) terms_[{0, 0}] = make_rat(c);
  }
  explicit BivarPoly(const Rat& c) {
    if (c != 0) terms_[{0, 0}] = c;
  }

  static BivarPoly monomial(int dq, int dv, Rat c = Rat(1)) {
    BivarPoly p;
    if (c != 0) p.terms_[{dq, dv}] = std::move(c);
    return p;
  }
  static BivarPoly Q(int deg = 1) { return monomial(deg, 0); }
  static BivarPoly v(int deg = 1) { return monomial(0, deg); }

  bool is_zero() const { return terms_.empty(); }
  bool is_integer() const {
    for (auto& [k, c] : terms_)
      if (!rat_is_integer(c)) return false;
    return true;
  }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Key, Rat>& terms() const { return terms_; }

  int deg_Q() const {
    int d = -1;
    for (auto& [k, c] : terms_) d = std::max(d, k.first);
    return d;
  }
  int deg_v() const {
    int d = -1;
    for (auto& [k, c] : terms_) d = std::max(d, k.second);
    return d;
  }

  Rat coeff(int dq, int dv) const {
    auto it = terms_.find({dq, dv});
    return it == terms_.end() ? Rat(0) : it->second;
  }

  void add_term(int dq, int dv, const Rat& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace({dq, dv}, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  friend BivarPoly operator+(const BivarPoly& a, const BivarPoly& b) {
    BivarPoly r = a;
    for (auto& [k, c] : b.terms_) r.add_term(k.first, k.second, c);
    return r;
  }
  friend BivarPoly operator-(const BivarPoly& a, const BivarPoly& b) {
    BivarPoly r = a;
    for (auto& [k, c] : b.terms_) r.add_term(k.first, k.second, -c);
    return r;
  }
  BivarPoly operator-() const {
    BivarPoly r;
    for (auto& [k, c] : terms_) r.terms_[k] = -c;
    return r;
  }
  friend BivarPoly operator*(const BivarPoly& a, const BivarPoly& b) {
    BivarPoly r;
    for (auto& [ka, ca] : a.terms_)
      for (auto& [kb, cb] : b.terms_)
        r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
    return r;
  }
  friend BivarPoly operator*(const BivarPoly& a, const Rat& s) {
    BivarPoly r;
    if (s == 0) return r;
    for (auto& [k, c] : a.terms_) r.terms_[k] = c * s;
    return r;
  }
  BivarPoly& operator+=(const BivarPoly& o) {
    for (auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
    return *this;
  }
  BivarPoly& operator-=(const BivarPoly& o) {
    for (auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
    return *this;
  }
  BivarPoly& operator*=(const BivarPoly& o) { return *this = *this * o; }
  friend bool operator==(const BivarPoly& a, const BivarPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const BivarPoly& a, const BivarPoly& b) { return !(a == b); }

  BivarPoly pow(unsigned long e) const {
    BivarPoly r(1), base = *this;
    while (e) {
      if (e & 1) r *= base;
      base *= base;
      e >>= 1;
    }
    return r;
  }

  Rat eval(const Rat& q, const Rat& vv) const {
    // Horner in v of Horner-in-Q rows would need dense layout; with sparse
    // maps a power-cached direct sum is simpler and exact.
    std::map<int, Rat> qp, vp;
    Rat r(0);
    for (auto& [k, c] : terms_) {
      auto& pq = qp.try_emplace(k.first).first->second;
      if (pq == 0 && k.first >= 0) pq = rat_pow(q, k.first);
      auto& pv = vp.try_emplace(k.second).first->second;
      if (pv == 0 && k.second >= 0) pv = rat_pow(vv, k.second);
      r += c * pq * pv;
    }
    return r;
  }

  std::complex<double> eval(std::complex<double> q, std::complex<double> vv) const {
    // dense-in-Q Horner with precomputed v powers
    int dq = deg_Q(), dv = deg_v();
    if (dq < 0) return 0.0;
    std::vector<std::complex<double>> vpow(dv + 1);
    vpow[0] = 1.0;
    for (int i = 1; i <= dv; ++i) vpow[i] = vpow[i - 1] * vv;
    std::vector<std::complex<double>> rows(dq + 1, 0.0);
    for (auto& [k, c] : terms_) rows[k.first] += c.get_d() * vpow[k.second];
    std::complex<double> r = rows[dq];
    for (int i = dq - 1; i >= 0; --i) r = r * q + rows[i];
    return r;
  }

  /// Collapse to a univariate polynomial in Q with v substituted by a
  /// rational-coefficient polynomial in Q (covers v = aQ + b lines).
  QPoly substitute_v(const QPoly& v_of_q) const {
    int dv = deg_v();
    // group by deg_v, build Q-polynomials, multiply by v(Q)^deg_v
    std::vector<QPoly> by_v(dv + 1);
    for (auto& [k, c] : terms_) {
      QPoly t = by_v[k.second];
      std::vector<Rat> mono(k.first + 1, Rat(0));
      mono[k.first] = c;
      by_v[k.second] = t + QPoly(std::move(mono));
    }
    QPoly r, vp = QPoly::constant(Rat(1));
    for (int j = 0; j <= dv; ++j) {
      if (!by_v[j].is_zero()) r += by_v[j] * vp;
      if (j < dv) vp *= v_of_q;
    }
    return r;
  }

  /// Substitute Q by a polynomial in v (covers Q = c*v lines); result in v.
  QPoly substitute_Q(const QPoly& q_of_v) const {
    int dq = deg_Q();
    std::vector<QPoly> by_q(dq + 1);
    for (auto& [k, c] : terms_) {
      std::vector<Rat> mono(k.second + 1, Rat(0));
      mono[k.second] = c;
      by_q[k.first] += QPoly(std::move(mono));
    }
    QPoly r, qp = QPoly::constant(Rat(1));
    for (int j = 0; j <= dq; ++j) {
      if (!by_q[j].is_zero()) r += by_q[j] * qp;
      if (j < dq) qp *= q_of_v;
    }
    return r;
  }

  nlohmann::json to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (auto& [k, c] : terms_)
      terms.push_back({k.first, k.second, rat_to_string(c)});
    return {{"vars", {"Q", "v"}}, {"terms", terms}};
  }
  static BivarPoly from_json(const nlohmann::json& j) {
    BivarPoly p;
    for (auto& t : j.at("terms"))
      p.add_term(t.at(0).get<int>(), t.at(1).get<int>(),
                 rat_from_string(t.at(2).get<std::string>()));
    return p;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [k, c] = *it;
      if (!first) os << (c > 0 ? " + " : " - ");
      else if (c < 0) os << "-";
      first = false;
      Rat a = abs(c);
      bool unit = (a == 1) && (k.first || k.second);
      if (!unit) os << rat_to_string(a);
      if (k.first) {
        if (!unit) os << "*";
        os << "Q";
        if (k.first > 1) os << "^" << k.first;
      }
      if (k.second) {
        if (k.first || !unit) os << "*";
        os << "v";
        if (k.second > 1) os << "^" << k.second;
      }
    }
    return os.str();
  }

  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto& [k, c] : terms_) {
      h = fnv1a(&k.first, sizeof k.first, h);
      h = fnv1a(&k.second, sizeof k.second, h);
      h = fnv1a(rat_to_string(c), h);
    }
    return h;
  }

 private:
  std::map<Key, Rat> terms_;
};

/// A parametric line in the (Q, v) plane: either v = a*Q + b, or Q = c*v.
struct LineSpec {
  enum class Kind { v_of_Q, Q_of_v } kind = Kind::v_of_Q;
  Rat a{0}, b{0};  // v = aQ + b
  Rat c{0};        // Q = c v

  static LineSpec v_const(const Rat& b) { return {Kind::v_of_Q, Rat(0), b, Rat(0)}; }
  static LineSpec v_eq_aQ(const Rat& a, const Rat& b = Rat(0)) {
    return {Kind::v_of_Q, a, b, Rat(0)};
  }
  static LineSpec Q_eq_cv(const Rat& c) { return {Kind::Q_of_v, Rat(0), Rat(0), c}; }
  static LineSpec chromatic() { return v_const(make_rat(-1)); }
  static LineSpec flow() { return v_eq_aQ(make_rat(-1)); }

  // v at real Q (only for v_of_Q lines)
  double v_at(double q) const { return a.get_d() * q + b.get_d(); }
  std::complex<double> v_at(std::complex<double> q) const {
    return a.get_d() * q + b.get_d();
  }

  std::string label() const {
    std::ostringstream os;
    if (kind == Kind::v_of_Q) {
      os << "v=";
      if (a != 0) {
        if (a == -1) os << "-";
        else if (a != 1) os << rat_to_string(a) << "*";
        os << "Q";
        if (b > 0) os << "+" << rat_to_string(b);
        if (b < 0) os << rat_to_string(b);
      } else {
        os << rat_to_string(b);
      }
    } else {
      os << "Q=";
      if (c == -1) os << "-";
      else if (c != 1) os << rat_to_string(c) << "*";
      os << "v";
    }
    return os.str();
  }

  /// Parse labels of the shapes used on the command line: "v=-1", "v=-2Q",
  /// "v=-Q+1", "Q=-v", "Q=2v", "v=1/2Q-3/2".
  static LineSpec parse(const std::string& s);
};

inline LineSpec LineSpec::parse(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos) throw invalid_input_error("bad line spec: " + s);
  std::string lhs = s.substr(0, eq), rhs = s.substr(eq + 1);
  auto parse_linear = [&](char var, Rat* slope, Rat* intercept) {
    // split rhs into terms at '+' / '-' boundaries (keeping signs)
    *slope = Rat(0);
    *intercept = Rat(0);
    std::string cur;
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      char ch = rhs[i];
      if ((ch == '+' || ch == '-') && i > 0 && rhs[i - 1] != '/' && rhs[i - 1] != '+' &&
          rhs[i - 1] != '-') {
        parts.push_back(cur);
        cur.clear();
      }
      cur += ch;
    }
    parts.push_back(cur);
    for (auto& t : parts) {
      if (t.empty()) continue;
      auto vp = t.find(var);
      if (vp != std::string::npos) {
        std::string coef = t.substr(0, vp);
        // tolerate a trailing '*'
        if (!coef.empty() && coef.back() == '*') coef.pop_back();
        if (coef.empty() || coef == "+") coef = "1";
        else if (coef == "-") coef = "-1";
        *slope += rat_from_string(coef);
      } else {
        *intercept += rat_from_string(t);
      }
    }
  };
  if (lhs == "v") {
    LineSpec l;
    l.kind = Kind::v_of_Q;
    parse_linear('Q', &l.a, &l.b);
    return l;
  }
  if (lhs == "Q") {
    LineSpec l;
    l.kind = Kind::Q_of_v;
    Rat intercept;
    parse_linear('v', &l.c, &intercept);
    if (intercept != 0) throw invalid_input_error("Q=... lines must pass through origin: " + s);
    return l;
  }
  throw invalid_input_error("bad line spec: " + s);
}

/// Exact substitution of a line into a bivariate polynomial. The result is
/// univariate in Q (for v = aQ+b lines) or in v (for Q = cv lines).
inline QPoly specialize(const BivarPoly& p, const LineSpec& line) {
  if (line.kind == LineSpec::Kind::v_of_Q) {
    std::vector<Rat> lin{line.b, line.a};
    return p.substitute_v(QPoly(std::move(lin)));
  }
  std::vector<Rat> lin{Rat(0), line.c};
  return p.substitute_Q(QPoly(std::move(lin)));
}

}  // namespace potts
