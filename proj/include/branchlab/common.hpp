#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace branchlab {

struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) { throw error(what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

// Filtration indices of the building live in (1/4)Z once s = r/2 enters the
// picture, so depths, jumps and bounds are carried as exact rationals.
struct Rat {
  long num = 0;
  long den = 1;

  Rat() = default;
  Rat(long n) : num(n), den(1) {}
  Rat(long n, long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) fail("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const { return num * o.den < o.num * den; }
  bool operator<=(const Rat& o) const { return num * o.den <= o.num * den; }
  bool operator>(const Rat& o) const { return o < *this; }
  bool operator>=(const Rat& o) const { return o <= *this; }

  Rat operator+(const Rat& o) const { return Rat(num * o.den + o.num * den, den * o.den); }
  Rat operator-(const Rat& o) const { return Rat(num * o.den - o.num * den, den * o.den); }
  Rat operator-() const { return Rat(-num, den); }
  Rat operator*(const Rat& o) const { return Rat(num * o.num, den * o.den); }
  Rat operator/(const Rat& o) const { return Rat(num * o.den, den * o.num); }

  long ceil() const { return num >= 0 ? (num + den - 1) / den : -((-num) / den); }
  long floor() const { return -(-*this).ceil(); }
  bool is_integer() const { return den == 1; }
  bool is_half_integer() const { return den == 2; }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  static Rat parse(const std::string& s);
};

inline Rat Rat::parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      // only .5 fractions occur
      std::string frac = s.substr(dot + 1);
      long whole = dot == 0 ? 0 : std::stol(s.substr(0, dot));
      if (frac == "5") return Rat(whole * 2 + (whole < 0 ? -1 : 1), 2);
      if (frac == "0" || frac.empty()) return Rat(whole);
      fail("cannot parse rational: " + s);
    }
    return Rat(std::stol(s));
  }
  return Rat(std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1)));
}

}  // namespace branchlab
