#include "gamelab/rational.hpp"

#include <cctype>

namespace gamelab {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  v_ /= o.v_;
  return *this;
}

Rational Rational::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("Rational::parse: empty string");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (num.empty() || den.empty())
      throw std::invalid_argument("Rational::parse: malformed fraction '" + text + "'");
    mpq_class q;
    if (q.set_str(num + "/" + den, 10) != 0)
      throw std::invalid_argument("Rational::parse: malformed fraction '" + text + "'");
    if (q.get_den() == 0) throw std::domain_error("Rational::parse: zero denominator");
    q.canonicalize();
    return Rational(q);
  }

  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string head = s.substr(0, dot), frac = s.substr(dot + 1);
    if (frac.empty()) frac = "0";
    for (char c : frac)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw std::invalid_argument("Rational::parse: malformed decimal '" + text + "'");
    bool neg = !head.empty() && head[0] == '-';
    if (!head.empty() && (head[0] == '-' || head[0] == '+')) head = head.substr(1);
    if (head.empty()) head = "0";
    mpz_class ip(head, 10), fp(frac, 10), scale(1);
    for (size_t k = 0; k < frac.size(); ++k) scale *= 10;
    mpq_class q(ip * scale + fp, scale);
    q.canonicalize();
    if (neg) q = -q;
    return Rational(q);
  }

  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("Rational::parse: malformed number '" + text + "'");
  return Rational(q);
}

std::string Rational::str() const {
  if (v_.get_den() == 1) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational dot(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rational acc;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

RatMat rat_matrix(int rows, int cols, const Rational& fill) {
  return RatMat(rows, RatVec(cols, fill));
}

std::vector<double> to_doubles(const RatVec& v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i].to_double();
  return out;
}

std::vector<std::vector<double>> to_doubles(const RatMat& m) {
  std::vector<std::vector<double>> out(m.size());
  for (size_t i = 0; i < m.size(); ++i) out[i] = to_doubles(m[i]);
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace gamelab
