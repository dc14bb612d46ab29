#include "fracss/linear_form.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "fracss/errors.hpp"

namespace fracss {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Rational parse_rational(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  long long mantissa = 0;
  long long scale = 1;
  bool seen_digit = false;
  bool fraction = false;
  int digits = 0;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c == '.' && !fraction) {
      fraction = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) break;
    seen_digit = true;
    if (mantissa == 0 && c == '0' && !fraction) continue;
    if (++digits > 17) throw InvalidArgument("numeric literal has too many digits: " + std::string(text));
    mantissa = mantissa * 10 + (c - '0');
    if (fraction) scale *= 10;
  }
  if (!seen_digit) throw InvalidArgument("expected a number: '" + std::string(text) + "'");
  long long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    std::size_t used = 0;
    exponent = std::stoll(std::string(text.substr(pos)), &used);
    pos += used;
  }
  if (pos != text.size()) throw InvalidArgument("trailing characters in number: '" + std::string(text) + "'");
  Rational value(negative ? -mantissa : mantissa, scale);
  for (; exponent > 0; --exponent) value *= 10;
  for (; exponent < 0; ++exponent) value /= 10;
  return value;
}

LinearForm LinearForm::parameter(const std::string& name, Rational coeff) {
  LinearForm f;
  if (coeff != Rational(0)) f.coeffs_[name] = coeff;
  return f;
}

Rational LinearForm::coefficient(const std::string& name) const {
  auto it = coeffs_.find(name);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

double LinearForm::evaluate(const ParameterValues& values) const {
  double v = to_double(constant_);
  for (const auto& [name, c] : coeffs_) {
    auto it = values.find(name);
    if (it == values.end()) throw InvalidArgument("no value for parameter '" + name + "'");
    v += to_double(c) * it->second;
  }
  return v;
}

std::string LinearForm::str() const {
  std::string out;
  auto append = [&out](Rational c, const std::string& sym) {
    bool neg = c < 0;
    Rational mag = neg ? -c : c;
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    if (sym.empty()) {
      out += to_string(mag);
    } else if (mag == Rational(1)) {
      out += sym;
    } else {
      out += to_string(mag) + "*" + sym;
    }
  };
  for (const auto& [name, c] : coeffs_) append(c, name);
  if (constant_ != Rational(0) || out.empty()) append(constant_, "");
  return out;
}

LinearForm& LinearForm::operator+=(const LinearForm& other) {
  constant_ += other.constant_;
  for (const auto& [name, c] : other.coeffs_) {
    Rational& slot = coeffs_[name];
    slot += c;
    if (slot == Rational(0)) coeffs_.erase(name);
  }
  return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& other) {
  LinearForm neg = other;
  neg *= Rational(-1);
  return *this += neg;
}

LinearForm& LinearForm::operator*=(Rational scale) {
  constant_ *= scale;
  if (scale == Rational(0)) {
    coeffs_.clear();
    return *this;
  }
  for (auto& entry : coeffs_) entry.second *= scale;
  return *this;
}

namespace {

// Recursive-descent parser; only products/quotients with a constant side are
// accepted so the result stays affine.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  LinearForm run() {
    LinearForm f = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  LinearForm expression() {
    skip_space();
    LinearForm acc;
    bool negate = false;
    if (peek('+') || peek('-')) negate = text_[pos_++] == '-';
    acc = term();
    if (negate) acc = -acc;
    for (;;) {
      skip_space();
      if (peek('+')) {
        ++pos_;
        acc += term();
      } else if (peek('-')) {
        ++pos_;
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  LinearForm term() {
    LinearForm acc = factor();
    for (;;) {
      skip_space();
      if (peek('*')) {
        ++pos_;
        LinearForm rhs = factor();
        if (acc.is_constant()) {
          acc = acc.constant() * rhs;
        } else if (rhs.is_constant()) {
          acc = rhs.constant() * acc;
        } else {
          fail("product of two parameters is not linear");
        }
      } else if (peek('/')) {
        ++pos_;
        LinearForm rhs = factor();
        if (!rhs.is_constant() || rhs.constant() == Rational(0)) fail("division must be by a non-zero constant");
        acc = (Rational(1) / rhs.constant()) * acc;
      } else {
        return acc;
      }
    }
  }

  LinearForm factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      LinearForm inner = expression();
      skip_space();
      if (!peek(')')) fail("missing ')'");
      ++pos_;
      return inner;
    }
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      return LinearForm(parse_rational(text_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return LinearForm::parameter(std::string(text_.substr(start, pos_ - start)));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  bool peek(char c) const { return pos_ < text_.size() && text_[pos_] == c; }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidArgument("cannot parse expression '" + std::string(text_) + "': " + why);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

LinearForm LinearForm::parse(std::string_view text) { return Parser(text).run(); }

}  // namespace fracss
