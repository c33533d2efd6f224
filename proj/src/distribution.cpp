#include "chairsynth/distribution.hpp"

#include "chairsynth/common.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace chairsynth {

class DistributionParser {
 public:
  explicit DistributionParser(std::string_view text) : s_(text) {}

  Distribution parse_all() {
    Distribution d = parse_one();
    skip_ws();
    if (pos_ != s_.size()) {
      fail("unexpected trailing text");
    }
    return d;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("distribution '" + std::string(s_) + "': " + why + " at offset " +
                     std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) {
      fail(std::string("expected '") + c + "'");
    }
  }

  std::string word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
            s_[pos_] == '-')) {
      ++pos_;
    }
    if (start == pos_) {
      fail("expected a name");
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    double v = 0.0;
    // std::from_chars rejects a leading '+' and a bare leading '.', accept both.
    std::string buf;
    if (begin < end && *begin == '+') {
      ++begin;
    }
    const char* p = begin;
    while (p < end && (std::isdigit(static_cast<unsigned char>(*p)) || *p == '.' || *p == '-' ||
                       *p == 'e' || *p == 'E' || *p == '+')) {
      ++p;
    }
    buf.assign(begin, p);
    if (!buf.empty() && buf[0] == '.') {
      buf.insert(0, "0");
    } else if (buf.size() > 1 && buf[0] == '-' && buf[1] == '.') {
      buf.insert(1, "0");
    }
    const auto res = std::from_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc() || res.ptr != buf.data() + buf.size() || buf.empty()) {
      fail("expected a number");
    }
    pos_ = static_cast<std::size_t>(p - s_.data());
    return v;
  }

  char open() {
    skip_ws();
    if (eat('(')) {
      return ')';
    }
    if (eat('[')) {
      return ']';
    }
    fail("expected '(' or '['");
  }

  void close() {
    if (!eat(')') && !eat(']')) {
      fail("expected ')' or ']'");
    }
  }

  Distribution parse_one() {
    const std::string name = word();
    Distribution d;
    if (name == "Constant") {
      d.kind_ = Distribution::Kind::Constant;
      open();
      d.a_ = d.b_ = number();
      close();
    } else if (name == "Uniform") {
      d.kind_ = Distribution::Kind::Uniform;
      open();
      d.a_ = number();
      expect(',');
      d.b_ = number();
      close();
      if (!(d.a_ <= d.b_)) {
        fail("uniform bounds out of order");
      }
    } else if (name == "Bernoulli") {
      d.kind_ = Distribution::Kind::Bernoulli;
      open();
      d.a_ = number();
      close();
      if (!(d.a_ >= 0.0 && d.a_ <= 1.0)) {
        fail("probability outside [0, 1]");
      }
    } else if (name == "Categorical") {
      d.kind_ = Distribution::Kind::Categorical;
      open();
      double total = 0.0;
      do {
        const std::string label = word();
        expect(':');
        const double w = number();
        if (!(w >= 0.0)) {
          fail("negative category weight");
        }
        d.categories_.emplace_back(label, w);
        total += w;
      } while (eat(','));
      close();
      if (std::abs(total - 1.0) > 1e-9) {
        fail("category weights must sum to 1");
      }
    } else if (name == "Cartesian" || name == "Euler" || name == "RGBA") {
      d.kind_ = name == "Cartesian" ? Distribution::Kind::Cartesian
                : name == "Euler"   ? Distribution::Kind::Euler
                                    : Distribution::Kind::Rgba;
      open();
      do {
        Distribution c = parse_one();
        if (!c.is_scalar()) {
          fail("vector components must be Constant or Uniform");
        }
        d.components_.push_back(std::move(c));
      } while (eat(','));
      close();
      const std::size_t want = d.kind_ == Distribution::Kind::Rgba ? 4 : 3;
      if (d.components_.size() != want) {
        fail(name + " needs " + std::to_string(want) + " components");
      }
    } else {
      fail("unknown distribution '" + name + "'");
    }
    return d;
  }
};

Distribution Distribution::parse(std::string_view text) { return DistributionParser(text).parse_all(); }

Distribution Distribution::constant(double c) {
  Distribution d;
  d.a_ = d.b_ = c;
  return d;
}

Distribution Distribution::uniform(double lo, double hi) {
  Distribution d;
  d.kind_ = Kind::Uniform;
  d.a_ = lo;
  d.b_ = hi;
  if (!(lo <= hi)) {
    throw InvalidArgument("uniform bounds out of order");
  }
  return d;
}

bool Distribution::is_vector() const {
  return kind_ == Kind::Cartesian || kind_ == Kind::Euler || kind_ == Kind::Rgba;
}

std::size_t Distribution::dimension() const { return is_vector() ? components_.size() : 1; }

double Distribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Constant:
      return a_;
    case Kind::Uniform:
      return rng.uniform(a_, b_);
    case Kind::Bernoulli:
      return rng.bernoulli(a_) ? 1.0 : 0.0;
    default:
      throw InvalidArgument("distribution " + to_string() + " is not scalar");
  }
}

std::vector<double> Distribution::sample_vector(Rng& rng) const {
  if (!is_vector()) {
    return {sample(rng)};
  }
  std::vector<double> out;
  out.reserve(components_.size());
  for (const auto& c : components_) {
    out.push_back(c.sample(rng));
  }
  return out;
}

std::int64_t Distribution::sample_int(Rng& rng) const {
  if (kind_ == Kind::Constant) {
    return static_cast<std::int64_t>(std::llround(a_));
  }
  if (kind_ != Kind::Uniform) {
    throw InvalidArgument("distribution " + to_string() + " has no integer form");
  }
  const auto lo = static_cast<std::int64_t>(std::ceil(a_));
  const auto hi = static_cast<std::int64_t>(std::floor(b_));
  if (lo > hi) {
    throw InvalidArgument("distribution " + to_string() + " contains no integer");
  }
  return rng.integer(lo, hi);
}

bool Distribution::sample_bool(Rng& rng) const {
  if (kind_ == Kind::Constant) {
    return a_ != 0.0;
  }
  if (kind_ != Kind::Bernoulli) {
    throw InvalidArgument("distribution " + to_string() + " is not Bernoulli");
  }
  return rng.bernoulli(a_);
}

std::size_t Distribution::sample_index(Rng& rng) const {
  if (kind_ != Kind::Categorical) {
    throw InvalidArgument("distribution " + to_string() + " is not categorical");
  }
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    acc += categories_[i].second;
    if (u < acc) {
      return i;
    }
  }
  // Rounding left u above the running sum; pick the last positive weight.
  for (std::size_t i = categories_.size(); i-- > 0;) {
    if (categories_[i].second > 0.0) {
      return i;
    }
  }
  return categories_.size() - 1;
}

double Distribution::lo(std::size_t i) const {
  if (is_vector()) {
    return components_.at(i).lo();
  }
  return kind_ == Kind::Bernoulli ? 0.0 : a_;
}

double Distribution::hi(std::size_t i) const {
  if (is_vector()) {
    return components_.at(i).hi();
  }
  return kind_ == Kind::Bernoulli ? 1.0 : b_;
}

std::string Distribution::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Constant:
      os << "Constant(" << a_ << ")";
      break;
    case Kind::Uniform:
      os << "Uniform(" << a_ << ", " << b_ << ")";
      break;
    case Kind::Bernoulli:
      os << "Bernoulli(" << a_ << ")";
      break;
    case Kind::Categorical:
      os << "Categorical[";
      for (std::size_t i = 0; i < categories_.size(); ++i) {
        os << (i ? ", " : "") << categories_[i].first << ": " << categories_[i].second;
      }
      os << "]";
      break;
    case Kind::Cartesian:
    case Kind::Euler:
    case Kind::Rgba:
      os << (kind_ == Kind::Cartesian ? "Cartesian[" : kind_ == Kind::Euler ? "Euler[" : "RGBA[");
      for (std::size_t i = 0; i < components_.size(); ++i) {
        os << (i ? ", " : "") << components_[i].to_string();
      }
      os << "]";
      break;
  }
  return os.str();
}

}  // namespace chairsynth
