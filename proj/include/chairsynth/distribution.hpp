#pragma once

#include "chairsynth/common.hpp"
#include "chairsynth/rng.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chairsynth {

// A named sampling rule written in the randomizer table syntax, e.g.
//   Uniform(5, 50)
//   Cartesian[Uniform(-7.5, 7.5), Uniform(-7.5, 7.5), Uniform(-4, 1)]
//   Euler[Uniform(0, 20), Uniform(0, 360), Uniform(0, 20)]
//   RGBA[Uniform(0, 1), Uniform(0, 1), Uniform(0, 1), Constant(1)]
//   Bernoulli(0.8)
//   Categorical[cube: 0.25, sphere: 0.25, cylinder: 0.25, capsule: 0.25]
class Distribution {
 public:
  enum class Kind { Constant, Uniform, Bernoulli, Categorical, Cartesian, Euler, Rgba };

  static Distribution parse(std::string_view text);
  static Distribution constant(double c);
  static Distribution uniform(double lo, double hi);

  Kind kind() const { return kind_; }
  bool is_scalar() const { return kind_ == Kind::Constant || kind_ == Kind::Uniform; }
  bool is_vector() const;
  std::size_t dimension() const;  // 1 for scalars, 3 or 4 for vectors

  double sample(Rng& rng) const;  // Constant, Uniform, Bernoulli (0/1)
  std::vector<double> sample_vector(Rng& rng) const;
  // Uniform integer in [lo, hi] for Uniform; the value itself for Constant.
  std::int64_t sample_int(Rng& rng) const;
  bool sample_bool(Rng& rng) const;  // Bernoulli
  std::size_t sample_index(Rng& rng) const;  // Categorical
  const std::string& category(std::size_t i) const { return categories_.at(i).first; }
  std::size_t category_count() const { return categories_.size(); }

  // Support of a scalar (or of component i of a vector).
  double lo(std::size_t i = 0) const;
  double hi(std::size_t i = 0) const;
  double probability() const { return a_; }  // Bernoulli
  const std::vector<std::pair<std::string, double>>& categories() const { return categories_; }
  const std::vector<Distribution>& components() const { return components_; }

  std::string to_string() const;
  bool operator==(const Distribution& other) const = default;

 private:
  Kind kind_ = Kind::Constant;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<std::pair<std::string, double>> categories_;
  std::vector<Distribution> components_;

  friend class DistributionParser;
};

}  // namespace chairsynth
