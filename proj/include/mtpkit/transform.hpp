#pragma once

// Bijective transformation classes over 2-D point sets. Three built-in
// classes, each parameterised by an exact rational vector sigma:
//
//   2T    sigma = <u, v>          p  ->  <p0 + u, p1 + v>
//   2TR   sigma = <u, v, r>       p  ->  <p0 + u, r * (p1 + v)>
//   2STR  sigma = <s, u, v, r>    p  ->  <s * p0 + u, r * (p1 + v)>
//
// with r restricted to +-1 (optional reflection of the second axis) and
// s nonzero (scaling of the first axis). Every member is invertible in
// closed form, and the members mapping one basis tuple onto another are
// solvable in closed form; both solutions are exercised heavily by the
// pattern discovery below, so they stay allocation-light.

#include "mtpkit/geometry.hpp"
#include "mtpkit/rational.hpp"

#include <boost/container/small_vector.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtpkit {

enum class ClassId : std::uint8_t { T2, TR2, STR2 };

using SigmaVector = boost::container::small_vector<Rational, 4>;

/// One transformation, identified within its class by its parameter vector.
struct Transformation {
  ClassId cls = ClassId::T2;
  SigmaVector sigma;

  bool operator==(const Transformation& other) const {
    return cls == other.cls && sigma == other.sigma;
  }
};

inline std::strong_ordering lex_compare(const SigmaVector& a, const SigmaVector& b) {
  const std::size_t shared = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < shared; ++i) {
    if (a[i] < b[i]) return std::strong_ordering::less;
    if (b[i] < a[i]) return std::strong_ordering::greater;
  }
  return a.size() <=> b.size();
}

/// Total lexicographic order on same-class transformations, by sigma.
inline std::strong_ordering compare_transformations(const Transformation& a,
                                                    const Transformation& b) {
  if (a.cls != b.cls) {
    throw std::invalid_argument("compare_transformations: class mismatch");
  }
  return lex_compare(a.sigma, b.sigma);
}

struct TransformationLess {
  bool operator()(const Transformation& a, const Transformation& b) const {
    return compare_transformations(a, b) == std::strong_ordering::less;
  }
};

/// Behaviour shared by every transformation class: how to apply, invert and
/// recognise members, and how to solve for the members mapping one basis
/// tuple onto another. New classes plug in by implementing this interface
/// and registering an instance.
class TransformationClass {
 public:
  virtual ~TransformationClass() = default;

  virtual ClassId class_id() const = 0;
  virtual std::string_view name() const = 0;
  /// Dimension of the points the class acts on.
  virtual std::uint32_t dimension() const = 0;
  /// Number of points needed to determine the class members through them.
  virtual std::uint32_t basis_size() const = 0;
  /// Length of the parameter vector sigma.
  virtual std::uint32_t complexity() const = 0;
  /// Largest number of members mapping one basis tuple onto another.
  virtual std::uint32_t max_transformations() const = 0;

  virtual Point apply(const Transformation& f, const Point& p) const = 0;
  virtual Transformation invert(const Transformation& f) const = 0;
  virtual bool is_identity(const Transformation& f) const = 0;

  /// 0 for plain translations; +1 for a reflection, +1 for a proper scaling.
  virtual int complexity_rank(const Transformation& f) const = 0;

  /// All class members f with f(object[i]) = image[i] for every i. Both
  /// tuples must hold basis_size() pairwise distinct points. Returns an
  /// empty list when the system is inconsistent or underdetermined.
  virtual std::vector<Transformation> transformations_between(
      std::span<const Point> object, std::span<const Point> image) const = 0;

  /// Coarse eligibility key: transformations_between can be nonempty, in
  /// either role and under any ordering of the image tuple, only for two
  /// bases with engaged, equal keys. A disengaged key marks a basis no
  /// member relates to anything. The single default key keeps every pair
  /// eligible; classes override it to prune the quadratic pair scan.
  virtual std::optional<Rational> basis_pairing_key(std::span<const Point> basis) const {
    (void)basis;
    return Rational(0);
  }

  /// Wrap a parameter vector after checking it is well formed for the class.
  Transformation make(SigmaVector sigma) const {
    Transformation f{class_id(), std::move(sigma)};
    validate(f);
    return f;
  }

  void validate(const Transformation& f) const {
    if (f.cls != class_id()) {
      throw std::invalid_argument(std::string(name()) + ": class mismatch");
    }
    if (f.sigma.size() != complexity()) {
      throw std::invalid_argument(std::string(name()) + ": sigma must have " +
                                  std::to_string(complexity()) + " components");
    }
    validate_sigma(f.sigma);
  }

 protected:
  virtual void validate_sigma(const SigmaVector& sigma) const = 0;

  void check_point(const Point& p) const {
    if (p.dimension() != dimension()) {
      throw std::invalid_argument(std::string(name()) + ": point dimension mismatch");
    }
  }

  void check_bases(std::span<const Point> object, std::span<const Point> image) const {
    if (object.size() != basis_size() || image.size() != basis_size()) {
      throw std::invalid_argument(std::string(name()) + ": basis size mismatch");
    }
    for (const Point& p : object) check_point(p);
    for (const Point& p : image) check_point(p);
    for (std::size_t i = 0; i < object.size(); ++i) {
      for (std::size_t j = i + 1; j < object.size(); ++j) {
        if (object[i] == object[j] || image[i] == image[j]) {
          throw std::invalid_argument(std::string(name()) + ": basis points must be distinct");
        }
      }
    }
  }
};

namespace detail {

inline const Rational& sigma_at(const Transformation& f, std::size_t i,
                                const TransformationClass& cls) {
  if (f.sigma.size() != cls.complexity()) {
    throw std::invalid_argument(std::string(cls.name()) + ": malformed sigma length");
  }
  return f.sigma[i];
}

// ---- translations --------------------------------------------------------

class TranslationClass final : public TransformationClass {
 public:
  ClassId class_id() const override { return ClassId::T2; }
  std::string_view name() const override { return "2T"; }
  std::uint32_t dimension() const override { return 2; }
  std::uint32_t basis_size() const override { return 1; }
  std::uint32_t complexity() const override { return 2; }
  std::uint32_t max_transformations() const override { return 1; }

  Point apply(const Transformation& f, const Point& p) const override {
    check_point(p);
    sigma_at(f, 0, *this);
    return Point{p[0] + f.sigma[0], p[1] + f.sigma[1]};
  }

  Transformation invert(const Transformation& f) const override {
    sigma_at(f, 0, *this);
    return Transformation{ClassId::T2, {-f.sigma[0], -f.sigma[1]}};
  }

  bool is_identity(const Transformation& f) const override {
    sigma_at(f, 0, *this);
    return f.sigma[0] == 0 && f.sigma[1] == 0;
  }

  int complexity_rank(const Transformation& f) const override {
    sigma_at(f, 0, *this);
    return 0;
  }

  std::vector<Transformation> transformations_between(
      std::span<const Point> object, std::span<const Point> image) const override {
    check_bases(object, image);
    const Point& p = object[0];
    const Point& q = image[0];
    return {Transformation{ClassId::T2, {q[0] - p[0], q[1] - p[1]}}};
  }

 protected:
  void validate_sigma(const SigmaVector&) const override {}
};

// ---- translations with optional reflection -------------------------------

class TranslationReflectionClass final : public TransformationClass {
 public:
  ClassId class_id() const override { return ClassId::TR2; }
  std::string_view name() const override { return "2TR"; }
  std::uint32_t dimension() const override { return 2; }
  std::uint32_t basis_size() const override { return 1; }
  std::uint32_t complexity() const override { return 3; }
  std::uint32_t max_transformations() const override { return 2; }

  Point apply(const Transformation& f, const Point& p) const override {
    check_point(p);
    sigma_at(f, 0, *this);
    return Point{p[0] + f.sigma[0], f.sigma[2] * (p[1] + f.sigma[1])};
  }

  Transformation invert(const Transformation& f) const override {
    sigma_at(f, 0, *this);
    return Transformation{ClassId::TR2, {-f.sigma[0], -(f.sigma[2] * f.sigma[1]), f.sigma[2]}};
  }

  bool is_identity(const Transformation& f) const override {
    sigma_at(f, 0, *this);
    return f.sigma[0] == 0 && f.sigma[1] == 0 && f.sigma[2] == 1;
  }

  int complexity_rank(const Transformation& f) const override {
    sigma_at(f, 0, *this);
    return f.sigma[2] == -1 ? 1 : 0;
  }

  std::vector<Transformation> transformations_between(
      std::span<const Point> object, std::span<const Point> image) const override {
    check_bases(object, image);
    const Point& p = object[0];
    const Point& q = image[0];
    // One solution per reflection flag: r = +1 needs v = q1 - p1, r = -1
    // needs v = -q1 - p1. The two always differ in the flag component.
    return {Transformation{ClassId::TR2, {q[0] - p[0], q[1] - p[1], Rational(1)}},
            Transformation{ClassId::TR2, {q[0] - p[0], -p[1] - q[1], Rational(-1)}}};
  }

 protected:
  void validate_sigma(const SigmaVector& sigma) const override {
    if (sigma[2] != 1 && sigma[2] != -1) {
      throw std::invalid_argument("2TR: reflection component must be 1 or -1");
    }
  }
};

// ---- time scaling with translation and optional reflection ---------------

class ScaleTranslationReflectionClass final : public TransformationClass {
 public:
  ClassId class_id() const override { return ClassId::STR2; }
  std::string_view name() const override { return "2STR"; }
  std::uint32_t dimension() const override { return 2; }
  std::uint32_t basis_size() const override { return 2; }
  std::uint32_t complexity() const override { return 4; }
  std::uint32_t max_transformations() const override { return 2; }

  Point apply(const Transformation& f, const Point& p) const override {
    check_point(p);
    sigma_at(f, 0, *this);
    return Point{p[0] * f.sigma[0] + f.sigma[1], f.sigma[3] * (p[1] + f.sigma[2])};
  }

  Transformation invert(const Transformation& f) const override {
    sigma_at(f, 0, *this);
    return Transformation{ClassId::STR2,
                          {Rational(1) / f.sigma[0], -(f.sigma[1] / f.sigma[0]),
                           -(f.sigma[3] * f.sigma[2]), f.sigma[3]}};
  }

  bool is_identity(const Transformation& f) const override {
    sigma_at(f, 0, *this);
    return f.sigma[0] == 1 && f.sigma[1] == 0 && f.sigma[2] == 0 && f.sigma[3] == 1;
  }

  int complexity_rank(const Transformation& f) const override {
    sigma_at(f, 0, *this);
    return (f.sigma[0] != 1 ? 1 : 0) + (f.sigma[3] == -1 ? 1 : 0);
  }

  std::vector<Transformation> transformations_between(
      std::span<const Point> object, std::span<const Point> image) const override {
    check_bases(object, image);
    const Point& p = object[0];
    const Point& pp = object[1];
    const Point& q = image[0];
    const Point& qp = image[1];
    // Two equal first coordinates leave the scale undetermined.
    if (p[0] == pp[0]) return {};
    // Cheap gate first: a solution with flag r needs r * (pp1 - p1) to
    // equal qp1 - q1. Most candidate bases fail both flags.
    const Rational rise_object = pp[1] - p[1];
    const Rational rise_image = qp[1] - q[1];
    const bool plain_fits = rise_object == rise_image;
    const bool reflected_fits = rise_object == -rise_image;
    if (!plain_fits && !reflected_fits) return {};
    const Rational scale = (qp[0] - q[0]) / (pp[0] - p[0]);
    // scale = 0 means the image collapses both basis points onto one time;
    // no bijection does that.
    if (scale == 0) return {};
    const Rational shift = q[0] - scale * p[0];
    std::vector<Transformation> solutions;
    for (const int flag : {1, -1}) {
      if (flag == 1 ? !plain_fits : !reflected_fits) continue;
      const Rational r(flag);
      const Rational v = r * q[1] - p[1];
      solutions.push_back(Transformation{ClassId::STR2, {scale, shift, v, r}});
    }
    return solutions;
  }

  std::optional<Rational> basis_pairing_key(std::span<const Point> basis) const override {
    // A time-collapsing pair takes part in no member: as object the scale
    // is underdetermined, as image it forces scale 0. Every member keeps
    // the pitch distance up to sign, so only equal distances can pair.
    if (basis[0][0] == basis[1][0]) return std::nullopt;
    return abs(basis[1][1] - basis[0][1]);
  }

 protected:
  void validate_sigma(const SigmaVector& sigma) const override {
    if (sigma[0] == 0) {
      throw std::invalid_argument("2STR: scale component must be nonzero");
    }
    if (sigma[3] != 1 && sigma[3] != -1) {
      throw std::invalid_argument("2STR: reflection component must be 1 or -1");
    }
  }
};

}  // namespace detail

// ---- registry ------------------------------------------------------------

inline std::vector<const TransformationClass*>& class_registry() {
  static std::vector<const TransformationClass*> registry = [] {
    static const detail::TranslationClass t2;
    static const detail::TranslationReflectionClass tr2;
    static const detail::ScaleTranslationReflectionClass str2;
    return std::vector<const TransformationClass*>{&t2, &tr2, &str2};
  }();
  return registry;
}

/// Make an external class available to lookups by id and name.
inline void register_transformation_class(const TransformationClass& cls) {
  class_registry().push_back(&cls);
}

inline const TransformationClass& transformation_class(ClassId id) {
  for (const TransformationClass* cls : class_registry()) {
    if (cls->class_id() == id) return *cls;
  }
  throw std::invalid_argument("unknown transformation class id");
}

/// Look a class up by its external name ("2T", "2TR", "2STR", ...).
inline const TransformationClass* find_transformation_class(std::string_view name) {
  for (const TransformationClass* cls : class_registry()) {
    if (cls->name() == name) return cls;
  }
  return nullptr;
}

inline std::string_view class_name(ClassId id) { return transformation_class(id).name(); }

// ---- conveniences over the class interface -------------------------------

inline Point apply(const Transformation& f, const Point& p) {
  return transformation_class(f.cls).apply(f, p);
}

/// Image of a whole set; bijectivity keeps the size unchanged.
inline Dataset apply_to_set(const Transformation& f, const Dataset& points) {
  const TransformationClass& cls = transformation_class(f.cls);
  std::vector<Point> mapped;
  mapped.reserve(points.size());
  for (const Point& p : points.points()) mapped.push_back(cls.apply(f, p));
  return Dataset(points.empty() ? points.dimension() : cls.dimension(), std::move(mapped));
}

inline Transformation invert(const Transformation& f) {
  return transformation_class(f.cls).invert(f);
}

inline bool is_identity(const Transformation& f) {
  return transformation_class(f.cls).is_identity(f);
}

inline int complexity_rank(const Transformation& f) {
  return transformation_class(f.cls).complexity_rank(f);
}

inline std::vector<Transformation> get_transformations(const TransformationClass& cls,
                                                       std::span<const Point> object,
                                                       std::span<const Point> image) {
  return cls.transformations_between(object, image);
}

inline std::string format_sigma(const Transformation& f) {
  std::string out;
  for (std::size_t i = 0; i < f.sigma.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_rational(f.sigma[i]);
  }
  return out;
}

}  // namespace mtpkit
