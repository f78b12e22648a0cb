#include "groupoid_effect/groupoid.hpp"

#include "groupoid_effect/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ge {

std::string to_string(GroupoidKind kind) {
  switch (kind) {
    case GroupoidKind::Translation: return "translation";
    case GroupoidKind::GroupBundle: return "group_bundle";
    case GroupoidKind::Quotient: return "quotient";
    case GroupoidKind::Pullback: return "pullback";
    case GroupoidKind::WeakPullback: return "weak_pullback";
  }
  return "unknown";
}

Groupoid::Groupoid(GroupoidKind kind, std::string name, ToleranceProfile tol, GroupoidHooks hooks)
    : kind_(kind), name_(std::move(name)), tol_(tol), hooks_(std::move(hooks)) {
  tol_.validate();
}

bool Groupoid::same_point(const Vector& x, const Vector& y) const {
  if (x.size() != y.size()) return false;
  return point_distance(x, y) <= tol_.map_abs_tol * std::max(1.0, x.norm());
}

void Groupoid::require_composable(const Vector& source_of_later, const Vector& target_of_earlier) const {
  if (!same_point(source_of_later, target_of_earlier)) {
    throw CompositionError(name_ + ": arrows are not composable (gap " +
                           std::to_string(point_distance(source_of_later, target_of_earlier)) + ")");
  }
}

Vector Groupoid::sample_point(Rng& rng) const {
  if (hooks_.sample_point) return hooks_.sample_point(rng);
  if (auto p = default_sample_point(rng)) return *p;
  throw PreconditionError(name_ + ": no point sampler configured");
}

Arrow Groupoid::sample_arrow(Rng& rng, const Vector& source) const {
  if (hooks_.sample_arrow) return hooks_.sample_arrow(rng, source);
  if (auto a = default_sample_arrow(rng, source)) return *a;
  throw PreconditionError(name_ + ": no arrow sampler configured");
}

std::optional<Arrow> Groupoid::sample_isotropy(Rng& rng, const Vector& x) const {
  if (hooks_.sample_isotropy) return hooks_.sample_isotropy(rng, x);
  return default_sample_isotropy(rng, x);
}

bool Groupoid::has_isotropy_sampler() const {
  if (hooks_.sample_isotropy) return true;
  // Probe the default on a throwaway stream; the defaults are total when present.
  Rng probe(0);
  try {
    const Vector x = sample_point(probe);
    return default_sample_isotropy(probe, x).has_value();
  } catch (const PreconditionError&) {
    return false;
  }
}

std::optional<bool> Groupoid::same_orbit(const Vector& x, const Vector& y) const {
  if (!hooks_.same_orbit) return std::nullopt;
  return hooks_.same_orbit(x, y);
}

GroupoidPtr Groupoid::with_hooks(const GroupoidHooks& overrides) const {
  auto copy = clone();
  if (overrides.sample_point) copy->hooks_.sample_point = overrides.sample_point;
  if (overrides.sample_arrow) copy->hooks_.sample_arrow = overrides.sample_arrow;
  if (overrides.sample_isotropy) copy->hooks_.sample_isotropy = overrides.sample_isotropy;
  if (overrides.same_orbit) copy->hooks_.same_orbit = overrides.same_orbit;
  return copy;
}

namespace {

const ActionArrow& action_part(const Arrow& a, int base_dim, int matrix_size) {
  const auto& p = a.as<ActionArrow>();
  if (p.source.size() != base_dim || p.group.rows() != matrix_size || p.group.cols() != matrix_size) {
    throw MalformedArrowError("arrow components have the wrong dimensions");
  }
  return p;
}

Vector log_coordinates(const LieGroupModel& group, const Matrix& from, const Matrix& to) {
  const Matrix rel = group.invert(from) * to;
  return group.algebra_coordinates(rel.log());
}

}  // namespace

// ---------------------------------------------------------------- translation

TranslationGroupoid::TranslationGroupoid(LieGroupModel group, SmoothActionModel action,
                                         ToleranceProfile tol, GroupoidHooks hooks)
    : Groupoid(GroupoidKind::Translation, group.name() + " x " + action.name(), tol, std::move(hooks)),
      group_(std::move(group)), action_(std::move(action)) {}

std::shared_ptr<Groupoid> TranslationGroupoid::clone() const {
  return std::make_shared<TranslationGroupoid>(*this);
}

Vector TranslationGroupoid::source(const Arrow& a) const {
  return action_part(a, point_dim(), group_.matrix_size()).source;
}

Vector TranslationGroupoid::target(const Arrow& a) const {
  const auto& p = action_part(a, point_dim(), group_.matrix_size());
  return action_.act(p.group, p.source);
}

Arrow TranslationGroupoid::compose(const Arrow& later, const Arrow& earlier) const {
  const auto& l = action_part(later, point_dim(), group_.matrix_size());
  const auto& e = action_part(earlier, point_dim(), group_.matrix_size());
  require_composable(l.source, target(earlier));
  return make_action_arrow(group_.multiply(l.group, e.group), e.source);
}

Arrow TranslationGroupoid::inverse(const Arrow& a) const {
  const auto& p = action_part(a, point_dim(), group_.matrix_size());
  return make_action_arrow(group_.invert(p.group), action_.act(p.group, p.source));
}

Arrow TranslationGroupoid::unit(const Vector& x) const {
  if (x.size() != point_dim()) throw InputError(name() + ": base point has the wrong dimension");
  return make_action_arrow(group_.identity(), x);
}

double TranslationGroupoid::arrow_distance(const Arrow& a, const Arrow& b) const {
  const auto& p = action_part(a, point_dim(), group_.matrix_size());
  const auto& q = action_part(b, point_dim(), group_.matrix_size());
  return (p.group - q.group).norm() + (p.source - q.source).norm();
}

ArrowTangent TranslationGroupoid::arrow_tangent(const Arrow& a) const {
  const auto& p = action_part(a, point_dim(), group_.matrix_size());
  const int d = group_.dim(), n = point_dim();
  const Matrix jac = action_.base_jacobian(p.group, p.source);
  ArrowTangent t;
  t.basis = Matrix::Identity(d + n, d + n);
  t.ds = Matrix::Zero(n, d + n);
  t.ds.rightCols(n) = Matrix::Identity(n, n);
  t.dt = Matrix(n, d + n);
  t.dt.leftCols(d) = jac * action_.generator_matrix(group_, p.source);
  t.dt.rightCols(n) = jac;
  return t;
}

std::optional<Arrow> TranslationGroupoid::arrow_chart_step(const Arrow& a, const Vector& w) const {
  const auto& p = action_part(a, point_dim(), group_.matrix_size());
  const int d = group_.dim();
  return make_action_arrow(p.group * group_.exp(w.head(d)), p.source + w.tail(point_dim()));
}

std::optional<Vector> TranslationGroupoid::arrow_chart_coordinates(const Arrow& a, const Arrow& b) const {
  const auto& p = action_part(a, point_dim(), group_.matrix_size());
  const auto& q = action_part(b, point_dim(), group_.matrix_size());
  Vector w(arrow_chart_dim());
  w << log_coordinates(group_, p.group, q.group), q.source - p.source;
  return w;
}

std::optional<Arrow> TranslationGroupoid::default_sample_arrow(Rng& rng, const Vector& x) const {
  return make_action_arrow(group_.sample(rng), x);
}

// ---------------------------------------------------------------- group bundle

GroupBundle::GroupBundle(LieGroupModel group, int base_dim, ToleranceProfile tol, GroupoidHooks hooks)
    : Groupoid(GroupoidKind::GroupBundle, group.name() + " bundle over R^" + std::to_string(base_dim),
               tol, std::move(hooks)),
      group_(std::move(group)), base_dim_(base_dim) {
  if (base_dim_ < 1) throw InputError("bundle base dimension must be positive");
}

std::shared_ptr<Groupoid> GroupBundle::clone() const { return std::make_shared<GroupBundle>(*this); }

Vector GroupBundle::source(const Arrow& a) const {
  return action_part(a, base_dim_, group_.matrix_size()).source;
}

Vector GroupBundle::target(const Arrow& a) const { return source(a); }

Arrow GroupBundle::compose(const Arrow& later, const Arrow& earlier) const {
  const auto& l = action_part(later, base_dim_, group_.matrix_size());
  const auto& e = action_part(earlier, base_dim_, group_.matrix_size());
  require_composable(l.source, e.source);
  return make_action_arrow(group_.multiply(l.group, e.group), e.source);
}

Arrow GroupBundle::inverse(const Arrow& a) const {
  const auto& p = action_part(a, base_dim_, group_.matrix_size());
  return make_action_arrow(group_.invert(p.group), p.source);
}

Arrow GroupBundle::unit(const Vector& x) const {
  if (x.size() != base_dim_) throw InputError(name() + ": base point has the wrong dimension");
  return make_action_arrow(group_.identity(), x);
}

double GroupBundle::arrow_distance(const Arrow& a, const Arrow& b) const {
  const auto& p = action_part(a, base_dim_, group_.matrix_size());
  const auto& q = action_part(b, base_dim_, group_.matrix_size());
  return (p.group - q.group).norm() + (p.source - q.source).norm();
}

ArrowTangent GroupBundle::arrow_tangent(const Arrow& a) const {
  action_part(a, base_dim_, group_.matrix_size());
  const int d = group_.dim(), n = base_dim_;
  ArrowTangent t;
  t.basis = Matrix::Identity(d + n, d + n);
  t.ds = Matrix::Zero(n, d + n);
  t.ds.rightCols(n) = Matrix::Identity(n, n);
  t.dt = t.ds;
  return t;
}

std::optional<Arrow> GroupBundle::arrow_chart_step(const Arrow& a, const Vector& w) const {
  const auto& p = action_part(a, base_dim_, group_.matrix_size());
  return make_action_arrow(p.group * group_.exp(w.head(group_.dim())), p.source + w.tail(base_dim_));
}

std::optional<Vector> GroupBundle::arrow_chart_coordinates(const Arrow& a, const Arrow& b) const {
  const auto& p = action_part(a, base_dim_, group_.matrix_size());
  const auto& q = action_part(b, base_dim_, group_.matrix_size());
  Vector w(arrow_chart_dim());
  w << log_coordinates(group_, p.group, q.group), q.source - p.source;
  return w;
}

std::optional<Arrow> GroupBundle::default_sample_arrow(Rng& rng, const Vector& x) const {
  return make_action_arrow(group_.sample(rng), x);
}

std::optional<Arrow> GroupBundle::default_sample_isotropy(Rng& rng, const Vector& x) const {
  return make_action_arrow(group_.sample(rng), x);
}

// ---------------------------------------------------------------- rotation kernel

RotationKernel::RotationKernel(FrequencyProfile omega, double scale)
    : omega_(std::move(omega)), scale_(scale) {
  if (!(scale_ > 0)) throw InputError("kernel scale must be positive");
}

std::optional<double> RotationKernel::period(double t) const {
  const double w = omega_.value(t);
  if (w == 0.0) return std::nullopt;
  return scale_ * 2.0 * std::numbers::pi / std::abs(w);
}

double RotationKernel::normalize(double theta, double t, const ToleranceProfile& tol) const {
  const auto p = period(t);
  if (!p) return theta;
  double r = std::fmod(theta, *p);
  if (r < 0) r += *p;
  // Snap in angle units: |omega| r is the rotation angle left over.
  const double w = std::abs(omega_.value(t));
  const double slack = tol.map_abs_tol * std::max(1.0, std::abs(w * theta));
  if (w * r <= slack || w * (*p - r) <= slack) return 0.0;
  return r;
}

bool RotationKernel::contains(double theta, double t, const ToleranceProfile& tol) const {
  if (theta == 0.0) return true;
  if (!period(t)) return false;
  return normalize(theta, t, tol) == 0.0;
}

// ---------------------------------------------------------------- quotient

QuotientGroupoid::QuotientGroupoid(std::shared_ptr<const TranslationGroupoid> base,
                                   RotationKernel kernel, GroupoidHooks hooks)
    : Groupoid(GroupoidKind::Quotient, "(" + base->name() + ")/K", base->tolerance(), std::move(hooks)),
      base_(std::move(base)), kernel_(std::move(kernel)) {}

std::shared_ptr<Groupoid> QuotientGroupoid::clone() const {
  return std::make_shared<QuotientGroupoid>(*this);
}

Arrow QuotientGroupoid::make_class(const Arrow& base_arrow) const {
  const auto& rep = action_part(base_arrow, point_dim(), base_->group().matrix_size());
  const double theta = additive_value(rep.group);
  const double reduced = kernel_.normalize(theta, rep.source(2), tolerance());
  return Arrow{QuotientArrow{rep, ActionArrow{additive_element(reduced), rep.source}}};
}

Arrow QuotientGroupoid::make_class(double theta, const Vector& point) const {
  return make_class(make_action_arrow(additive_element(theta), point));
}

double QuotientGroupoid::normalized_parameter(const Arrow& a) const {
  return additive_value(a.as<QuotientArrow>().normalized.group);
}

Vector QuotientGroupoid::source(const Arrow& a) const { return a.as<QuotientArrow>().normalized.source; }

Vector QuotientGroupoid::target(const Arrow& a) const {
  return base_->target(Arrow{a.as<QuotientArrow>().normalized});
}

Arrow QuotientGroupoid::compose(const Arrow& later, const Arrow& earlier) const {
  const auto& l = later.as<QuotientArrow>();
  const auto& e = earlier.as<QuotientArrow>();
  require_composable(l.normalized.source, target(earlier));
  const double theta = additive_value(l.representative.group) + additive_value(e.representative.group);
  return make_class(theta, e.representative.source);
}

Arrow QuotientGroupoid::inverse(const Arrow& a) const {
  const auto& q = a.as<QuotientArrow>();
  return make_class(-additive_value(q.representative.group), target(a));
}

Arrow QuotientGroupoid::unit(const Vector& x) const {
  if (x.size() != point_dim()) throw InputError(name() + ": base point has the wrong dimension");
  return make_class(0.0, x);
}

double QuotientGroupoid::arrow_distance(const Arrow& a, const Arrow& b) const {
  const auto& p = a.as<QuotientArrow>().normalized;
  const auto& q = b.as<QuotientArrow>().normalized;
  double gap = std::abs(additive_value(p.group) - additive_value(q.group));
  if (const auto per = kernel_.period(p.source(2))) gap = std::min(gap, std::abs(*per - gap));
  return gap + (p.source - q.source).norm();
}

ArrowTangent QuotientGroupoid::arrow_tangent(const Arrow& a) const {
  return base_->arrow_tangent(Arrow{a.as<QuotientArrow>().representative});
}

std::optional<Arrow> QuotientGroupoid::arrow_chart_step(const Arrow& a, const Vector& w) const {
  const auto step = base_->arrow_chart_step(Arrow{a.as<QuotientArrow>().representative}, w);
  return make_class(*step);
}

std::optional<Vector> QuotientGroupoid::arrow_chart_coordinates(const Arrow& a, const Arrow& b) const {
  return base_->arrow_chart_coordinates(Arrow{a.as<QuotientArrow>().representative},
                                        Arrow{b.as<QuotientArrow>().representative});
}

std::optional<Vector> QuotientGroupoid::default_sample_point(Rng& rng) const {
  // Stay away from the vanishing locus of omega, where the modulus jumps.
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vector x(3);
    x << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
    if (std::abs(kernel_.omega().value(x(2))) >= tolerance().fd_step) return x;
  }
  throw PreconditionError(name() + ": omega vanishes on the whole sampling window");
}

std::optional<Arrow> QuotientGroupoid::default_sample_arrow(Rng& rng, const Vector& x) const {
  return make_class(rng.uniform(-4.0, 4.0), x);
}

std::optional<Arrow> QuotientGroupoid::default_sample_isotropy(Rng& rng, const Vector& x) const {
  const double w = kernel_.omega().value(x(2));
  if (w == 0.0 || x.head(2).norm() <= 1e-12) return make_class(rng.uniform(-4.0, 4.0), x);
  // Off the axis only whole turns fix the point; their classes are units
  // (for the unscaled kernel) but the representatives are not.
  const double turns = static_cast<double>(static_cast<int>(rng.index(7)) - 3);
  return make_class(turns * 2.0 * std::numbers::pi / std::abs(w), x);
}

// ---------------------------------------------------------------- builders

std::shared_ptr<const TranslationGroupoid> build_translation(LieGroupModel group,
                                                             SmoothActionModel action,
                                                             GroupoidHooks hooks,
                                                             ToleranceProfile tol) {
  if (group.matrix_size() < 1 || action.base_dim() < 1) throw InputError("empty group or action");
  return std::make_shared<const TranslationGroupoid>(std::move(group), std::move(action), tol,
                                                     std::move(hooks));
}

std::shared_ptr<const GroupBundle> build_group_bundle(LieGroupModel group, int base_dim,
                                                      GroupoidHooks hooks, ToleranceProfile tol) {
  return std::make_shared<const GroupBundle>(std::move(group), base_dim, tol, std::move(hooks));
}

std::shared_ptr<const QuotientGroupoid> quotient_by_kernel(
    std::shared_ptr<const TranslationGroupoid> base, RotationKernel kernel, GroupoidHooks hooks) {
  const auto& freq = base->action().frequency();
  if (!freq) throw ConfigurationError("quotient base is not a rotation-action groupoid");
  if (!(*freq == kernel.omega())) {
    throw ConfigurationError("kernel frequency " + kernel.omega().describe() +
                             " does not match the action frequency " + freq->describe());
  }
  if (base->group().matrix_size() != 2 || base->point_dim() != 3) {
    throw ConfigurationError("quotient base must be the additive group acting on C x R");
  }
  return std::make_shared<const QuotientGroupoid>(std::move(base), std::move(kernel), std::move(hooks));
}

std::function<Arrow(Rng&, const Vector&)> stabilizer_isotropy(
    std::function<Matrix(Rng&, const Vector&, double)> stabilizer, double tol) {
  return [stabilizer = std::move(stabilizer), tol](Rng& rng, const Vector& x) {
    return make_action_arrow(stabilizer(rng, x, tol), x);
  };
}

// ---------------------------------------------------------------- axioms

double AxiomReport::worst() const {
  return std::max({unit_source_target, composition_ends, associativity, unit_laws, inverse_laws,
                   target_of_inverse});
}

AxiomReport check_groupoid_axioms(const Groupoid& g, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  AxiomReport r;
  r.samples = samples;
  auto bump = [](double& slot, double v) { slot = std::max(slot, v); };
  for (std::size_t i = 0; i < samples; ++i) {
    const Vector x = g.sample_point(rng);
    const Arrow a = g.sample_arrow(rng, x);
    const Arrow b = g.sample_arrow(rng, g.target(a));
    const Arrow c = g.sample_arrow(rng, g.target(b));

    const Arrow ux = g.unit(x);
    bump(r.unit_source_target, std::max(g.point_distance(g.source(ux), x), g.point_distance(g.target(ux), x)));

    const Arrow ba = g.compose(b, a);
    bump(r.composition_ends,
         std::max(g.point_distance(g.source(ba), g.source(a)), g.point_distance(g.target(ba), g.target(b))));

    const Arrow cb = g.compose(c, b);
    bump(r.associativity, g.arrow_distance(g.compose(c, ba), g.compose(cb, a)));

    bump(r.unit_laws, std::max(g.arrow_distance(g.compose(g.unit(g.target(a)), a), a),
                               g.arrow_distance(g.compose(a, g.unit(g.source(a))), a)));

    const Arrow ai = g.inverse(a);
    const Arrow bi = g.inverse(b);
    bump(r.inverse_laws, std::max({g.arrow_distance(g.compose(a, ai), g.unit(g.target(a))),
                                   g.arrow_distance(g.compose(ai, a), g.unit(g.source(a))),
                                   g.arrow_distance(g.inverse(ba), g.compose(ai, bi))}));

    bump(r.target_of_inverse, g.point_distance(g.target(ai), g.source(a)));
  }
  return r;
}

}  // namespace ge
