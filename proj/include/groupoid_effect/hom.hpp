#pragma once

// Structured groupoid homomorphisms with their differential data and the
// optional witnesses used for fullness and essential surjectivity.

#include "groupoid_effect/groupoid.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ge {

enum class HomKind {
  Translation,
  QuotientProjection,
  PullbackProjection,
  WeakPullbackProjection,
  Composite,
  Custom,
  Pairing,
};

std::string to_string(HomKind kind);

// For a codomain point y: a domain point x and an arrow y -> f(x).
struct SurjectivityWitness {
  Vector point;
  Arrow connector;
};

struct HomWitnesses {
  // lift(x, x2, h) for h: f(x) -> f(x2) returns some g: x -> x2 with phi(g) = h.
  std::function<Arrow(const Vector&, const Vector&, const Arrow&)> lift;
  std::function<SurjectivityWitness(const Vector&)> surjectivity;
};

// A smooth base map with its analytic Jacobian (codomain chart x domain chart).
struct BaseMap {
  std::function<Vector(const Vector&)> map;
  std::function<Matrix(const Vector&)> jacobian;
};

// A Lie group homomorphism between matrix groups and its differential in
// algebra-basis coordinates.
struct GroupMap {
  std::function<Matrix(const Matrix&)> map;
  Matrix differential;
};

class GroupoidHom;
using HomPtr = std::shared_ptr<const GroupoidHom>;

class GroupoidHom {
 public:
  virtual ~GroupoidHom() = default;

  HomKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const GroupoidPtr& domain() const { return domain_; }
  const GroupoidPtr& codomain() const { return codomain_; }

  virtual Arrow apply(const Arrow& a) const = 0;
  virtual Vector base_map(const Vector& x) const = 0;
  // Codomain base chart x domain base chart.
  virtual Matrix base_jacobian(const Vector& x) const = 0;
  // Codomain arrow chart x domain arrow chart, at a. Throws PreconditionError
  // when the hom carries no arrow-level differential.
  virtual Matrix arrow_jacobian(const Arrow& a) const = 0;

  const HomWitnesses& witnesses() const { return witnesses_; }
  // Copy with the non-empty members of `overrides` replacing the witnesses.
  HomPtr with_witnesses(const HomWitnesses& overrides) const;

 protected:
  GroupoidHom(HomKind kind, std::string name, GroupoidPtr domain, GroupoidPtr codomain,
              HomWitnesses witnesses);
  GroupoidHom(const GroupoidHom&) = default;
  virtual std::shared_ptr<GroupoidHom> clone() const = 0;
  void set_witnesses(HomWitnesses w) { witnesses_ = std::move(w); }

 private:
  HomKind kind_;
  std::string name_;
  GroupoidPtr domain_;
  GroupoidPtr codomain_;
  HomWitnesses witnesses_;
};

// (g, x) -> (theta(g), f(x)) between translation groupoids or group bundles.
HomPtr translation_hom(GroupoidPtr domain, GroupoidPtr codomain, GroupMap theta, BaseMap f,
                       HomWitnesses witnesses = {}, std::string name = "");

// Base translation groupoid -> its quotient by a rotation kernel.
HomPtr quotient_projection(std::shared_ptr<const QuotientGroupoid> quotient);

struct CustomHomSpec {
  std::string name;
  std::function<Arrow(const Arrow&)> apply;
  BaseMap base;
  std::function<Matrix(const Arrow&)> arrow_jacobian;  // optional
  HomWitnesses witnesses;
};
HomPtr custom_hom(GroupoidPtr domain, GroupoidPtr codomain, CustomHomSpec spec);

// chain[0] is applied first. Witnesses are derived from the members' when
// all members carry them. An empty chain is not allowed; use identity_hom.
HomPtr composite(std::vector<HomPtr> chain, std::string name = "");
HomPtr identity_hom(GroupoidPtr g);

}  // namespace ge
