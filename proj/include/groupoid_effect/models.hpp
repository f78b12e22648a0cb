#pragma once

// The concrete groupoids and homomorphisms behind the bundled scenarios.

#include "groupoid_effect/pullback.hpp"

#include <functional>

namespace ge::models {

using TranslationPtr = std::shared_ptr<const TranslationGroupoid>;

// Uniform in a box, optionally rejecting a ball around the origin.
std::function<Vector(Rng&)> box_sampler(int dim, double half_width, double min_norm = 0.0);
// Orbit oracle for actions whose orbits are level sets of `invariant`.
std::function<bool(const Vector&, const Vector&)> orbit_by(std::function<Vector(const Vector&)> invariant,
                                                           double tol = 1e-7);

// O(2) on R^2 mapped into the axis-preserving rotations on R^3,
// A -> diag(A, det A), (x, y) -> (x, y, 0).
struct Reflections {
  TranslationPtr plane;
  TranslationPtr space;
  HomPtr hom;
};
Reflections reflections();

// SO(2) on R^2 collapsed onto the north pole of SO(3) on R^3, through the
// inclusion and through the inclusion after A -> A^k.
struct PoleCollapse {
  TranslationPtr plane;
  TranslationPtr space;
  HomPtr direct;
  HomPtr twisted;
  int power = 1;
};
PoleCollapse pole_collapse(int power);

// The rotation-action groupoid on C x R modulo its whole-turn kernel, and the
// homs (theta; z, t) -> (R_z(sign * omega(t) theta), (0, 0, t)).
struct CircleQuotient {
  TranslationPtr base;
  std::shared_ptr<const QuotientGroupoid> quotient;
  HomPtr projection;
  TranslationPtr space;  // SO(3) on R^3
  HomPtr first;
  HomPtr second;
};
CircleQuotient circle_quotient(const FrequencyProfile& omega, int first_sign, int second_sign);

// Trivial SO(2) bundle over R and its power endomorphisms.
std::shared_ptr<const GroupBundle> circle_bundle();
HomPtr power_endomorphism(const std::shared_ptr<const GroupBundle>& bundle, int k);

// SO(3) on R^3 minus the origin, pulled back along t -> (0, 0, t) on (0, inf).
struct RadialPullback {
  TranslationPtr punctured;  // SO(3) on R^3 \ 0
  TranslationPtr space;      // SO(3) on R^3
  std::shared_ptr<const PullbackGroupoid> pullback;
  HomPtr projection;         // with lift and surjectivity witnesses
  HomPtr inclusion;          // punctured -> space
  TranslationPtr plane;      // O(2) on R^2 \ 0
  HomPtr planar;             // plane -> punctured, A -> diag(A, det A)
  // Naturally isomorphic to the projection through t -> (R_x(t), (0, 0, t)).
  HomPtr rotated;
  std::function<Arrow(const Vector&)> rotation;
};
RadialPullback radial_pullback();

}  // namespace ge::models
