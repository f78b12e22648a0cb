#pragma once

#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/numlin.hpp"

#include <memory>
#include <string>
#include <variant>

namespace ge {

struct Arrow;
using ArrowPtr = std::shared_ptr<const Arrow>;

// (g, x) in a translation groupoid or a group bundle.
struct ActionArrow {
  Matrix group;
  Vector source;
};

// A class in a quotient groupoid. `representative` is the arrow the class was
// built from; `normalized` is the canonical member used for equality.
struct QuotientArrow {
  ActionArrow representative;
  ActionArrow normalized;
};

// (x', h, x) in a pullback groupoid, with h an arrow of the pulled-back
// groupoid from f(x) to f(x').
struct PullbackArrow {
  Vector target_point;
  ArrowPtr middle;
  Vector source_point;
};

// (h, k, g) in a weak pullback: h from the left factor, k the bridging arrow
// of the common codomain, g from the right factor.
struct WeakPullbackArrow {
  ArrowPtr left;
  ArrowPtr bridge;
  ArrowPtr right;
};

struct Arrow {
  using Data = std::variant<ActionArrow, QuotientArrow, PullbackArrow, WeakPullbackArrow>;
  Data data;

  template <class T>
  const T& as() const {
    if (const T* p = std::get_if<T>(&data)) return *p;
    throw MalformedArrowError("arrow belongs to a different kind of groupoid");
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(data);
  }
};

inline Arrow make_action_arrow(Matrix group, Vector source) {
  return Arrow{ActionArrow{std::move(group), std::move(source)}};
}

inline ArrowPtr share(Arrow a) { return std::make_shared<const Arrow>(std::move(a)); }

}  // namespace ge
