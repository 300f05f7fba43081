#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "betarc/errors.hpp"

namespace betarc {

enum class LinkKind { Identity, Logit, Cloglog };

struct LinkFn {
  LinkKind kind = LinkKind::Identity;

  /// g(x) for x in (0,1).
  double operator()(double x) const noexcept {
    switch (kind) {
      case LinkKind::Identity: return x;
      case LinkKind::Logit: return std::log(x) - std::log1p(-x);
      case LinkKind::Cloglog: return std::log(-std::log1p(-x));
    }
    return x;
  }

  double inverse(double eta) const noexcept {
    switch (kind) {
      case LinkKind::Identity: return eta;
      case LinkKind::Logit: return 1.0 / (1.0 + std::exp(-eta));
      case LinkKind::Cloglog: return -std::expm1(-std::exp(eta));
    }
    return eta;
  }

  friend bool operator==(const LinkFn&, const LinkFn&) = default;
};

inline std::string_view to_string(LinkKind k) noexcept {
  switch (k) {
    case LinkKind::Identity: return "identity";
    case LinkKind::Logit: return "logit";
    case LinkKind::Cloglog: return "cloglog";
  }
  return "?";
}

inline LinkFn parse_link(std::string_view name) {
  if (name == "identity") return {LinkKind::Identity};
  if (name == "logit") return {LinkKind::Logit};
  if (name == "cloglog") return {LinkKind::Cloglog};
  throw DomainError("unknown link '" + std::string(name) + "'");
}

}  // namespace betarc
