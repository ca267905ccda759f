#include "spde/scheme.hpp"

#include <string>

#include "spde/error.hpp"

namespace spde {

SchemeKind parse_scheme(std::string_view name) {
  std::string s(name);
  for (char& c : s)
    if (c == '_') c = '-';
  if (s == "exp-euler" || s == "expeuler") return SchemeKind::ExpEuler;
  if (s == "drift-exp-euler" || s == "drift-exp" || s == "driftexpeuler")
    return SchemeKind::DriftExpEuler;
  if (s == "milstein") return SchemeKind::Milstein;
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected exp-euler|drift-exp-euler|milstein)");
}

std::string_view to_string(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::ExpEuler: return "exp-euler";
    case SchemeKind::DriftExpEuler: return "drift-exp-euler";
    case SchemeKind::Milstein: return "milstein";
  }
  return "unknown";
}

}  // namespace spde
