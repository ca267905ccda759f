#pragma once

#include <string_view>

namespace spde {

/// Time-stepping scheme. All three share the exponential treatment of the linear
/// part; they differ in the drift update and in the noise increment law.
enum class SchemeKind { ExpEuler, DriftExpEuler, Milstein };

/// Accepts "exp-euler", "drift-exp-euler" and "milstein" (underscores allowed).
SchemeKind parse_scheme(std::string_view name);
std::string_view to_string(SchemeKind kind) noexcept;

inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::ExpEuler, SchemeKind::DriftExpEuler,
                                             SchemeKind::Milstein};

}  // namespace spde
