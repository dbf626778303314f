#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "innervar/field.hpp"
#include "innervar/geometry.hpp"

namespace innervar::config {

using nlohmann::json;

/// Throws ConfigError naming `where` if `j` is not an object or carries a
/// key outside `allowed`.
void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed);
void check_keys(const json& j, const std::string& where, const std::vector<std::string>& allowed);

double number(const json& j, const std::string& key, const std::string& where);
double number(const json& j, const std::string& key, const std::string& where, double fallback);
int integer(const json& j, const std::string& key, const std::string& where);
int integer(const json& j, const std::string& key, const std::string& where, int fallback);
bool boolean(const json& j, const std::string& key, const std::string& where, bool fallback);
std::string text(const json& j, const std::string& key, const std::string& where);
std::string text(const json& j, const std::string& key, const std::string& where, const std::string& fallback);
std::vector<double> numbers(const json& j, const std::string& key, const std::string& where);
Point point(const json& j, const std::string& key, const std::string& where);

/// Geometry descriptors:
///   {"type": "flat", "dim", "normal_axis", "offset", "lo", "hi", "periodic", "panels", "order"}
///   {"type": "circle", "center", "radius", "n"}
///   {"type": "sphere", "center", "radius", "n_theta", "n_phi"}
///   {"type": "straight-filament", "origin", "axis", "length", "periodic", "n"}
///   {"type": "circular-filament", "center", "radius", "n"}
InterfacePtr build_geometry(const json& j, const std::string& where);

struct FieldContext {
  int dim = 0;
  InterfacePtr geometry;
};

/// Field descriptors, composable:
///   zero, constant, linear, dilation, rotation2d, rotation3d, coordinate,
///   polynomial, trigonometric, bump, plateau, scaled, sum, difference,
///   product, stack, compose, zeta-eta, normal-extension.
/// "dim" defaults to the context dimension.
Field build_field(const json& j, const FieldContext& ctx, const std::string& where);

}  // namespace innervar::config
