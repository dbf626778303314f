#pragma once

#include <span>
#include <string>
#include <string_view>

namespace innervar {

struct CatalogEntry {
  std::string_view name;
  std::string_view text;
};

/// Built-in experiment configs, sorted by name.
std::span<const CatalogEntry> builtin_configs();
const CatalogEntry* find_builtin(std::string_view name);
/// The config's "description" value, or an empty string.
std::string builtin_description(const CatalogEntry& entry);

}  // namespace innervar
