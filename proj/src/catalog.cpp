#include "innervar/catalog.hpp"

#include <json.hpp>

namespace innervar {

const CatalogEntry* find_builtin(std::string_view name) {
  for (const auto& e : builtin_configs())
    if (e.name == name) return &e;
  return nullptr;
}

std::string builtin_description(const CatalogEntry& entry) {
  const auto j = nlohmann::json::parse(entry.text, nullptr, false);
  if (!j.is_object() || !j.contains("description") || !j.at("description").is_string()) return {};
  return j.at("description").get<std::string>();
}

}  // namespace innervar
